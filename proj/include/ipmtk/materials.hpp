#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ipmtk/common.hpp"

namespace ipmtk {

/// Single-valued anhysteretic magnetization curve B(H), monotone piecewise
/// cubic through the measured samples (Fritsch-Carlson slopes), with an
/// optional sum-of-exponentials tail covering the over-fluxed region.
class BHCurve {
public:
    BHCurve() = default;

    // Validates sample invariants: H strictly increasing from (0,0),
    // B strictly increasing, secant slope >= mu0 everywhere.
    static BHCurve from_samples(std::vector<std::array<double, 2>> hb_samples);

    double b_at(double h) const;      // T
    double slope_at(double h) const;  // dB/dH, T/(A/m)

    // Integral of B dH from 0 to h (magnetic coenergy density, J/m^3).
    double coenergy_density(double h) const;

    const std::vector<double>& h_samples() const { return h_; }
    const std::vector<double>& b_samples() const { return b_; }
    std::size_t size() const { return h_.size(); }
    bool empty() const { return h_.empty(); }

    double h_last() const { return h_.back(); }
    bool extended() const { return tail_.has_value(); }
    // Upper end of the valid evaluation domain (last sample, or the
    // extrapolation horizon once extended).
    double h_domain_max() const { return tail_ ? tail_->horizon : h_.back(); }

    bool operator==(const BHCurve& other) const;

    friend BHCurve extrapolate_overflux(const BHCurve& curve, double h_target);

private:
    struct Tail {
        double h_junction = 0, b_junction = 0;
        double a1 = 0, tau1 = 1, a2 = 0, tau2 = 1;  // excess-slope exponentials
        double horizon = 0;
    };

    std::size_t segment_of(double h) const;
    double tail_b(double h) const;
    double tail_slope(double h) const;
    double tail_integral(double h) const;  // integral of B dH over [h_junction, h]

    std::vector<double> h_, b_;
    std::vector<double> m_;        // node slopes dB/dH
    std::vector<double> int_;      // cumulative integral of B dH up to sample i
    std::optional<Tail> tail_;
};

/// Extend the curve past its last sample with a two-exponential decay of the
/// excess slope (dB/dH - mu0) fitted to the last three samples, so that B
/// approaches the vacuum-slope asymptote C1-continuously. Returns the input
/// unchanged when h_target is already inside the domain.
BHCurve extrapolate_overflux(const BHCurve& curve, double h_target);

/// Two-term Steinmetz coefficients: p = k_h*f*B^beta + k_e*f^2*B^2 (W/kg).
struct LossCoefficients {
    double k_h = 0;   // W*s/T^beta/kg
    double beta = 2;  // dimensionless, in [1.5, 2.5]
    double k_e = 0;   // W*s^2/T^2/kg
};

struct SoftMagneticMaterial {
    std::string name;
    BHCurve bh;
    LossCoefficients loss;
    double young_modulus_pa = 0;
    double density_kg_m3 = 0;
    double yield_stress_pa = 0;
    double lamination_thickness_m = 0;
    int cost_tier = 1;  // 1 = economical .. 4 = premium cobalt alloys
};

/// Specific core loss at peak flux density b_peak and frequency f (W/kg).
double core_loss_density(const SoftMagneticMaterial& mat, double b_peak_t, double f_hz);

/// Registry of soft-magnetic materials, ordered as in the source file.
class MaterialDb {
public:
    static MaterialDb load(const std::string& path);
    static MaterialDb from_json_text(const std::string& text, const std::string& origin = "<string>");

    void save(const std::string& path) const;
    std::string to_json_text() const;

    bool contains(const std::string& name) const;
    const SoftMagneticMaterial& get(const std::string& name) const;
    const std::vector<SoftMagneticMaterial>& all() const { return materials_; }
    std::vector<std::string> names() const;
    std::size_t size() const { return materials_.size(); }

private:
    std::vector<SoftMagneticMaterial> materials_;
};

/// Path of the material DB shipped with the toolkit, honoring the
/// IPMTK_MATERIALS_DB environment override.
std::string default_material_db_path();

}  // namespace ipmtk
