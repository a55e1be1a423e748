#include "ipmtk/mechanics.hpp"

#include <cmath>
#include <complex>

namespace ipmtk {

double unbalance_force_n(double mass_kg, double eccentricity_m, double omega_rad_s) {
    if (!(mass_kg > 0)) throw std::domain_error("unbalance_force: mass must be > 0");
    if (eccentricity_m < 0) throw std::domain_error("unbalance_force: eccentricity must be >= 0");
    return mass_kg * eccentricity_m * omega_rad_s * omega_rad_s;
}

double lamination_stress_pa(double force_n, double area_m2) {
    if (!(area_m2 > 0)) throw std::domain_error("lamination_stress: area must be > 0");
    return force_n / area_m2;
}

StrainCheck strain_check(double stress_pa, const SoftMagneticMaterial& mat) {
    if (stress_pa < 0) throw std::domain_error("strain_check: stress must be >= 0");
    StrainCheck out;
    out.strain = stress_pa / mat.young_modulus_pa;
    out.within_yield = stress_pa < mat.yield_stress_pa;
    return out;
}

std::array<double, 2> lateral_natural_frequencies_hz(const LateralModel& model) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> es(model.stiffness, model.mass);
    if (es.info() != Eigen::Success)
        throw std::domain_error("lateral model: mass/stiffness matrices must be SPD");
    std::array<double, 2> f{};
    for (int i = 0; i < 2; ++i) {
        const double w2 = es.eigenvalues()[i];
        if (!(w2 > 0)) throw std::domain_error("lateral model: stiffness matrix not positive definite");
        f[static_cast<std::size_t>(i)] = std::sqrt(w2) / (2.0 * kPi);
    }
    return f;
}

LateralResponse lateral_response(const LateralModel& model) {
    const auto fn = lateral_natural_frequencies_hz(model);
    for (const auto& h : model.harmonics) {
        const double f_exc = h.omega_rad_s / (2.0 * kPi);
        for (double f : fn)
            if (f > 0 && std::abs(f_exc - f) / f < 0.01)
                throw ResonanceError("lateral_response: forcing at " + std::to_string(f_exc) +
                                     " Hz is within 1% of the " + std::to_string(f) +
                                     " Hz natural frequency (undamped model)");
    }

    using C = std::complex<double>;
    double sx = 0, sy = 0;
    for (const auto& h : model.harmonics) {
        if (h.amplitude_n == 0.0) continue;
        const double w = h.omega_rad_s;
        Eigen::Matrix2d A = model.stiffness - w * w * model.mass;
        // Rotating force F {cos(wt+p); sin(wt+p)} = Re{F e^{i(wt+p)} [1; -i]}.
        Eigen::Matrix<C, 2, 1> rhs;
        const C ephase = std::polar(h.amplitude_n, h.phase_rad);
        rhs(0) = ephase;
        rhs(1) = C(0, -1) * ephase;
        Eigen::Matrix<C, 2, 2> Ac = A.cast<C>();
        Eigen::Matrix<C, 2, 1> z = Ac.partialPivLu().solve(rhs);
        sx += std::norm(z(0));
        sy += std::norm(z(1));
    }
    LateralResponse out;
    out.x_amplitude_m = std::sqrt(sx);
    out.y_amplitude_m = std::sqrt(sy);
    return out;
}

LateralModel build_lateral_model(double mass_kg, double eccentricity_m, double omega_rad_s,
                                 double stiffness_n_m, int n_harmonics, double harmonic_decay) {
    if (!(mass_kg > 0) || !(stiffness_n_m > 0))
        throw std::domain_error("build_lateral_model: mass and stiffness must be > 0");
    if (n_harmonics < 1) throw std::domain_error("build_lateral_model: need at least 1 harmonic");
    LateralModel m;
    m.mass = Eigen::Matrix2d::Identity() * mass_kg;
    m.stiffness = Eigen::Matrix2d::Identity() * stiffness_n_m;
    double scale = 1.0;
    for (int k = 1; k <= n_harmonics; ++k) {
        ForcingHarmonic h;
        h.omega_rad_s = k * omega_rad_s;
        h.amplitude_n = mass_kg * eccentricity_m * h.omega_rad_s * h.omega_rad_s * scale;
        h.phase_rad = 0;
        m.harmonics.push_back(h);
        scale *= harmonic_decay;
    }
    return m;
}

ModeFactors fit_mode_factors(const SoftMagneticMaterial& reference,
                             const std::array<double, 9>& measured_hz) {
    if (!(reference.young_modulus_pa > 0) || !(reference.density_kg_m3 > 0))
        throw ConfigError("fit_mode_factors: reference material needs E and rho");
    const double v = std::sqrt(reference.young_modulus_pa / reference.density_kg_m3);
    ModeFactors mf;
    for (std::size_t i = 0; i < 9; ++i) {
        if (!(measured_hz[i] > 0))
            throw ConfigError("fit_mode_factors: mode " + std::to_string(i + 2) +
                              " frequency must be > 0");
        mf.hz_per_wave_speed[i] = measured_hz[i] / v;
    }
    mf.calibrated = true;
    return mf;
}

std::array<double, 9> natural_frequencies_hz(const SoftMagneticMaterial& mat,
                                             const ModeFactors& factors) {
    if (!factors.calibrated)
        throw ConfigError("natural_frequencies: mode factors not calibrated");
    const double v = std::sqrt(mat.young_modulus_pa / mat.density_kg_m3);
    std::array<double, 9> f{};
    for (std::size_t i = 0; i < 9; ++i) f[i] = factors.hz_per_wave_speed[i] * v;
    return f;
}

std::vector<ModeMargin> resonance_margins(const std::array<double, 9>& natural_hz,
                                          const std::vector<double>& excitation_hz,
                                          double flag_threshold) {
    if (excitation_hz.empty())
        throw std::domain_error("resonance_margins: excitation list must be non-empty");
    std::vector<ModeMargin> out;
    out.reserve(9);
    for (std::size_t i = 0; i < 9; ++i) {
        ModeMargin m;
        m.mode = static_cast<int>(i) + 2;
        double best = 1e300;
        for (double f : excitation_hz) best = std::min(best, std::abs(f - natural_hz[i]) / natural_hz[i]);
        m.margin = best;
        m.flagged = best < flag_threshold;
        out.push_back(m);
    }
    return out;
}

}  // namespace ipmtk
