#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "ipmtk/materials.hpp"

namespace ipmtk {

/// Rotating unbalance force m*e*w^2 (N).
double unbalance_force_n(double mass_kg, double eccentricity_m, double omega_rad_s);

/// Average lamination stress: total radial load over the rib section (Pa).
double lamination_stress_pa(double force_n, double area_m2);

struct StrainCheck {
    double strain = 0;
    bool within_yield = true;
};

/// Elastic strain stress/E and a yield-margin flag (boundary exclusive).
StrainCheck strain_check(double stress_pa, const SoftMagneticMaterial& mat);

struct ForcingHarmonic {
    double amplitude_n = 0;
    double omega_rad_s = 0;
    double phase_rad = 0;
};

/// Two-DOF undamped lateral model M x'' + K x = f(t), forced by rotating
/// harmonics F_k {cos(w_k t + p_k); sin(w_k t + p_k)}.
struct LateralModel {
    Eigen::Matrix2d mass;       // kg
    Eigen::Matrix2d stiffness;  // N/m
    std::vector<ForcingHarmonic> harmonics;
};

struct LateralResponse {
    double x_amplitude_m = 0;
    double y_amplitude_m = 0;
};

/// Undamped natural frequencies of (M, K), ascending (Hz).
std::array<double, 2> lateral_natural_frequencies_hz(const LateralModel& model);

/// Steady-state response: per harmonic X = (K - w^2 M)^-1 F, total amplitude
/// as root-sum-square over harmonics. Throws ResonanceError when a forcing
/// frequency is within 1% of a natural frequency.
LateralResponse lateral_response(const LateralModel& model);

/// Rotating-unbalance model: fundamental m*e*w^2 plus n_harmonics-1 shaft
/// harmonics with geometrically decaying amplitude, isotropic support
/// stiffness k.
LateralModel build_lateral_model(double mass_kg, double eccentricity_m, double omega_rad_s,
                                 double stiffness_n_m, int n_harmonics = 5,
                                 double harmonic_decay = 0.25);

/// Stator-mode scale factors: f(mode) = C_mode * sqrt(E/rho). Modes 2..10.
struct ModeFactors {
    std::array<double, 9> hz_per_wave_speed{};  // index 0 = mode 2
    bool calibrated = false;
};

ModeFactors fit_mode_factors(const SoftMagneticMaterial& reference,
                             const std::array<double, 9>& measured_hz);

std::array<double, 9> natural_frequencies_hz(const SoftMagneticMaterial& mat,
                                             const ModeFactors& factors);

struct ModeMargin {
    int mode = 0;
    double margin = 0;  // min over excitations of |f_exc - f_n| / f_n
    bool flagged = false;
};

std::vector<ModeMargin> resonance_margins(const std::array<double, 9>& natural_hz,
                                          const std::vector<double>& excitation_hz,
                                          double flag_threshold = 0.1);

}  // namespace ipmtk
