#pragma once

#include <string>

#include "ipmtk/drive.hpp"
#include "ipmtk/mechanics.hpp"

namespace ipmtk {

/// Model factors fitted once against the reference FEA benchmark cell and
/// then held fixed across the whole material sweep.
struct Calibration {
    double remanence_scale = 1.0;
    double eccentricity_m = 5e-5;
    double ripple_force_coeff = 5e-4;    // N per (% ripple * Nm / m)
    double support_stiffness_n_m = 2.0e8;
    double phase_resistance_ohm = 0.0;   // 0 -> geometry estimate
    double magnet_loss_coeff = 35.0;     // W per Hz^2 m^3
    ModeFactors mode_factors;
};

Calibration load_calibration(const std::string& path);
void save_calibration(const Calibration& cal, const std::string& path);
std::string default_calibration_path();

/// Benchmark values the calibration is fitted against (one reference
/// material/topology cell).
struct ReferenceTargets {
    std::string material = "Hiperco 50";
    TopologyKind topology = TopologyKind::VType;
    std::array<double, 9> natural_frequencies_hz{377.1, 1000.0, 1769.6, 2621.4, 3514.6,
                                                 4425.4, 5340.9, 6254.6, 7163.4};
    double torque_avg_nm = 121.59;
    double efficiency = 0.9527;
    double stress_avg_pa = 1.46e6;
    double displacement_m = 3.3e-7;
};

ReferenceTargets load_reference_targets(const std::string& path);
std::string default_reference_path();

/// Magnet source scale so the reference cell's average torque matches the
/// target. Secant iteration on the (monotone) torque-vs-scale map.
double fit_remanence_scale(const MotorGeometry& geom, const RotorTopology& topo,
                           const SoftMagneticMaterial& mat, const OperatingPoint& op,
                           double target_t_avg_nm, int profile_steps = 24);

/// Phase resistance absorbing the loss budget implied by the reference
/// efficiency, given the already-known core/magnet losses and output power.
double fit_phase_resistance(double p_out_w, double p_core_w, double p_magnet_w,
                            double i_rms_a, double target_efficiency);

/// Effective eccentricity placing the reference stress on target.
double fit_eccentricity(double mass_kg, double omega_rad_s, double rib_area_m2,
                        double ripple_force_n, double target_stress_pa);

/// Isotropic support stiffness placing the reference lateral displacement on
/// target (bisection on the below-resonance branch).
double fit_support_stiffness(double mass_kg, double eccentricity_m, double omega_rad_s,
                             int n_harmonics, double harmonic_decay, double target_x_m);

/// Run every fit against the reference cell and return the full calibration.
Calibration calibrate_all(const MachineDefinition& machine, const MaterialDb& db,
                          const ReferenceTargets& ref, int profile_steps = 24,
                          int n_harmonics = 5, double harmonic_decay = 0.1);

}  // namespace ipmtk
