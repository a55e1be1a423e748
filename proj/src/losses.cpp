#include "ipmtk/losses.hpp"

#include <cmath>

namespace ipmtk {

double electrical_frequency_hz(const MotorGeometry& geom, double speed_rpm) {
    return geom.pole_pairs() * speed_rpm / 60.0;
}

double copper_loss_w(double i_rms_a, double r_phase_ohm) {
    if (i_rms_a < 0 || r_phase_ohm < 0)
        throw std::domain_error("copper_loss: inputs must be >= 0");
    return 3.0 * i_rms_a * i_rms_a * r_phase_ohm;
}

double default_phase_resistance_ohm(const MotorGeometry& geom) {
    constexpr double rho_cu = 1.72e-8;  // ohm*m at 20 C
    const double r_mid = geom.stator_inner_radius_m() + 0.5 * geom.slot_depth_mm * 1e-3;
    const double slot_area = (2.0 * kPi * r_mid / geom.slots - geom.tooth_width_mm * 1e-3) *
                             geom.slot_depth_mm * 1e-3;
    const double cu_per_conductor = slot_area * geom.slot_fill_factor / geom.conductors_per_slot;
    const double half_turn = geom.stack_m() + geom.end_turn_allowance_mm * 1e-3;
    const int slots_per_phase = geom.slots / geom.phases;
    const int slots_per_path = slots_per_phase / geom.parallel_paths;
    const double path_length = slots_per_path * geom.conductors_per_slot * 2.0 * half_turn;
    const double r_path = rho_cu * path_length / cu_per_conductor;
    return r_path / geom.parallel_paths;
}

double core_loss_w(const MotorGeometry& geom, const RotorTopology& topo,
                   const SoftMagneticMaterial& mat, const RegionPeakFlux& peaks, double f_hz) {
    if (f_hz < 0) throw std::domain_error("core_loss: frequency must be >= 0");
    const double rho = mat.density_kg_m3;
    const double m_teeth = stator_tooth_volume_m3(geom) * rho;
    const double m_yoke = stator_yoke_volume_m3(geom) * rho;
    const double m_rotor = lamination_volume_m3(geom, topo) * rho;
    // Rotor iron sees mostly DC flux; only slotting pulsation contributes.
    constexpr double rotor_ac_fraction = 0.15;
    return m_teeth * core_loss_density(mat, peaks.stator_tooth_t, f_hz) +
           m_yoke * core_loss_density(mat, peaks.stator_yoke_t, f_hz) +
           m_rotor * core_loss_density(mat, rotor_ac_fraction * peaks.rotor_core_t, f_hz);
}

double magnet_loss_w(double f_hz, double magnet_volume_m3, double k_pm) {
    if (f_hz < 0 || magnet_volume_m3 < 0 || k_pm < 0)
        throw std::domain_error("magnet_loss: inputs must be >= 0");
    return k_pm * f_hz * f_hz * magnet_volume_m3;
}

double efficiency(const LossBreakdown& lb) {
    if (lb.p_core_w < 0 || lb.p_copper_w < 0 || lb.p_magnet_w < 0 || lb.p_out_w < 0)
        throw std::domain_error("efficiency: loss components must be >= 0");
    const double denom = lb.p_out_w + lb.p_core_w + lb.p_copper_w + lb.p_magnet_w;
    if (denom == 0.0) throw std::domain_error("efficiency: undefined for all-zero breakdown");
    return lb.p_out_w / denom;
}

}  // namespace ipmtk
