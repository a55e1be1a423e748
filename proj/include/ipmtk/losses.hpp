#pragma once

#include "ipmtk/magnetics.hpp"

namespace ipmtk {

struct LossBreakdown {
    double p_core_w = 0;
    double p_copper_w = 0;
    double p_magnet_w = 0;
    double p_out_w = 0;
};

double electrical_frequency_hz(const MotorGeometry& geom, double speed_rpm);

/// Three-phase ohmic loss 3 * I_rms^2 * R_phase (W).
double copper_loss_w(double i_rms_a, double r_phase_ohm);

/// Per-phase resistance from slot fill, conductor count, stack length and the
/// end-turn allowance. Calibration normally overrides this estimate.
double default_phase_resistance_ohm(const MotorGeometry& geom);

/// Steinmetz loss per region (teeth, yoke, rotor core) from the peak flux
/// densities of a solved sweep, times the region iron masses (W).
double core_loss_w(const MotorGeometry& geom, const RotorTopology& topo,
                   const SoftMagneticMaterial& mat, const RegionPeakFlux& peaks, double f_hz);

/// Magnet eddy-loss proxy k_pm * f^2 * V_magnet (W).
double magnet_loss_w(double f_hz, double magnet_volume_m3, double k_pm = 35.0);

/// p_out / (p_out + p_core + p_copper + p_magnet). Throws on all-zero input.
double efficiency(const LossBreakdown& lb);

}  // namespace ipmtk
