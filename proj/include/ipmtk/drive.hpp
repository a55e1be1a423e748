#pragma once

#include "ipmtk/magnetics.hpp"

namespace ipmtk {

struct DqParams {
    double l_d_h = 0;     // d-axis inductance, H
    double l_q_h = 0;     // q-axis inductance, H
    double psi_m_wb = 0;  // magnet flux linkage, Wb
    int pole_pairs = 0;
};

/// Secant dq parameters from three magnetostatic solves: zero current for
/// psi_m, then pure d- and pure q-axis excitation at probe_current (defaults
/// to the rated line peak).
DqParams estimate_dq_params(const MotorGeometry& geom, const RotorTopology& topo,
                            const SoftMagneticMaterial& mat, const NetworkOptions& opts = {},
                            double probe_current_a = 0.0);

/// Current advance angle (deg from the q-axis) maximizing torque per ampere.
/// Closed form; 0 when l_d = l_q, 45 when psi_m = 0.
double mtpa_gamma_deg(const DqParams& dq, double i_peak_a);

/// T = (3/2) p (psi_m i_q + (l_d - l_q) i_d i_q) with i_d = -I sin(gamma),
/// i_q = I cos(gamma).
double dq_torque_nm(const DqParams& dq, double gamma_deg, double i_peak_a);

}  // namespace ipmtk
