#include "ipmtk/drive.hpp"

#include <cmath>

namespace ipmtk {

namespace {

double deg2rad(double d) { return d * kPi / 180.0; }

struct DqLinkage {
    double d, q;
};

// Solve the network with the given dq currents at the aligned rotor position
// and return the dq flux linkages.
DqLinkage dq_linkage(const MotorGeometry& geom, const RotorTopology& topo,
                     const SoftMagneticMaterial& mat, const NetworkOptions& opts,
                     double align_deg, double i_d, double i_q) {
    std::array<double, 3> currents{};
    // theta_e = 0 at the aligned position.
    for (int p = 0; p < 3; ++p) {
        const double th = -p * 2.0 * kPi / 3.0;
        currents[p] = i_d * std::cos(th) - i_q * std::sin(th);
    }
    const auto net = build_network(geom, topo, mat, align_deg, currents, opts);
    const auto sol = solve(net);
    const auto lam = phase_flux_linkages(geom, net, sol);
    DqLinkage out{0, 0};
    for (int p = 0; p < 3; ++p) {
        const double th = -p * 2.0 * kPi / 3.0;
        out.d += 2.0 / 3.0 * lam[p] * std::cos(th);
        out.q -= 2.0 / 3.0 * lam[p] * std::sin(th);
    }
    return out;
}

}  // namespace

DqParams estimate_dq_params(const MotorGeometry& geom, const RotorTopology& topo,
                            const SoftMagneticMaterial& mat, const NetworkOptions& opts,
                            double probe_current_a) {
    const double probe = probe_current_a > 0 ? probe_current_a : geom.line_peak_current_a;
    const double align = d_axis_alignment_deg(geom, topo, mat, opts);

    DqParams dq;
    dq.pole_pairs = geom.pole_pairs();
    const DqLinkage at_rest = dq_linkage(geom, topo, mat, opts, align, 0, 0);
    dq.psi_m_wb = at_rest.d;

    // Demagnetizing d probe (the MTPA operating side), magnetizing q probe.
    const DqLinkage d_probe = dq_linkage(geom, topo, mat, opts, align, -probe, 0);
    dq.l_d_h = (d_probe.d - dq.psi_m_wb) / -probe;

    const DqLinkage q_probe = dq_linkage(geom, topo, mat, opts, align, 0, probe);
    dq.l_q_h = q_probe.q / probe;
    return dq;
}

double mtpa_gamma_deg(const DqParams& dq, double i_peak_a) {
    if (!(i_peak_a > 0)) throw std::domain_error("mtpa_gamma: i_peak must be > 0");
    const double dl = dq.l_q_h - dq.l_d_h;
    if (dl == 0.0) return 0.0;
    if (dq.psi_m_wb == 0.0) return dl > 0 ? 45.0 : 0.0;
    const double psi = dq.psi_m_wb;
    const double s = (-psi + std::sqrt(psi * psi + 8.0 * dl * dl * i_peak_a * i_peak_a)) /
                     (4.0 * dl * i_peak_a);
    if (s <= 0.0) return 0.0;
    return std::asin(std::min(s, 1.0)) * 180.0 / kPi;
}

double dq_torque_nm(const DqParams& dq, double gamma_deg, double i_peak_a) {
    const double g = deg2rad(gamma_deg);
    const double i_d = -i_peak_a * std::sin(g);
    const double i_q = i_peak_a * std::cos(g);
    return 1.5 * dq.pole_pairs * (dq.psi_m_wb * i_q + (dq.l_d_h - dq.l_q_h) * i_d * i_q);
}

}  // namespace ipmtk
