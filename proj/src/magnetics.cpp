#include "ipmtk/magnetics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>

namespace ipmtk {

namespace {

double deg2rad(double d) { return d * kPi / 180.0; }

// Wrap an angle difference to [-pi, pi).
double wrap_pi(double a) {
    a = std::fmod(a + kPi, 2.0 * kPi);
    if (a < 0) a += 2.0 * kPi;
    return a - kPi;
}

// Steel constitutive law with a vacuum-slope continuation past the curve's
// extrapolation horizon, so transient Newton states cannot leave the domain.
double steel_b(const BHCurve& c, double h) {
    const double hm = c.h_domain_max();
    if (h <= hm) return c.b_at(h);
    return c.b_at(hm) + kMu0 * (h - hm);
}

double steel_slope(const BHCurve& c, double h) {
    const double hm = c.h_domain_max();
    if (h <= hm) return c.slope_at(h);
    return kMu0;
}

double steel_coenergy_density(const BHCurve& c, double h) {
    const double hm = c.h_domain_max();
    if (h <= hm) return c.coenergy_density(h);
    const double d = h - hm;
    return c.coenergy_density(hm) + c.b_at(hm) * d + 0.5 * kMu0 * d * d;
}

// Flux through a branch for a given total MMF (drop + source) across it.
double branch_flux(const Branch& b, double f_total) {
    if (b.kind == BranchKind::Linear) return b.permeance * f_total;
    const double h = f_total / b.length_m;
    const double s = h < 0 ? -1.0 : 1.0;
    return s * b.area_m2 * steel_b(*b.curve, std::abs(h));
}

double branch_conductance(const Branch& b, double f_total) {
    if (b.kind == BranchKind::Linear) return b.permeance;
    const double h = std::abs(f_total) / b.length_m;
    return b.area_m2 / b.length_m * steel_slope(*b.curve, h);
}

struct WindingLayout {
    // Per-tooth, per-phase MMF weights; tooth source = (Nc/a) * sum_p w[i][p] * i_p,
    // and by reciprocity phase linkage = (Nc/a) * sum_i w[i][p] * phi_tooth_i.
    std::vector<std::array<double, 3>> tooth_weights;
    double turns_factor = 0;  // Nc / parallel_paths
};

// 60-degree phase-belt single-layer lap winding: belts of width q per pole
// pair in the order A+ C- B+ A- C+ B-.
WindingLayout winding_layout(const MotorGeometry& geom) {
    const int S = geom.slots;
    const int q = S / (geom.poles * geom.phases);
    if (q < 1 || S != q * geom.poles * geom.phases)
        throw GeometryError("winding layout requires an integer number of slots per pole per phase");

    static constexpr int belt_phase[6] = {0, 2, 1, 0, 2, 1};
    static constexpr int belt_dir[6] = {1, -1, 1, -1, 1, -1};
    std::vector<std::array<double, 3>> slot_dir(S, {0, 0, 0});
    for (int s = 0; s < S; ++s) {
        const int belt = (s / q) % 6;
        slot_dir[s][belt_phase[belt]] = belt_dir[belt];
    }

    WindingLayout w;
    w.turns_factor = static_cast<double>(geom.conductors_per_slot) / geom.parallel_paths;
    w.tooth_weights.assign(S, {0, 0, 0});
    for (int p = 0; p < 3; ++p) {
        double run = 0, mean = 0;
        std::vector<double> t(S);
        for (int i = 0; i < S; ++i) {
            t[i] = run;                 // tooth i sits behind slot i
            run -= slot_dir[i][p];
            mean += t[i];
        }
        mean /= S;
        for (int i = 0; i < S; ++i) w.tooth_weights[i][p] = t[i] - mean;
    }
    return w;
}

struct NodeMap {
    int teeth0 = 0, yoke0 = 0, poles0 = 0, cores0 = 0, count = 0;
};

NodeMap node_map(const MotorGeometry& geom) {
    NodeMap m;
    m.teeth0 = 0;
    m.yoke0 = geom.slots;
    m.poles0 = 2 * geom.slots;
    m.cores0 = 2 * geom.slots + geom.poles;
    m.count = 2 * geom.slots + 2 * geom.poles;
    return m;
}

}  // namespace

double phase_a_axis_deg(const MotorGeometry& geom) {
    const WindingLayout w = winding_layout(geom);
    const int pp = geom.pole_pairs();
    std::complex<double> c(0, 0);
    for (int i = 0; i < geom.slots; ++i) {
        const double th = deg2rad((i + 0.5) * geom.slot_pitch_deg());
        c += w.tooth_weights[i][0] * std::exp(std::complex<double>(0, -pp * th));
    }
    double axis = -std::arg(c) / pp;  // radians, mech
    return axis * 180.0 / kPi;
}

ReluctanceNetwork build_network(const MotorGeometry& geom, const RotorTopology& topo,
                                const SoftMagneticMaterial& mat, double rotor_angle_deg,
                                const std::array<double, 3>& phase_currents_a,
                                const NetworkOptions& opts) {
    if (!std::isfinite(rotor_angle_deg)) throw std::domain_error("build_network: angle not finite");
    for (double i : phase_currents_a)
        if (!std::isfinite(i)) throw std::domain_error("build_network: currents must be finite");
    geom.validate();
    topo.validate();
    if (mat.bh.empty()) throw LoadError("build_network: material '" + mat.name + "' has no B-H curve");

    ReluctanceNetwork net;
    const NodeMap nm = node_map(geom);
    net.node_count = nm.count;
    net.reference_node = nm.cores0;

    // Steel branches all evaluate one extended copy of the lamination curve.
    auto steel = std::make_shared<BHCurve>(extrapolate_overflux(mat.bh, 1e7));
    net.steel = steel;
    const BHCurve* curve = steel.get();

    const int S = geom.slots;
    const int P = geom.poles;
    const double stack = geom.stack_m();
    const double kfe = geom.stacking_factor;
    const double slot_pitch = deg2rad(geom.slot_pitch_deg());
    const double pole_pitch = deg2rad(geom.pole_pitch_deg());
    const double r_gap = geom.gap_mid_radius_m();
    const double r_rotor = geom.rotor_outer_radius_m();

    const WindingLayout w = winding_layout(geom);

    // Stator teeth (tip -> yoke segment), winding MMF in series.
    const double tooth_area = geom.tooth_width_mm * 1e-3 * stack * kfe;
    const double tooth_len = geom.slot_depth_mm * 1e-3;
    for (int i = 0; i < S; ++i) {
        Branch b;
        b.from = nm.teeth0 + i;
        b.to = nm.yoke0 + i;
        b.kind = BranchKind::Steel;
        b.region = Region::StatorTooth;
        b.area_m2 = tooth_area;
        b.length_m = tooth_len;
        b.curve = curve;
        double mmf = 0;
        for (int p = 0; p < 3; ++p) mmf += w.tooth_weights[i][p] * phase_currents_a[p];
        b.mmf = w.turns_factor * mmf;
        net.branches.push_back(b);
    }

    // Stator yoke ring.
    const double r_slot_top = geom.stator_inner_radius_m() + geom.slot_depth_mm * 1e-3;
    const double yoke_h = geom.stator_outer_radius_m() - r_slot_top;
    const double yoke_area = yoke_h * stack * kfe;
    const double yoke_len = slot_pitch * 0.5 * (geom.stator_outer_radius_m() + r_slot_top);
    for (int i = 0; i < S; ++i) {
        Branch b;
        b.from = nm.yoke0 + i;
        b.to = nm.yoke0 + (i + 1) % S;
        b.kind = BranchKind::Steel;
        b.region = Region::StatorYoke;
        b.area_m2 = yoke_area;
        b.length_m = yoke_len;
        b.curve = curve;
        net.branches.push_back(b);
    }

    // Tooth-tip leakage across the slot openings.
    const double tip_depth = 0.002;
    const double slot_open = geom.slot_opening_mm * 1e-3;
    const double p_tip_leak = kMu0 * tip_depth * stack / slot_open;
    for (int i = 0; i < S; ++i) {
        Branch b;
        b.from = nm.teeth0 + i;
        b.to = nm.teeth0 + (i + 1) % S;
        b.kind = BranchKind::Linear;
        b.region = Region::AirGap;
        b.permeance = p_tip_leak;
        net.branches.push_back(b);
    }

    // Air gap: one branch per (tooth, pole) pair with arc overlap.
    const double tooth_half = 0.5 * (slot_pitch - slot_open / r_gap);
    const double arc_frac = opts.uniform_rotor ? 1.0 : topo.pole_arc_fraction;
    const double pole_half = 0.5 * arc_frac * pole_pitch;
    const double gap_scale = opts.fringing * kMu0 * r_gap * stack / geom.air_gap_m();
    for (int j = 0; j < P; ++j) {
        const double pole_c = deg2rad(rotor_angle_deg) + j * pole_pitch;
        for (int i = 0; i < S; ++i) {
            const double tooth_c = (i + 0.5) * slot_pitch;
            const double d = wrap_pi(tooth_c - pole_c);
            const double overlap =
                std::min(tooth_half, d + pole_half) - std::max(-tooth_half, d - pole_half);
            if (overlap <= 0) continue;
            Branch b;
            b.from = nm.teeth0 + i;
            b.to = nm.poles0 + j;
            b.kind = BranchKind::Linear;
            b.region = Region::AirGap;
            b.permeance = gap_scale * overlap;
            net.branches.push_back(b);
        }
    }

    // Rotor internals.
    const double mag_w = geom.magnet_width_mm * 1e-3;
    const double barrier_len = mag_w + 0.001;  // radial extent of pocket + clearance
    for (int j = 0; j < P; ++j) {
        const int pole = nm.poles0 + j;
        const int core = nm.cores0 + j;
        const double polarity = (j % 2 == 0) ? 1.0 : -1.0;

        if (opts.uniform_rotor) {
            Branch b;
            b.from = core;
            b.to = pole;
            b.kind = BranchKind::Steel;
            b.region = Region::RotorCore;
            b.area_m2 = arc_frac * pole_pitch * r_rotor * stack * kfe;
            b.length_m = barrier_len;
            b.curve = curve;
            net.branches.push_back(b);
        } else {
            // One branch per magnet layer: recoil permeance with the coercive
            // MMF as source.
            const double h_c = geom.magnet.remanence_t / (kMu0 * geom.magnet.recoil_mu_r);
            for (int l = 0; l < topo.magnet_layers; ++l) {
                Branch b;
                b.from = core;
                b.to = pole;
                b.kind = BranchKind::Linear;
                b.region = Region::Magnet;
                b.area_m2 = topo.layer_length_m(l) * stack;
                b.length_m = mag_w;
                b.permeance = geom.magnet.recoil_mu_r * kMu0 * b.area_m2 / mag_w;
                b.mmf = polarity * opts.remanence_scale * h_c * mag_w;
                net.branches.push_back(b);
            }
            // Saturating rib leakage in parallel with the magnets.
            Branch rib;
            rib.from = core;
            rib.to = pole;
            rib.kind = BranchKind::Steel;
            rib.region = Region::RotorCore;
            rib.area_m2 = topo.rib_width_mm * 1e-3 * stack * topo.magnet_layers * kfe;
            rib.length_m = barrier_len;
            rib.curve = curve;
            net.branches.push_back(rib);
        }

        // Inter-pole web: the q-axis channel between adjacent magnet groups.
        Branch web;
        web.from = pole;
        web.to = nm.poles0 + (j + 1) % P;
        web.kind = BranchKind::Steel;
        web.region = Region::RotorCore;
        web.area_m2 = 0.006 * stack * kfe;
        web.length_m = std::max((1.0 - arc_frac) * pole_pitch * r_rotor, 1e-4);
        web.curve = curve;
        net.branches.push_back(web);

        // Rotor core ring.
        Branch ring;
        ring.from = core;
        ring.to = nm.cores0 + (j + 1) % P;
        ring.kind = BranchKind::Steel;
        ring.region = Region::RotorCore;
        ring.area_m2 = (topo.magnet_center_radius_mm * 1e-3 - geom.shaft_radius_m()) * stack * kfe;
        ring.length_m = pole_pitch * 0.5 * (topo.magnet_center_radius_mm * 1e-3 + geom.shaft_radius_m());
        ring.curve = curve;
        net.branches.push_back(ring);
    }

    return net;
}

FluxSolution solve(const ReluctanceNetwork& net, const Eigen::VectorXd* initial_guess) {
    const int n = net.node_count;
    const int ref = net.reference_node;
    if (n < 2) throw StructureError("solve: network needs at least two nodes");
    const int m = n - 1;
    auto unknown = [ref](int node) { return node < ref ? node : node - 1; };

    for (const auto& b : net.branches) {
        if (b.from < 0 || b.from >= n || b.to < 0 || b.to >= n || b.from == b.to)
            throw StructureError("solve: branch endpoints out of range");
        if (b.kind == BranchKind::Steel && (b.curve == nullptr || b.area_m2 <= 0 || b.length_m <= 0))
            throw StructureError("solve: steel branch without curve or positive geometry");
        if (b.kind == BranchKind::Linear && !(b.permeance > 0))
            throw StructureError("solve: linear branch needs positive permeance");
    }

    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    if (initial_guess && initial_guess->size() == n) u = *initial_guess;
    u[ref] = 0;

    std::vector<double> flux(net.branches.size(), 0.0);

    auto eval = [&](const Eigen::VectorXd& pot, Eigen::VectorXd& r, std::vector<double>& phi) {
        r.setZero();
        double max_phi = 0;
        for (std::size_t k = 0; k < net.branches.size(); ++k) {
            const Branch& b = net.branches[k];
            const double f = pot[b.from] - pot[b.to] + b.mmf;
            const double p = branch_flux(b, f);
            phi[k] = p;
            max_phi = std::max(max_phi, std::abs(p));
            if (b.from != ref) r[unknown(b.from)] += p;
            if (b.to != ref) r[unknown(b.to)] -= p;
        }
        return max_phi;
    };

    Eigen::VectorXd r(m);
    double max_phi = eval(u, r, flux);
    double rnorm = r.lpNorm<Eigen::Infinity>();

    auto converged = [&](double rn, double mp) {
        if (mp == 0.0) return rn < 1e-18;
        return rn <= 1e-9 * mp;
    };

    int iters = 0;
    const int max_iters = 50;
    Eigen::MatrixXd jac(m, m);
    Eigen::VectorXd r_try(m);
    std::vector<double> flux_try(net.branches.size());

    while (!converged(rnorm, max_phi)) {
        if (iters >= max_iters)
            throw SolveError("solve: no convergence after " + std::to_string(max_iters) +
                                 " iterations (residual " + std::to_string(rnorm / std::max(max_phi, 1e-300)) + ")",
                             iters, max_phi > 0 ? rnorm / max_phi : rnorm);
        jac.setZero();
        for (const auto& b : net.branches) {
            const double f = u[b.from] - u[b.to] + b.mmf;
            const double g = branch_conductance(b, f);
            const int fi = b.from == ref ? -1 : unknown(b.from);
            const int ti = b.to == ref ? -1 : unknown(b.to);
            if (fi >= 0) jac(fi, fi) += g;
            if (ti >= 0) jac(ti, ti) += g;
            if (fi >= 0 && ti >= 0) {
                jac(fi, ti) -= g;
                jac(ti, fi) -= g;
            }
        }
        for (int i = 0; i < m; ++i)
            if (jac(i, i) == 0.0)
                throw StructureError("solve: node " + std::to_string(i < ref ? i : i + 1) +
                                     " has no incident branch (disconnected network)");

        Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
        Eigen::VectorXd step = lu.solve(-r);
        if (!step.allFinite()) throw StructureError("solve: singular Jacobian");

        // Backtrack while the residual grows.
        double lambda = 1.0;
        Eigen::VectorXd u_new(n);
        double rnorm_new = 0, max_phi_new = 0;
        for (int back = 0; back < 12; ++back) {
            u_new = u;
            for (int i = 0; i < m; ++i) u_new[i < ref ? i : i + 1] += lambda * step[i];
            max_phi_new = eval(u_new, r_try, flux_try);
            rnorm_new = r_try.lpNorm<Eigen::Infinity>();
            if (rnorm_new <= rnorm || lambda < 1.0 / 1024.0) break;
            lambda *= 0.5;
        }
        u = u_new;
        r = r_try;
        flux = flux_try;
        rnorm = rnorm_new;
        max_phi = max_phi_new;
        ++iters;
    }

    FluxSolution sol;
    sol.node_potentials = u;
    sol.branch_fluxes = flux;
    sol.iterations = iters;
    sol.residual = max_phi > 0 ? rnorm / max_phi : 0.0;
    return sol;
}

double coenergy_j(const ReluctanceNetwork& net, const FluxSolution& sol) {
    double w = 0;
    for (std::size_t k = 0; k < net.branches.size(); ++k) {
        const Branch& b = net.branches[k];
        const double f = sol.node_potentials[b.from] - sol.node_potentials[b.to] + b.mmf;
        if (b.kind == BranchKind::Linear) {
            // Passive drop across the permeance element.
            w += 0.5 * f * f * b.permeance;
        } else {
            const double h = std::abs(f) / b.length_m;
            w += b.area_m2 * b.length_m * steel_coenergy_density(*b.curve, h);
        }
    }
    return w;
}

std::array<double, 3> phase_flux_linkages(const MotorGeometry& geom, const ReluctanceNetwork& net,
                                          const FluxSolution& sol) {
    const WindingLayout w = winding_layout(geom);
    std::array<double, 3> lambda = {0, 0, 0};
    // Tooth branches are the first `slots` branches by construction.
    for (int i = 0; i < geom.slots; ++i) {
        const double phi = sol.branch_fluxes[static_cast<std::size_t>(i)];
        for (int p = 0; p < 3; ++p) lambda[p] += w.turns_factor * w.tooth_weights[i][p] * phi;
    }
    return lambda;
}

double d_axis_alignment_deg(const MotorGeometry& geom, const RotorTopology& topo,
                            const SoftMagneticMaterial& mat, const NetworkOptions& opts) {
    const double axis = phase_a_axis_deg(geom);
    if (opts.uniform_rotor || opts.remanence_scale == 0.0 || geom.magnet.remanence_t == 0.0)
        return axis;
    const auto net = build_network(geom, topo, mat, axis, {0, 0, 0}, opts);
    const auto sol = solve(net);
    const auto lambda = phase_flux_linkages(geom, net, sol);
    if (lambda[0] < 0) return axis + geom.pole_pitch_deg();
    return axis;
}

namespace {

void track_peaks(const ReluctanceNetwork& net, const FluxSolution& sol, RegionPeakFlux& peaks) {
    for (std::size_t k = 0; k < net.branches.size(); ++k) {
        const Branch& b = net.branches[k];
        if (b.area_m2 <= 0) continue;
        const double bt = std::abs(sol.branch_fluxes[k]) / b.area_m2;
        switch (b.region) {
            case Region::StatorTooth: peaks.stator_tooth_t = std::max(peaks.stator_tooth_t, bt); break;
            case Region::StatorYoke: peaks.stator_yoke_t = std::max(peaks.stator_yoke_t, bt); break;
            case Region::RotorCore: peaks.rotor_core_t = std::max(peaks.rotor_core_t, bt); break;
            default: break;
        }
    }
}

std::array<double, 3> synchronous_currents(const MotorGeometry& geom, const OperatingPoint& op,
                                           double theta_e_rad) {
    const double g = deg2rad(op.gamma_deg);
    const double id = -op.current_peak_a * std::sin(g);
    const double iq = op.current_peak_a * std::cos(g);
    std::array<double, 3> i{};
    for (int p = 0; p < 3; ++p) {
        const double th = theta_e_rad - p * 2.0 * kPi / 3.0;
        i[p] = id * std::cos(th) - iq * std::sin(th);
    }
    return i;
}

}  // namespace

ProfileResult torque_profile(const MotorGeometry& geom, const RotorTopology& topo,
                             const SoftMagneticMaterial& mat, const OperatingPoint& op,
                             int n_steps, const NetworkOptions& opts) {
    const double window = geom.pole_pitch_deg();
    if (n_steps < 2 || n_steps * cogging_period_deg(geom) < 2.0 * window)
        throw std::domain_error("torque_profile: need at least 2 steps per cogging period");
    if (!(op.current_peak_a >= 0) || !(op.speed_rpm >= 0))
        throw std::domain_error("torque_profile: invalid operating point");

    const double align = d_axis_alignment_deg(geom, topo, mat, opts);
    const double h = window / n_steps;
    const double dtheta = deg2rad(0.5 * h);  // coenergy step = half the grid step
    const int pp = geom.pole_pairs();

    ProfileResult out;
    out.profile.window_deg = window;
    out.profile.angles_deg.resize(n_steps);
    out.profile.torque_nm.resize(n_steps);

    Eigen::VectorXd guess;
    bool have_guess = false;
    for (int s = 0; s < n_steps; ++s) {
        const double rel = s * h;
        const double theta = align + rel;
        const auto currents = synchronous_currents(geom, op, deg2rad(pp * rel));

        double w2[2];
        for (int side = 0; side < 2; ++side) {
            const double th = theta + (side == 0 ? -0.5 * h : 0.5 * h);
            const auto net = build_network(geom, topo, mat, th, currents, opts);
            const auto sol = solve(net, have_guess ? &guess : nullptr);
            guess = sol.node_potentials;
            have_guess = true;
            w2[side] = coenergy_j(net, sol);
            track_peaks(net, sol, out.peaks);
            out.stats.solves++;
            out.stats.max_iterations = std::max(out.stats.max_iterations, sol.iterations);
            out.stats.max_residual = std::max(out.stats.max_residual, sol.residual);
        }
        out.profile.angles_deg[s] = rel;
        out.profile.torque_nm[s] = (w2[1] - w2[0]) / (2.0 * dtheta);
    }
    out.profile = apply_skew(out.profile, geom);
    return out;
}

ProfileResult cogging_profile(const MotorGeometry& geom, const RotorTopology& topo,
                              const SoftMagneticMaterial& mat, int n_steps,
                              const NetworkOptions& opts) {
    const double window = geom.pole_pitch_deg();
    if (n_steps < 2 || n_steps * cogging_period_deg(geom) < 2.0 * window)
        throw std::domain_error("cogging_profile: need at least 2 steps per cogging period");

    const double align = d_axis_alignment_deg(geom, topo, mat, opts);
    const double h = window / n_steps;
    const double dtheta = deg2rad(h);

    // Zero currents: coenergy on the staggered midpoint grid is shared by
    // neighboring torque samples.
    std::vector<double> w(static_cast<std::size_t>(n_steps) + 1);
    ProfileResult out;
    Eigen::VectorXd guess;
    bool have_guess = false;
    for (int s = 0; s <= n_steps; ++s) {
        const double th = align + (s - 0.5) * h;
        const auto net = build_network(geom, topo, mat, th, {0, 0, 0}, opts);
        const auto sol = solve(net, have_guess ? &guess : nullptr);
        guess = sol.node_potentials;
        have_guess = true;
        w[static_cast<std::size_t>(s)] = coenergy_j(net, sol);
        track_peaks(net, sol, out.peaks);
        out.stats.solves++;
        out.stats.max_iterations = std::max(out.stats.max_iterations, sol.iterations);
        out.stats.max_residual = std::max(out.stats.max_residual, sol.residual);
    }

    out.profile.window_deg = window;
    out.profile.angles_deg.resize(n_steps);
    out.profile.torque_nm.resize(n_steps);
    for (int s = 0; s < n_steps; ++s) {
        out.profile.angles_deg[s] = s * h;
        out.profile.torque_nm[s] =
            (w[static_cast<std::size_t>(s) + 1] - w[static_cast<std::size_t>(s)]) / dtheta;
    }
    out.profile = apply_skew(out.profile, geom);
    return out;
}

TorqueMetrics metrics(const TorqueProfile& profile, ProfileKind kind) {
    if (profile.torque_nm.empty()) throw std::domain_error("metrics: empty profile");
    TorqueMetrics m;
    double sum = 0, mx = -1e300, mn = 1e300;
    for (double t : profile.torque_nm) {
        sum += t;
        mx = std::max(mx, t);
        mn = std::min(mn, t);
    }
    m.t_avg_nm = sum / static_cast<double>(profile.torque_nm.size());
    m.t_max_nm = mx;
    if (kind == ProfileKind::Cogging) {
        m.cogging_pp_nm = mx - mn;
        m.ripple_pct = 0;
        m.degenerate = true;
        return m;
    }
    if (m.t_avg_nm != 0.0) {
        m.ripple_pct = 100.0 * (mx - mn) / m.t_avg_nm;
    } else {
        m.ripple_pct = 0;
        m.degenerate = true;
    }
    return m;
}

namespace {

struct Spectrum {
    std::vector<double> a, b;  // cosine/sine coefficients, k = 0..n/2
};

Spectrum dft(const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    Spectrum s;
    const int kmax = n / 2;
    s.a.assign(kmax + 1, 0.0);
    s.b.assign(kmax + 1, 0.0);
    for (int k = 0; k <= kmax; ++k) {
        double ca = 0, cb = 0;
        for (int i = 0; i < n; ++i) {
            const double ph = 2.0 * kPi * k * i / n;
            ca += x[i] * std::cos(ph);
            cb += x[i] * std::sin(ph);
        }
        const bool shared = (k == 0) || (2 * k == n);
        s.a[k] = (shared ? 1.0 : 2.0) * ca / n;
        s.b[k] = (shared ? 1.0 : 2.0) * cb / n;
    }
    return s;
}

}  // namespace

double dominant_order(const TorqueProfile& profile) {
    if (profile.torque_nm.size() < 2) throw std::domain_error("dominant_order: profile too short");
    const Spectrum s = dft(profile.torque_nm);
    const double orders_per_k = 360.0 / profile.window_deg;
    int best = 1;
    double best_mag = -1;
    for (int k = 1; k < static_cast<int>(s.a.size()); ++k) {
        const double mag = std::hypot(s.a[static_cast<std::size_t>(k)], s.b[static_cast<std::size_t>(k)]);
        if (mag > best_mag) {
            best_mag = mag;
            best = k;
        }
    }
    return best * orders_per_k;
}

TorqueProfile apply_skew(const TorqueProfile& profile, const MotorGeometry& geom) {
    const int n = static_cast<int>(profile.torque_nm.size());
    if (n < 2 || geom.skew_fraction == 0.0) return profile;
    const Spectrum s = dft(profile.torque_nm);
    const double orders_per_k = 360.0 / profile.window_deg;
    TorqueProfile out = profile;
    for (int i = 0; i < n; ++i) {
        double v = s.a[0];
        for (int k = 1; k < static_cast<int>(s.a.size()); ++k) {
            const double att = skew_factor(geom, k * orders_per_k);
            const double ph = 2.0 * kPi * k * i / n;
            v += att * (s.a[static_cast<std::size_t>(k)] * std::cos(ph) +
                        s.b[static_cast<std::size_t>(k)] * std::sin(ph));
        }
        out.torque_nm[static_cast<std::size_t>(i)] = v;
    }
    return out;
}

}  // namespace ipmtk
