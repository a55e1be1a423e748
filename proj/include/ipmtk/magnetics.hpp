#pragma once

#include <array>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "ipmtk/geometry.hpp"
#include "ipmtk/materials.hpp"

namespace ipmtk {

enum class BranchKind { Linear, Steel };

enum class Region { StatorTooth, StatorYoke, RotorCore, AirGap, Magnet };

/// One lumped flux path. Linear branches carry a constant permeance; steel
/// branches evaluate the lamination B-H curve from the MMF drop across them.
/// An MMF source aids flux in the from->to direction.
struct Branch {
    int from = 0;
    int to = 0;
    BranchKind kind = BranchKind::Linear;
    Region region = Region::AirGap;
    double area_m2 = 0;
    double length_m = 0;
    double permeance = 0;  // Wb/A-turn, linear branches only
    double mmf = 0;        // A-turns
    const BHCurve* curve = nullptr;  // steel branches only
};

struct ReluctanceNetwork {
    int node_count = 0;
    int reference_node = 0;
    std::vector<Branch> branches;
    // Owns the extended lamination curve the steel branches point at, so the
    // network (and its copies) stay self-contained.
    std::shared_ptr<const BHCurve> steel;
};

struct FluxSolution {
    Eigen::VectorXd node_potentials;   // A-turns, reference held at zero
    std::vector<double> branch_fluxes; // Wb
    int iterations = 0;
    double residual = 0;  // relative node flux imbalance
};

struct NetworkOptions {
    double remanence_scale = 1.0;
    double fringing = 1.05;
    // Replace the magnet/barrier rotor internals with solid laminated paths
    // (round-rotor fixture used for inductance checks).
    bool uniform_rotor = false;
};

/// Assemble the lumped network at one rotor position. Node layout: one node
/// per tooth tip, per yoke segment, per rotor pole piece, per rotor core
/// sector; winding MMF sources sit in the tooth branches, magnet sources in
/// the rotor branches, and air-gap permeances follow the tooth/pole-arc
/// overlap at rotor_angle.
ReluctanceNetwork build_network(const MotorGeometry& geom, const RotorTopology& topo,
                                const SoftMagneticMaterial& mat, double rotor_angle_deg,
                                const std::array<double, 3>& phase_currents_a,
                                const NetworkOptions& opts = {});

/// Damped Newton-Raphson on the nodal flux balance. Converges when the
/// largest node imbalance falls below 1e-9 of the largest branch flux.
FluxSolution solve(const ReluctanceNetwork& net, const Eigen::VectorXd* initial_guess = nullptr);

/// Total magnetic coenergy of the passive elements at the solved state (J).
double coenergy_j(const ReluctanceNetwork& net, const FluxSolution& sol);

struct TorqueProfile {
    std::vector<double> angles_deg;  // uniform grid
    std::vector<double> torque_nm;
    double window_deg = 0;           // grid covers [start, start + window)
};

struct RegionPeakFlux {
    double stator_tooth_t = 0;
    double stator_yoke_t = 0;
    double rotor_core_t = 0;
};

struct SolveStats {
    int solves = 0;
    int max_iterations = 0;
    double max_residual = 0;
};

struct ProfileResult {
    TorqueProfile profile;
    RegionPeakFlux peaks;
    SolveStats stats;
};

struct OperatingPoint {
    double speed_rpm = 3000.0;
    double current_peak_a = 300.0;
    double gamma_deg = 0.0;  // current advance from the q-axis
};

/// Mechanical angle (deg) of the phase-A MMF axis, from the fundamental
/// space harmonic of the winding pattern.
double phase_a_axis_deg(const MotorGeometry& geom);

/// Rotor angle that aligns the direct axis of pole 0 (a north pole) with the
/// phase-A axis. Resolved with one zero-current solve when magnets are
/// present; falls back to the winding axis for demagnetized fixtures.
double d_axis_alignment_deg(const MotorGeometry& geom, const RotorTopology& topo,
                            const SoftMagneticMaterial& mat, const NetworkOptions& opts = {});

/// Phase flux linkages (Wb) of the solved network.
std::array<double, 3> phase_flux_linkages(const MotorGeometry& geom, const ReluctanceNetwork& net,
                                          const FluxSolution& sol);

/// Loaded torque vs rotor angle over one torque period (360/poles deg) under
/// synchronous excitation at the operating point; torque by central coenergy
/// difference, harmonics attenuated by the skew factor.
ProfileResult torque_profile(const MotorGeometry& geom, const RotorTopology& topo,
                             const SoftMagneticMaterial& mat, const OperatingPoint& op,
                             int n_steps, const NetworkOptions& opts = {});

/// Magnet-only torque over the same window with zero phase currents.
ProfileResult cogging_profile(const MotorGeometry& geom, const RotorTopology& topo,
                              const SoftMagneticMaterial& mat, int n_steps,
                              const NetworkOptions& opts = {});

struct TorqueMetrics {
    double t_avg_nm = 0;
    double t_max_nm = 0;
    double ripple_pct = 0;
    double cogging_pp_nm = 0;
    bool degenerate = false;  // zero-mean profile, ripple undefined
};

enum class ProfileKind { Load, Cogging };

TorqueMetrics metrics(const TorqueProfile& profile, ProfileKind kind = ProfileKind::Load);

/// DFT of the profile treating the window as periodic; returns the dominant
/// harmonic order in cycles per mechanical revolution (DC excluded).
double dominant_order(const TorqueProfile& profile);

/// Attenuate profile harmonics by skew_factor(order); order 0 is untouched.
TorqueProfile apply_skew(const TorqueProfile& profile, const MotorGeometry& geom);

}  // namespace ipmtk
