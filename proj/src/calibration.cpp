#include "ipmtk/calibration.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "ipmtk/losses.hpp"

namespace ipmtk {

using nlohmann::json;

Calibration load_calibration(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open calibration file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": JSON parse error: " + e.what());
    }
    if (!j.contains("schema_version") || j["schema_version"].get<int>() != 1)
        throw ConfigError(path + ": missing or unknown schema_version (expected 1)");
    Calibration c;
    c.remanence_scale = j.value("remanence_scale", c.remanence_scale);
    c.eccentricity_m = j.value("eccentricity_m", c.eccentricity_m);
    c.ripple_force_coeff = j.value("ripple_force_coeff", c.ripple_force_coeff);
    c.support_stiffness_n_m = j.value("support_stiffness_n_m", c.support_stiffness_n_m);
    c.phase_resistance_ohm = j.value("phase_resistance_ohm", c.phase_resistance_ohm);
    c.magnet_loss_coeff = j.value("magnet_loss_coeff", c.magnet_loss_coeff);
    if (j.contains("mode_factors_hz_per_wave_speed")) {
        const auto& arr = j["mode_factors_hz_per_wave_speed"];
        if (!arr.is_array() || arr.size() != 9)
            throw ConfigError(path + ": mode_factors_hz_per_wave_speed must hold 9 values (modes 2-10)");
        for (std::size_t i = 0; i < 9; ++i) c.mode_factors.hz_per_wave_speed[i] = arr[i].get<double>();
        c.mode_factors.calibrated = true;
    }
    return c;
}

void save_calibration(const Calibration& cal, const std::string& path) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["remanence_scale"] = cal.remanence_scale;
    j["eccentricity_m"] = cal.eccentricity_m;
    j["ripple_force_coeff"] = cal.ripple_force_coeff;
    j["support_stiffness_n_m"] = cal.support_stiffness_n_m;
    j["phase_resistance_ohm"] = cal.phase_resistance_ohm;
    j["magnet_loss_coeff"] = cal.magnet_loss_coeff;
    if (cal.mode_factors.calibrated) {
        auto arr = nlohmann::ordered_json::array();
        for (double v : cal.mode_factors.hz_per_wave_speed) arr.push_back(v);
        j["mode_factors_hz_per_wave_speed"] = std::move(arr);
    }
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write calibration file: " + path);
    out << j.dump(2) << "\n";
}

std::string default_calibration_path() {
#ifdef IPMTK_DATA_DIR
    return std::string(IPMTK_DATA_DIR) + "/calibration.json";
#else
    return "data/calibration.json";
#endif
}

std::string default_reference_path() {
#ifdef IPMTK_DATA_DIR
    return std::string(IPMTK_DATA_DIR) + "/calibration_reference.json";
#else
    return "data/calibration_reference.json";
#endif
}

ReferenceTargets load_reference_targets(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open reference targets file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": JSON parse error: " + e.what());
    }
    if (!j.contains("schema_version") || j["schema_version"].get<int>() != 1)
        throw ConfigError(path + ": missing or unknown schema_version (expected 1)");
    ReferenceTargets r;
    r.material = j.value("material", r.material);
    if (j.contains("topology"))
        r.topology = j["topology"].get<std::string>() == "delta" ? TopologyKind::DeltaType
                                                                 : TopologyKind::VType;
    if (j.contains("natural_frequencies_hz")) {
        const auto& arr = j["natural_frequencies_hz"];
        if (!arr.is_array() || arr.size() != 9)
            throw ConfigError(path + ": natural_frequencies_hz must hold 9 values (modes 2-10)");
        for (std::size_t i = 0; i < 9; ++i) r.natural_frequencies_hz[i] = arr[i].get<double>();
    }
    r.torque_avg_nm = j.value("torque_avg_nm", r.torque_avg_nm);
    r.efficiency = j.value("efficiency", r.efficiency);
    r.stress_avg_pa = j.value("stress_avg_pa", r.stress_avg_pa);
    r.displacement_m = j.value("displacement_m", r.displacement_m);
    return r;
}

namespace {

double t_avg_at_scale(const MotorGeometry& geom, const RotorTopology& topo,
                      const SoftMagneticMaterial& mat, const OperatingPoint& op, double scale,
                      int steps) {
    NetworkOptions opts;
    opts.remanence_scale = scale;
    const DqParams dq = estimate_dq_params(geom, topo, mat, opts);
    OperatingPoint run = op;
    run.gamma_deg = mtpa_gamma_deg(dq, op.current_peak_a);
    const ProfileResult pr = torque_profile(geom, topo, mat, run, steps, opts);
    return metrics(pr.profile).t_avg_nm;
}

}  // namespace

double fit_remanence_scale(const MotorGeometry& geom, const RotorTopology& topo,
                           const SoftMagneticMaterial& mat, const OperatingPoint& op,
                           double target_t_avg_nm, int profile_steps) {
    if (!(target_t_avg_nm > 0)) throw ConfigError("fit_remanence_scale: target torque must be > 0");
    double s0 = 0.8, s1 = 1.2;
    double t0 = t_avg_at_scale(geom, topo, mat, op, s0, profile_steps);
    double t1 = t_avg_at_scale(geom, topo, mat, op, s1, profile_steps);
    for (int it = 0; it < 25; ++it) {
        if (std::abs(t1 - target_t_avg_nm) / target_t_avg_nm < 1e-4) return s1;
        const double denom = t1 - t0;
        double s2 = denom != 0 ? s1 + (target_t_avg_nm - t1) * (s1 - s0) / denom : s1 * 1.1;
        s2 = std::clamp(s2, 0.05, 5.0);
        s0 = s1;
        t0 = t1;
        s1 = s2;
        t1 = t_avg_at_scale(geom, topo, mat, op, s1, profile_steps);
    }
    throw ConfigError("fit_remanence_scale: no convergence to the torque target");
}

double fit_phase_resistance(double p_out_w, double p_core_w, double p_magnet_w,
                            double i_rms_a, double target_efficiency) {
    if (!(target_efficiency > 0 && target_efficiency < 1))
        throw ConfigError("fit_phase_resistance: target efficiency must be in (0, 1)");
    if (!(i_rms_a > 0)) throw ConfigError("fit_phase_resistance: current must be > 0");
    const double loss_budget = p_out_w * (1.0 / target_efficiency - 1.0);
    const double p_cu = loss_budget - p_core_w - p_magnet_w;
    if (p_cu <= 0)
        throw ConfigError("fit_phase_resistance: core and magnet losses already exceed the loss budget");
    return p_cu / (3.0 * i_rms_a * i_rms_a);
}

double fit_eccentricity(double mass_kg, double omega_rad_s, double rib_area_m2,
                        double ripple_force_n, double target_stress_pa) {
    if (!(mass_kg > 0) || !(omega_rad_s > 0) || !(rib_area_m2 > 0))
        throw ConfigError("fit_eccentricity: mass, speed and area must be > 0");
    const double f_needed = target_stress_pa * rib_area_m2 - ripple_force_n;
    if (f_needed <= 0)
        throw ConfigError("fit_eccentricity: ripple force alone exceeds the stress target");
    return f_needed / (mass_kg * omega_rad_s * omega_rad_s);
}

double fit_support_stiffness(double mass_kg, double eccentricity_m, double omega_rad_s,
                             int n_harmonics, double harmonic_decay, double target_x_m) {
    if (!(target_x_m > 0)) throw ConfigError("fit_support_stiffness: displacement target must be > 0");
    const double w_hi = n_harmonics * omega_rad_s;
    double lo = mass_kg * w_hi * w_hi * 1.2;  // above-resonance bound for every harmonic
    double hi = 1e18;
    auto x_of = [&](double k) {
        const LateralModel m =
            build_lateral_model(mass_kg, eccentricity_m, omega_rad_s, k, n_harmonics, harmonic_decay);
        return lateral_response(m).x_amplitude_m;
    };
    if (x_of(lo) < target_x_m)
        throw ConfigError("fit_support_stiffness: target displacement unreachable below resonance");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (x_of(mid) > target_x_m)
            lo = mid;
        else
            hi = mid;
        if ((hi - lo) / hi < 1e-12) break;
    }
    return 0.5 * (lo + hi);
}

Calibration calibrate_all(const MachineDefinition& machine, const MaterialDb& db,
                          const ReferenceTargets& ref, int profile_steps, int n_harmonics,
                          double harmonic_decay) {
    const MotorGeometry& geom = machine.geometry;
    const RotorTopology& topo = machine.topology(ref.topology);
    const SoftMagneticMaterial& mat = db.get(ref.material);

    Calibration cal;
    cal.mode_factors = fit_mode_factors(mat, ref.natural_frequencies_hz);

    OperatingPoint op;
    op.speed_rpm = geom.rated_speed_rpm;
    op.current_peak_a = geom.line_peak_current_a;
    cal.remanence_scale =
        fit_remanence_scale(geom, topo, mat, op, ref.torque_avg_nm, profile_steps);

    // Reference-cell electrical state at the fitted scale.
    NetworkOptions opts;
    opts.remanence_scale = cal.remanence_scale;
    const DqParams dq = estimate_dq_params(geom, topo, mat, opts);
    op.gamma_deg = mtpa_gamma_deg(dq, op.current_peak_a);
    const ProfileResult pr = torque_profile(geom, topo, mat, op, profile_steps, opts);
    const TorqueMetrics tm = metrics(pr.profile);

    const double omega = geom.mech_speed_rad_s(op.speed_rpm);
    const double f_e = electrical_frequency_hz(geom, op.speed_rpm);
    const double p_out = tm.t_avg_nm * omega;
    const double p_core = core_loss_w(geom, topo, mat, pr.peaks, f_e);
    const double p_mag = magnet_loss_w(f_e, topo.magnet_volume_m3(geom), cal.magnet_loss_coeff);
    const double i_rms = op.current_peak_a / std::sqrt(2.0);
    cal.phase_resistance_ohm = fit_phase_resistance(p_out, p_core, p_mag, i_rms, ref.efficiency);

    const double mass = rotor_mass_kg(geom, topo, mat.density_kg_m3, geom.magnet.density_kg_m3, 7850.0);
    const double rib_area = rib_section_area_m2(topo, geom);
    const double f_ripple = cal.ripple_force_coeff * tm.ripple_pct * tm.t_avg_nm /
                            geom.rotor_outer_radius_m();
    cal.eccentricity_m = fit_eccentricity(mass, omega, rib_area, f_ripple, ref.stress_avg_pa);

    cal.support_stiffness_n_m = fit_support_stiffness(mass, cal.eccentricity_m, omega, n_harmonics,
                                                      harmonic_decay, ref.displacement_m);
    return cal;
}

}  // namespace ipmtk
