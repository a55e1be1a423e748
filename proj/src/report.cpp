#include "ipmtk/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace ipmtk {

namespace fs = std::filesystem;

ResultRow analyze_cell(const SweepConfig& cfg, const MaterialDb& db,
                       const std::string& material, TopologyKind topology) {
    const MotorGeometry& geom = cfg.machine.geometry;
    const RotorTopology& topo = cfg.machine.topology(topology);
    const SoftMagneticMaterial& mat = db.get(material);
    const Calibration& cal = cfg.calibration;

    ResultRow row;
    row.material = material;
    row.topology = topology;
    row.cost_tier = mat.cost_tier;

    NetworkOptions opts;
    opts.remanence_scale = cal.remanence_scale;

    // Electrical: MTPA operating point, loaded and cogging profiles.
    row.dq = estimate_dq_params(geom, topo, mat, opts);
    OperatingPoint op = cfg.operating_point;
    if (cfg.auto_gamma) op.gamma_deg = mtpa_gamma_deg(row.dq, op.current_peak_a);
    row.gamma_deg = op.gamma_deg;

    const ProfileResult load = torque_profile(geom, topo, mat, op, cfg.profile_steps, opts);
    row.profile = load.profile;
    row.peaks = load.peaks;
    row.stats = load.stats;
    row.torque = metrics(load.profile);

    const ProfileResult cog = cogging_profile(geom, topo, mat, cfg.cogging_steps, opts);
    const TorqueMetrics cm = metrics(cog.profile, ProfileKind::Cogging);
    row.torque.cogging_pp_nm = cm.cogging_pp_nm;
    row.cogging_dominant_order = dominant_order(cog.profile);
    row.stats.solves += cog.stats.solves;
    row.stats.max_iterations = std::max(row.stats.max_iterations, cog.stats.max_iterations);
    row.stats.max_residual = std::max(row.stats.max_residual, cog.stats.max_residual);

    // Losses and efficiency.
    const double omega = geom.mech_speed_rad_s(op.speed_rpm);
    const double f_e = electrical_frequency_hz(geom, op.speed_rpm);
    const double i_rms = op.current_peak_a / std::sqrt(2.0);
    const double r_phase = cal.phase_resistance_ohm > 0 ? cal.phase_resistance_ohm
                                                        : default_phase_resistance_ohm(geom);
    row.losses.p_out_w = row.torque.t_avg_nm * omega;
    row.losses.p_copper_w = copper_loss_w(i_rms, r_phase);
    row.losses.p_core_w = core_loss_w(geom, topo, mat, load.peaks, f_e);
    row.losses.p_magnet_w = magnet_loss_w(f_e, topo.magnet_volume_m3(geom), cal.magnet_loss_coeff);
    row.efficiency = efficiency(row.losses);

    // Mechanics.
    const double ecc = cfg.mechanics.eccentricity_m >= 0 ? cfg.mechanics.eccentricity_m
                                                         : cal.eccentricity_m;
    row.rotor_mass_kg = rotor_mass_kg(geom, topo, mat.density_kg_m3, geom.magnet.density_kg_m3,
                                      cfg.mechanics.shaft_density_kg_m3);
    const double f_unb = unbalance_force_n(row.rotor_mass_kg, ecc, omega);
    row.ripple_force_n = cal.ripple_force_coeff * row.torque.ripple_pct * row.torque.t_avg_nm /
                         geom.rotor_outer_radius_m();
    row.force_n = f_unb + row.ripple_force_n;
    row.stress_avg_pa = lamination_stress_pa(row.force_n, rib_section_area_m2(topo, geom));
    const StrainCheck sc = strain_check(row.stress_avg_pa, mat);
    row.strain = sc.strain;
    row.within_yield = sc.within_yield;

    const LateralModel lm = build_lateral_model(row.rotor_mass_kg, ecc, omega,
                                                cal.support_stiffness_n_m, cfg.mechanics.harmonics,
                                                cfg.mechanics.harmonic_decay);
    const LateralResponse lr = lateral_response(lm);
    row.displacement_x_m = lr.x_amplitude_m;
    row.displacement_y_m = lr.y_amplitude_m;

    row.natural_freq_hz = natural_frequencies_hz(mat, cal.mode_factors);
    const double f_rot = op.speed_rpm / 60.0;
    row.margins = resonance_margins(row.natural_freq_hz, {f_rot, geom.slots * f_rot});
    return row;
}

std::vector<ResultRow> run_sweep(const SweepConfig& cfg, const MaterialDb& db) {
    if (cfg.topologies.empty()) throw ConfigError("run_sweep: topology list is empty");
    std::vector<std::string> mats;
    if (cfg.materials.empty()) {
        mats = db.names();
    } else {
        for (const auto& m : cfg.materials)
            if (!db.contains(m)) throw ConfigError("run_sweep: material not in DB: " + m);
        // Deterministic ordering: DB order filtered by the requested set.
        for (const auto& name : db.names())
            if (std::find(cfg.materials.begin(), cfg.materials.end(), name) != cfg.materials.end())
                mats.push_back(name);
    }
    if (mats.empty()) throw ConfigError("run_sweep: material list is empty");

    struct Cell {
        std::string material;
        TopologyKind topo;
    };
    std::vector<Cell> cells;
    for (const auto& m : mats)
        for (TopologyKind t : cfg.topologies) cells.push_back({m, t});

    std::vector<ResultRow> rows(cells.size());
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t jobs = std::min<std::size_t>(
        cells.size(), cfg.jobs > 0 ? static_cast<std::size_t>(cfg.jobs) : hw);

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            try {
                rows[i] = analyze_cell(cfg, db, cells[i].material, cells[i].topo);
            } catch (const std::exception& e) {
                ResultRow r;
                r.material = cells[i].material;
                r.topology = cells[i].topo;
                r.failed = true;
                r.error = e.what();
                rows[i] = std::move(r);
            }
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return rows;
}

RankWeights RankWeights::equal() {
    RankWeights w;
    w.t_avg = w.ripple = w.efficiency = w.stress = w.displacement = w.mode2_freq = w.cost = 1.0;
    return w;
}

RankWeights RankWeights::electrical() {
    RankWeights w;
    w.t_avg = w.ripple = w.efficiency = 1.0;
    return w;
}

namespace {

struct Criterion {
    const char* name;
    double weight;
    bool higher_better;
    double (*value)(const ResultRow&);
};

double row_displacement(const ResultRow& r) {
    return std::max(r.displacement_x_m, r.displacement_y_m);
}

}  // namespace

std::vector<RankEntry> rank(std::vector<ResultRow>& rows, const RankWeights& weights) {
    if (rows.empty()) throw ConfigError("rank: no rows");
    const double wsum = weights.t_avg + weights.ripple + weights.efficiency + weights.stress +
                        weights.displacement + weights.mode2_freq + weights.cost;
    if (!(wsum > 0)) throw ConfigError("rank: weights must be >= 0 and not all zero");

    const Criterion criteria[] = {
        {"t_avg", weights.t_avg, true, [](const ResultRow& r) { return r.torque.t_avg_nm; }},
        {"ripple", weights.ripple, false, [](const ResultRow& r) { return r.torque.ripple_pct; }},
        {"efficiency", weights.efficiency, true, [](const ResultRow& r) { return r.efficiency; }},
        {"stress", weights.stress, false, [](const ResultRow& r) { return r.stress_avg_pa; }},
        {"displacement", weights.displacement, false, row_displacement},
        {"mode2_freq", weights.mode2_freq, true,
         [](const ResultRow& r) { return r.natural_freq_hz[0]; }},
        {"cost", weights.cost, false, [](const ResultRow& r) { return double(r.cost_tier); }},
    };

    std::vector<std::size_t> live;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (!rows[i].failed) live.push_back(i);

    for (const auto& c : criteria) {
        if (c.weight <= 0) continue;
        double lo = 1e300, hi = -1e300;
        for (std::size_t i : live) {
            const double v = c.value(rows[i]);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        for (std::size_t i : live) {
            double s = 1.0;  // degenerate range (single row or all equal)
            if (hi > lo) {
                const double v = c.value(rows[i]);
                s = c.higher_better ? (v - lo) / (hi - lo) : (hi - v) / (hi - lo);
            }
            rows[i].criterion_scores[c.name] = s;
        }
    }
    for (std::size_t i : live) {
        double total = 0;
        for (const auto& c : criteria)
            if (c.weight > 0) total += c.weight * rows[i].criterion_scores[c.name];
        rows[i].total_score = total / wsum;
    }

    std::vector<RankEntry> order;
    for (std::size_t i : live) order.push_back({i, rows[i].total_score});
    std::sort(order.begin(), order.end(), [&rows](const RankEntry& a, const RankEntry& b) {
        if (a.score != b.score) return a.score > b.score;
        const ResultRow& ra = rows[a.row_index];
        const ResultRow& rb = rows[b.row_index];
        if (ra.material != rb.material) return ra.material < rb.material;
        return static_cast<int>(ra.topology) < static_cast<int>(rb.topology);
    });
    return order;
}

std::string material_slug(const std::string& name) {
    std::string slug;
    for (char ch : name) {
        if (std::isalnum(static_cast<unsigned char>(ch)))
            slug.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        else if (!slug.empty() && slug.back() != '_')
            slug.push_back('_');
    }
    while (!slug.empty() && slug.back() == '_') slug.pop_back();
    return slug;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LoadError("emit: cannot write " + path.string());
    out << content;
    if (!out) throw LoadError("emit: write failed for " + path.string());
}

nlohmann::ordered_json row_json(const ResultRow& r) {
    nlohmann::ordered_json j;
    j["material"] = r.material;
    j["topology"] = to_string(r.topology);
    if (r.failed) {
        j["status"] = "failed";
        j["error"] = r.error;
        return j;
    }
    j["status"] = "ok";
    j["t_avg_nm"] = r.torque.t_avg_nm;
    j["t_max_nm"] = r.torque.t_max_nm;
    j["torque_ripple_pct"] = r.torque.ripple_pct;
    j["cogging_pp_nm"] = r.torque.cogging_pp_nm;
    j["cogging_dominant_order"] = r.cogging_dominant_order;
    j["gamma_deg"] = r.gamma_deg;
    j["dq"] = {{"l_d_h", r.dq.l_d_h}, {"l_q_h", r.dq.l_q_h}, {"psi_m_wb", r.dq.psi_m_wb},
               {"pole_pairs", r.dq.pole_pairs}};
    j["efficiency"] = r.efficiency;
    j["losses_w"] = {{"p_out", r.losses.p_out_w},
                     {"p_core", r.losses.p_core_w},
                     {"p_copper", r.losses.p_copper_w},
                     {"p_magnet", r.losses.p_magnet_w}};
    j["input_power_w"] =
        r.losses.p_out_w + r.losses.p_core_w + r.losses.p_copper_w + r.losses.p_magnet_w;
    j["rotor_mass_kg"] = r.rotor_mass_kg;
    j["force_n"] = r.force_n;
    j["ripple_force_n"] = r.ripple_force_n;
    j["stress_avg_pa"] = r.stress_avg_pa;
    j["strain"] = r.strain;
    j["within_yield"] = r.within_yield;
    j["displacement_x_m"] = r.displacement_x_m;
    j["displacement_y_m"] = r.displacement_y_m;
    auto nf = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < 9; ++i) nf[std::to_string(i + 2)] = r.natural_freq_hz[i];
    j["natural_frequencies_hz"] = std::move(nf);
    auto mg = nlohmann::ordered_json::array();
    for (const auto& m : r.margins)
        mg.push_back({{"mode", m.mode}, {"margin", m.margin}, {"flagged", m.flagged}});
    j["resonance_margins"] = std::move(mg);
    j["peak_flux_t"] = {{"stator_tooth", r.peaks.stator_tooth_t},
                        {"stator_yoke", r.peaks.stator_yoke_t},
                        {"rotor_core", r.peaks.rotor_core_t}};
    j["solver"] = {{"solves", r.stats.solves},
                   {"max_iterations", r.stats.max_iterations},
                   {"max_residual", r.stats.max_residual}};
    if (!r.criterion_scores.empty()) {
        j["scores"] = r.criterion_scores;
        j["total_score"] = r.total_score;
    }
    return j;
}

}  // namespace

std::vector<std::string> emit(const std::vector<ResultRow>& rows, OutputFormat format,
                              const std::string& out_dir, const MaterialDb& db) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw LoadError("emit: cannot create output directory " + out_dir + ": " + ec.message());
    if (!fs::is_directory(out_dir)) throw LoadError("emit: not a directory: " + out_dir);

    std::vector<std::string> written;
    const bool delimited = format != OutputFormat::Structured;
    const bool structured = format != OutputFormat::Delimited;

    if (delimited) {
        // Flat summary: one row per (material, topology).
        std::ostringstream s;
        s << "material,topology,avg_torque_nm,max_torque_nm,torque_ripple_pct,cogging_pp_nm,"
             "system_efficiency_pct,rotor_weight_kg,rls_avg_mpa,rld_avg_mm,f_mode2_hz,status\n";
        for (const auto& r : rows) {
            s << r.material << ',' << to_string(r.topology) << ',';
            if (r.failed) {
                s << ",,,,,,,,," << "failed: " << r.error << "\n";
                continue;
            }
            s << fmt(r.torque.t_avg_nm) << ',' << fmt(r.torque.t_max_nm) << ','
              << fmt(r.torque.ripple_pct) << ',' << fmt(r.torque.cogging_pp_nm) << ','
              << fmt(100.0 * r.efficiency) << ',' << fmt(r.rotor_mass_kg) << ','
              << fmt(r.stress_avg_pa / 1e6) << ','
              << fmt(std::max(r.displacement_x_m, r.displacement_y_m) * 1e3) << ','
              << fmt(r.natural_freq_hz[0]) << ",ok\n";
        }
        write_file(fs::path(out_dir) / "summary.csv", s.str());
        written.push_back("summary.csv");

        // Natural-frequency table: modes 2-10 as rows, materials as columns.
        std::vector<const ResultRow*> unique;
        for (const auto& r : rows) {
            if (r.failed) continue;
            bool seen = false;
            for (const auto* u : unique) seen = seen || u->material == r.material;
            if (!seen) unique.push_back(&r);
        }
        std::ostringstream nf;
        nf << "mode";
        for (const auto* u : unique) nf << ',' << u->material;
        nf << '\n';
        for (std::size_t m = 0; m < 9; ++m) {
            nf << (m + 2);
            for (const auto* u : unique) nf << ',' << fmt(u->natural_freq_hz[m]);
            nf << '\n';
        }
        write_file(fs::path(out_dir) / "natural_frequencies.csv", nf.str());
        written.push_back("natural_frequencies.csv");

        // Torque profile per row, plot-ready two-column text.
        fs::create_directories(fs::path(out_dir) / "profiles");
        for (const auto& r : rows) {
            if (r.failed) continue;
            std::ostringstream p;
            p << "# angle_deg torque_nm\n";
            for (std::size_t i = 0; i < r.profile.angles_deg.size(); ++i)
                p << fmt(r.profile.angles_deg[i]) << ' ' << fmt(r.profile.torque_nm[i]) << '\n';
            const std::string rel =
                "profiles/" + material_slug(r.material) + "__" + to_string(r.topology) + ".txt";
            write_file(fs::path(out_dir) / rel, p.str());
            written.push_back(rel);
        }

        // B-H curve dumps for every swept material present in the DB.
        fs::create_directories(fs::path(out_dir) / "curves");
        for (const auto* u : unique) {
            if (!db.contains(u->material)) continue;
            const auto& bh = db.get(u->material).bh;
            std::ostringstream c;
            c << "# H_A_per_m B_T\n";
            for (std::size_t i = 0; i < bh.size(); ++i)
                c << fmt(bh.h_samples()[i]) << ' ' << fmt(bh.b_samples()[i]) << '\n';
            const std::string rel = "curves/" + material_slug(u->material) + "_bh.txt";
            write_file(fs::path(out_dir) / rel, c.str());
            written.push_back(rel);
        }
    }

    if (structured) {
        nlohmann::ordered_json j;
        j["schema_version"] = 1;
        j["rows"] = nlohmann::ordered_json::array();
        for (const auto& r : rows) j["rows"].push_back(row_json(r));
        write_file(fs::path(out_dir) / "results.json", j.dump(2) + "\n");
        written.push_back("results.json");
    }

    // Checksum index over everything written above.
    std::sort(written.begin(), written.end());
    nlohmann::ordered_json idx;
    idx["schema_version"] = 1;
    idx["artifacts"] = nlohmann::ordered_json::array();
    for (const auto& rel : written) {
        std::ifstream in(fs::path(out_dir) / rel, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        const std::string data = ss.str();
        char hex[20];
        std::snprintf(hex, sizeof(hex), "%016llx",
                      static_cast<unsigned long long>(fnv1a64(data)));
        idx["artifacts"].push_back(
            {{"path", rel}, {"bytes", data.size()}, {"fnv1a64", std::string(hex)}});
    }
    write_file(fs::path(out_dir) / "index.json", idx.dump(2) + "\n");
    written.push_back("index.json");
    return written;
}

}  // namespace ipmtk
