#include "ipmtk/geometry.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace ipmtk {

void MotorGeometry::validate() const {
    if (poles <= 0 || poles % 2 != 0) throw GeometryError("poles must be even and > 0");
    if (slots <= 0) throw GeometryError("slots must be > 0");
    if (phases <= 0) throw GeometryError("phases must be > 0");
    const double lengths[] = {stator_outer_diameter_mm, stator_inner_diameter_mm, slot_depth_mm,
                              tooth_width_mm, stack_length_mm, air_gap_mm, magnet_width_mm,
                              shaft_diameter_mm};
    for (double v : lengths)
        if (!(v > 0)) throw GeometryError("all lengths must be > 0");
    if (air_gap_mm >= stator_inner_diameter_mm / 10.0)
        throw GeometryError("air gap implausibly large for the bore");
    if (stator_inner_diameter_mm >= stator_outer_diameter_mm)
        throw GeometryError("stator inner diameter must be below the outer diameter");
    if (parallel_paths <= 0 || winding_layers <= 0 || conductors_per_slot <= 0)
        throw GeometryError("winding counts must be > 0");
    if (skew_fraction < 0) throw GeometryError("skew_fraction must be >= 0");
}

std::string to_string(TopologyKind kind) {
    return kind == TopologyKind::VType ? "v" : "delta";
}

RotorTopology RotorTopology::v_type() {
    RotorTopology t;
    t.kind = TopologyKind::VType;
    t.magnet_layers = 1;
    t.magnet_segment_lengths_mm = {{28.0, 28.0}};
    t.barrier_volume_per_pole_mm3 = 53400.0;
    t.pole_arc_fraction = 0.78;
    return t;
}

RotorTopology RotorTopology::delta_type() {
    RotorTopology t;
    t.kind = TopologyKind::DeltaType;
    t.magnet_layers = 2;
    t.magnet_segment_lengths_mm = {{24.0, 24.0}, {32.0}};
    t.barrier_volume_per_pole_mm3 = 56950.0;
    t.pole_arc_fraction = 0.80;
    return t;
}

void RotorTopology::validate() const {
    const int expected = kind == TopologyKind::VType ? 1 : 2;
    if (magnet_layers != expected)
        throw GeometryError(to_string(kind) + "-type rotor must have " +
                            std::to_string(expected) + " magnet layer(s)");
    if (static_cast<int>(magnet_segment_lengths_mm.size()) != magnet_layers)
        throw GeometryError("magnet_segment_lengths_mm must list one group per layer");
    if (!(rib_width_mm > 0)) throw GeometryError("rib_width must be > 0");
    if (!(pole_arc_fraction > 0 && pole_arc_fraction <= 1))
        throw GeometryError("pole_arc_fraction must be in (0, 1]");
    for (const auto& layer : magnet_segment_lengths_mm)
        for (double len : layer)
            if (!(len > 0)) throw GeometryError("magnet segment lengths must be > 0");
}

double RotorTopology::layer_length_m(int layer) const {
    const auto& segs = magnet_segment_lengths_mm.at(static_cast<std::size_t>(layer));
    return std::accumulate(segs.begin(), segs.end(), 0.0) * 1e-3;
}

double RotorTopology::magnet_volume_layer_m3(const MotorGeometry& geom, int layer) const {
    return layer_length_m(layer) * geom.magnet_width_mm * 1e-3 * geom.stack_m() * geom.poles;
}

double RotorTopology::magnet_volume_m3(const MotorGeometry& geom) const {
    double v = 0;
    for (int l = 0; l < magnet_layers; ++l) v += magnet_volume_layer_m3(geom, l);
    return v;
}

double cogging_period_deg(const MotorGeometry& geom) {
    if (geom.slots <= 0 || geom.poles <= 0)
        throw GeometryError("cogging_period: slots and poles must be > 0");
    const long long l = std::lcm<long long>(geom.slots, geom.poles);
    return 360.0 / static_cast<double>(l);
}

double skew_factor(const MotorGeometry& geom, double harmonic) {
    if (harmonic < 0) throw std::domain_error("skew_factor: harmonic must be >= 0");
    const double gamma = geom.skew_fraction * (2.0 * kPi / geom.slots);  // mech rad
    const double x = 0.5 * harmonic * gamma;
    if (x == 0.0) return 1.0;
    return std::sin(x) / x;
}

double lamination_volume_m3(const MotorGeometry& geom, const RotorTopology& topo) {
    const double r_o = geom.rotor_outer_radius_m();
    const double r_sh = geom.shaft_radius_m();
    const double annulus = kPi * (r_o * r_o - r_sh * r_sh) * geom.stack_m();
    const double pockets = topo.magnet_volume_m3(geom);
    const double barriers = topo.barrier_volume_per_pole_mm3 * 1e-9 * geom.poles;
    const double v = annulus - pockets - barriers;
    if (v <= 0)
        throw GeometryError("lamination volume is non-positive: pockets and barriers exceed the rotor annulus");
    return v;
}

double rotor_mass_kg(const MotorGeometry& geom, const RotorTopology& topo,
                     double lamination_density, double magnet_density, double shaft_density) {
    if (lamination_density < 0 || magnet_density < 0 || shaft_density < 0)
        throw GeometryError("densities must be >= 0");
    return lamination_volume_m3(geom, topo) * lamination_density +
           topo.magnet_volume_m3(geom) * magnet_density +
           shaft_volume_m3(geom) * shaft_density;
}

int rib_count(const RotorTopology& topo, const MotorGeometry& geom) {
    // One load-bearing rib per pole per magnet layer.
    return geom.poles * topo.magnet_layers;
}

double rib_section_area_m2(const RotorTopology& topo, const MotorGeometry& geom) {
    if (!(topo.rib_width_mm > 0)) throw GeometryError("rib_width must be > 0");
    return topo.rib_width_mm * 1e-3 * geom.stack_m() * rib_count(topo, geom);
}

double stator_tooth_volume_m3(const MotorGeometry& geom) {
    return geom.slots * geom.tooth_width_mm * 1e-3 * geom.slot_depth_mm * 1e-3 * geom.stack_m() *
           geom.stacking_factor;
}

double stator_yoke_volume_m3(const MotorGeometry& geom) {
    const double r_slot_top = geom.stator_inner_radius_m() + geom.slot_depth_mm * 1e-3;
    const double r_out = geom.stator_outer_radius_m();
    if (r_slot_top >= r_out) throw GeometryError("slot depth reaches past the stator yoke");
    return kPi * (r_out * r_out - r_slot_top * r_slot_top) * geom.stack_m() * geom.stacking_factor;
}

double shaft_volume_m3(const MotorGeometry& geom) {
    const double r = geom.shaft_radius_m();
    return kPi * r * r * geom.stack_m();
}

namespace {

using nlohmann::json;

double num_or(const json& j, const char* key, double fallback) {
    if (j.contains(key)) {
        if (!j[key].is_number()) throw LoadError(std::string("machine file: field '") + key + "' must be numeric");
        return j[key].get<double>();
    }
    return fallback;
}

int int_or(const json& j, const char* key, int fallback) {
    if (j.contains(key)) {
        if (!j[key].is_number_integer()) throw LoadError(std::string("machine file: field '") + key + "' must be an integer");
        return j[key].get<int>();
    }
    return fallback;
}

MotorGeometry parse_geometry(const json& j) {
    MotorGeometry g;
    g.phases = int_or(j, "phases", g.phases);
    g.poles = int_or(j, "poles", g.poles);
    g.slots = int_or(j, "slots", g.slots);
    g.rated_speed_rpm = num_or(j, "rated_speed_rpm", g.rated_speed_rpm);
    g.line_peak_current_a = num_or(j, "line_peak_current_a", g.line_peak_current_a);
    g.winding_layers = int_or(j, "winding_layers", g.winding_layers);
    g.parallel_paths = int_or(j, "parallel_paths", g.parallel_paths);
    g.stator_outer_diameter_mm = num_or(j, "stator_outer_diameter_mm", g.stator_outer_diameter_mm);
    g.stator_inner_diameter_mm = num_or(j, "stator_inner_diameter_mm", g.stator_inner_diameter_mm);
    g.slot_depth_mm = num_or(j, "slot_depth_mm", g.slot_depth_mm);
    g.tooth_width_mm = num_or(j, "tooth_width_mm", g.tooth_width_mm);
    g.stack_length_mm = num_or(j, "stack_length_mm", g.stack_length_mm);
    g.air_gap_mm = num_or(j, "air_gap_mm", g.air_gap_mm);
    g.magnet_width_mm = num_or(j, "magnet_width_mm", g.magnet_width_mm);
    if (j.contains("magnet_grade")) g.magnet_grade = j["magnet_grade"].get<std::string>();
    g.skew_fraction = num_or(j, "skew_fraction", g.skew_fraction);
    g.shaft_diameter_mm = num_or(j, "shaft_diameter_mm", g.shaft_diameter_mm);
    g.slot_opening_mm = num_or(j, "slot_opening_mm", g.slot_opening_mm);
    g.stacking_factor = num_or(j, "stacking_factor", g.stacking_factor);
    g.conductors_per_slot = int_or(j, "conductors_per_slot", g.conductors_per_slot);
    g.slot_fill_factor = num_or(j, "slot_fill_factor", g.slot_fill_factor);
    g.end_turn_allowance_mm = num_or(j, "end_turn_allowance_mm", g.end_turn_allowance_mm);
    if (j.contains("magnet")) {
        const json& m = j["magnet"];
        if (m.contains("grade")) g.magnet.grade = m["grade"].get<std::string>();
        g.magnet.remanence_t = num_or(m, "remanence_t", g.magnet.remanence_t);
        g.magnet.recoil_mu_r = num_or(m, "relative_recoil_permeability", g.magnet.recoil_mu_r);
        g.magnet.density_kg_m3 = num_or(m, "density_kg_m3", g.magnet.density_kg_m3);
    }
    g.validate();
    return g;
}

RotorTopology parse_topology(const json& j, const RotorTopology& base) {
    RotorTopology t = base;
    if (j.contains("kind")) {
        const std::string k = j["kind"].get<std::string>();
        if (k == "v")
            t.kind = TopologyKind::VType;
        else if (k == "delta")
            t.kind = TopologyKind::DeltaType;
        else
            throw LoadError("machine file: topology kind must be 'v' or 'delta'");
    }
    t.v_angle_deg = num_or(j, "v_angle_deg", t.v_angle_deg);
    t.rib_width_mm = num_or(j, "rib_width_mm", t.rib_width_mm);
    t.magnet_center_radius_mm = num_or(j, "magnet_center_radius_mm", t.magnet_center_radius_mm);
    t.barrier_volume_per_pole_mm3 = num_or(j, "barrier_volume_per_pole_mm3", t.barrier_volume_per_pole_mm3);
    t.pole_arc_fraction = num_or(j, "pole_arc_fraction", t.pole_arc_fraction);
    if (j.contains("magnet_segment_lengths_mm")) {
        t.magnet_segment_lengths_mm.clear();
        for (const auto& layer : j["magnet_segment_lengths_mm"]) {
            std::vector<double> segs;
            for (const auto& s : layer) segs.push_back(s.get<double>());
            t.magnet_segment_lengths_mm.push_back(std::move(segs));
        }
        t.magnet_layers = static_cast<int>(t.magnet_segment_lengths_mm.size());
    }
    t.validate();
    return t;
}

}  // namespace

MachineDefinition default_machine() {
    MachineDefinition def;
    def.v = RotorTopology::v_type();
    def.delta = RotorTopology::delta_type();
    return def;
}

MachineDefinition load_machine_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open machine file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw LoadError(path + ": JSON parse error: " + e.what());
    }
    if (!j.contains("schema_version") || j["schema_version"].get<int>() != 1)
        throw LoadError(path + ": missing or unknown schema_version (expected 1)");

    MachineDefinition def = default_machine();
    if (j.contains("machine")) def.geometry = parse_geometry(j["machine"]);
    if (j.contains("topologies")) {
        const json& t = j["topologies"];
        if (t.contains("v")) def.v = parse_topology(t["v"], RotorTopology::v_type());
        if (t.contains("delta")) def.delta = parse_topology(t["delta"], RotorTopology::delta_type());
    }
    return def;
}

void save_machine_file(const MachineDefinition& def, const std::string& path) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    const MotorGeometry& g = def.geometry;
    nlohmann::ordered_json m;
    m["phases"] = g.phases;
    m["poles"] = g.poles;
    m["slots"] = g.slots;
    m["rated_speed_rpm"] = g.rated_speed_rpm;
    m["line_peak_current_a"] = g.line_peak_current_a;
    m["winding_layers"] = g.winding_layers;
    m["parallel_paths"] = g.parallel_paths;
    m["stator_outer_diameter_mm"] = g.stator_outer_diameter_mm;
    m["stator_inner_diameter_mm"] = g.stator_inner_diameter_mm;
    m["slot_depth_mm"] = g.slot_depth_mm;
    m["tooth_width_mm"] = g.tooth_width_mm;
    m["stack_length_mm"] = g.stack_length_mm;
    m["air_gap_mm"] = g.air_gap_mm;
    m["magnet_width_mm"] = g.magnet_width_mm;
    m["magnet_grade"] = g.magnet_grade;
    m["skew_fraction"] = g.skew_fraction;
    m["shaft_diameter_mm"] = g.shaft_diameter_mm;
    m["slot_opening_mm"] = g.slot_opening_mm;
    m["stacking_factor"] = g.stacking_factor;
    m["conductors_per_slot"] = g.conductors_per_slot;
    m["slot_fill_factor"] = g.slot_fill_factor;
    m["end_turn_allowance_mm"] = g.end_turn_allowance_mm;
    nlohmann::ordered_json mg;
    mg["grade"] = g.magnet.grade;
    mg["remanence_t"] = g.magnet.remanence_t;
    mg["relative_recoil_permeability"] = g.magnet.recoil_mu_r;
    mg["density_kg_m3"] = g.magnet.density_kg_m3;
    m["magnet"] = std::move(mg);
    j["machine"] = std::move(m);

    auto dump_topo = [](const RotorTopology& t) {
        nlohmann::ordered_json o;
        o["kind"] = to_string(t.kind);
        o["v_angle_deg"] = t.v_angle_deg;
        o["rib_width_mm"] = t.rib_width_mm;
        o["magnet_center_radius_mm"] = t.magnet_center_radius_mm;
        o["magnet_segment_lengths_mm"] = t.magnet_segment_lengths_mm;
        o["barrier_volume_per_pole_mm3"] = t.barrier_volume_per_pole_mm3;
        o["pole_arc_fraction"] = t.pole_arc_fraction;
        return o;
    };
    j["topologies"]["v"] = dump_topo(def.v);
    j["topologies"]["delta"] = dump_topo(def.delta);

    std::ofstream out(path);
    if (!out) throw LoadError("cannot write machine file: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace ipmtk
