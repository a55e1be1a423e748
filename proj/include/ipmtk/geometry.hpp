#pragma once

#include <string>
#include <vector>

#include "ipmtk/common.hpp"

namespace ipmtk {

struct MagnetSpec {
    std::string grade = "N30UH";
    double remanence_t = 1.08;
    double recoil_mu_r = 1.05;
    double density_kg_m3 = 7500.0;
};

/// Machine rating-plate and construction data. Defaults describe the 48-slot,
/// 8-pole reference design analyzed by the toolkit.
struct MotorGeometry {
    int phases = 3;
    int poles = 8;
    int slots = 48;
    double rated_speed_rpm = 3000.0;
    double line_peak_current_a = 300.0;
    int winding_layers = 1;
    int parallel_paths = 2;
    double stator_outer_diameter_mm = 193.42;
    double stator_inner_diameter_mm = 132.4;
    double slot_depth_mm = 23.2;
    double tooth_width_mm = 3.32;
    double stack_length_mm = 160.0;
    double air_gap_mm = 0.48;
    double magnet_width_mm = 3.0;
    std::string magnet_grade = "N30UH";
    double skew_fraction = 0.05;  // of one slot pitch

    // Construction details not on the rating plate.
    double shaft_diameter_mm = 40.0;
    double slot_opening_mm = 2.5;
    double stacking_factor = 0.97;
    int conductors_per_slot = 3;
    double slot_fill_factor = 0.45;
    double end_turn_allowance_mm = 120.0;
    MagnetSpec magnet;

    void validate() const;

    int pole_pairs() const { return poles / 2; }
    double stack_m() const { return stack_length_mm * 1e-3; }
    double stator_inner_radius_m() const { return stator_inner_diameter_mm * 5e-4; }
    double stator_outer_radius_m() const { return stator_outer_diameter_mm * 5e-4; }
    double air_gap_m() const { return air_gap_mm * 1e-3; }
    double rotor_outer_radius_m() const { return stator_inner_radius_m() - air_gap_m(); }
    double gap_mid_radius_m() const { return stator_inner_radius_m() - 0.5 * air_gap_m(); }
    double shaft_radius_m() const { return shaft_diameter_mm * 5e-4; }
    double slot_pitch_deg() const { return 360.0 / slots; }
    double pole_pitch_deg() const { return 360.0 / poles; }
    double mech_speed_rad_s(double speed_rpm) const { return speed_rpm * 2.0 * kPi / 60.0; }
};

enum class TopologyKind { VType, DeltaType };

std::string to_string(TopologyKind kind);

/// Rotor magnet arrangement. magnet_segment_lengths_mm holds, per layer, the
/// circumferential lengths of the magnet segments of one pole.
struct RotorTopology {
    TopologyKind kind = TopologyKind::VType;
    int magnet_layers = 1;
    double v_angle_deg = 120.0;
    double rib_width_mm = 1.5;
    double magnet_center_radius_mm = 45.0;
    std::vector<std::vector<double>> magnet_segment_lengths_mm = {{28.0, 28.0}};
    double barrier_volume_per_pole_mm3 = 53400.0;
    double pole_arc_fraction = 0.78;

    static RotorTopology v_type();
    static RotorTopology delta_type();

    void validate() const;

    // Magnet cross-section length of one pole in one layer (m).
    double layer_length_m(int layer) const;
    // Total magnet volume across all poles and layers (m^3).
    double magnet_volume_m3(const MotorGeometry& geom) const;
    double magnet_volume_layer_m3(const MotorGeometry& geom, int layer) const;
};

/// Smallest cogging period in mechanical degrees: 360 / lcm(slots, poles).
double cogging_period_deg(const MotorGeometry& geom);

/// Harmonic attenuation sin(n*g/2)/(n*g/2) for skew angle g =
/// skew_fraction * slot pitch; n is the torque order in cycles per mechanical
/// revolution. Returns 1 at n = 0.
double skew_factor(const MotorGeometry& geom, double harmonic);

/// Net lamination volume: rotor annulus minus magnet pockets, flux barriers
/// and shaft bore (m^3). Throws GeometryError when the pockets exceed the
/// annulus.
double lamination_volume_m3(const MotorGeometry& geom, const RotorTopology& topo);

/// Rotor mass: laminations + magnets + shaft section inside the stack (kg).
double rotor_mass_kg(const MotorGeometry& geom, const RotorTopology& topo,
                     double lamination_density, double magnet_density, double shaft_density);

int rib_count(const RotorTopology& topo, const MotorGeometry& geom);

/// Total rib cross-section resisting the centrifugal load (m^2).
double rib_section_area_m2(const RotorTopology& topo, const MotorGeometry& geom);

// Iron volumes of the loss regions (m^3), net of stacking factor.
double stator_tooth_volume_m3(const MotorGeometry& geom);
double stator_yoke_volume_m3(const MotorGeometry& geom);
double shaft_volume_m3(const MotorGeometry& geom);

/// Machine definition file: geometry plus both rotor topology blocks.
struct MachineDefinition {
    MotorGeometry geometry;
    RotorTopology v;
    RotorTopology delta;

    const RotorTopology& topology(TopologyKind kind) const {
        return kind == TopologyKind::VType ? v : delta;
    }
};

MachineDefinition load_machine_file(const std::string& path);
MachineDefinition default_machine();
void save_machine_file(const MachineDefinition& def, const std::string& path);

}  // namespace ipmtk
