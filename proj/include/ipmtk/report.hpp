#pragma once

#include <map>
#include <string>
#include <vector>

#include "ipmtk/calibration.hpp"
#include "ipmtk/losses.hpp"

namespace ipmtk {

enum class OutputFormat { Delimited, Structured, Both };

struct MechanicsSettings {
    double eccentricity_m = -1;  // < 0 -> take the calibrated value
    int harmonics = 5;
    double harmonic_decay = 0.1;
    double shaft_density_kg_m3 = 7850.0;
};

struct SweepConfig {
    MachineDefinition machine;
    std::vector<std::string> materials;  // empty -> every material in the DB
    std::vector<TopologyKind> topologies = {TopologyKind::VType, TopologyKind::DeltaType};
    OperatingPoint operating_point;      // gamma ignored when auto_gamma
    bool auto_gamma = true;              // per-cell MTPA angle
    MechanicsSettings mechanics;
    int profile_steps = 60;
    int cogging_steps = 96;
    std::string out_dir = "ipmtk_out";
    OutputFormat format = OutputFormat::Both;
    int jobs = 0;  // 0 -> hardware concurrency
    Calibration calibration;
};

/// One analyzed (material, topology) cell. Partial failures carry the error
/// text instead of results.
struct ResultRow {
    std::string material;
    TopologyKind topology = TopologyKind::VType;
    bool failed = false;
    std::string error;

    TorqueMetrics torque;
    double cogging_dominant_order = 0;
    DqParams dq;
    double gamma_deg = 0;
    LossBreakdown losses;
    double efficiency = 0;
    double rotor_mass_kg = 0;
    double force_n = 0;         // unbalance + ripple load on the ribs
    double ripple_force_n = 0;
    double stress_avg_pa = 0;
    double strain = 0;
    bool within_yield = true;
    double displacement_x_m = 0;
    double displacement_y_m = 0;
    std::array<double, 9> natural_freq_hz{};
    std::vector<ModeMargin> margins;
    RegionPeakFlux peaks;
    SolveStats stats;
    TorqueProfile profile;
    int cost_tier = 0;

    std::map<std::string, double> criterion_scores;
    double total_score = 0;
};

/// Analyze a single cell; throws on failure (run_sweep catches per row).
ResultRow analyze_cell(const SweepConfig& cfg, const MaterialDb& db,
                       const std::string& material, TopologyKind topology);

/// Material DB order x topology order, rows computed independently by a
/// worker pool; per-row failures recorded without aborting the sweep.
std::vector<ResultRow> run_sweep(const SweepConfig& cfg, const MaterialDb& db);

struct RankWeights {
    double t_avg = 0;        // higher is better
    double ripple = 0;       // lower is better
    double efficiency = 0;   // higher
    double stress = 0;       // lower
    double displacement = 0; // lower
    double mode2_freq = 0;   // higher
    double cost = 0;         // lower

    static RankWeights equal();
    static RankWeights electrical();
};

struct RankEntry {
    std::size_t row_index = 0;
    double score = 0;
};

/// Min-max normalize each weighted criterion over the non-failed rows and
/// order by weighted score (ties by material name, then topology). Fills the
/// rows' criterion_scores / total_score.
std::vector<RankEntry> rank(std::vector<ResultRow>& rows, const RankWeights& weights);

/// Write the sweep artifacts (summary table, natural-frequency table, torque
/// profiles, B-H curve dumps, structured results, checksum index). Returns
/// the written paths relative to out_dir.
std::vector<std::string> emit(const std::vector<ResultRow>& rows, OutputFormat format,
                              const std::string& out_dir, const MaterialDb& db);

std::string material_slug(const std::string& name);

}  // namespace ipmtk
