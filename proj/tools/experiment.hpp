#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "besov/verify.hpp"

namespace besov::cli {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kOk = 0, kAssertionFailed = 1, kInvalidConfig = 2, kResourceLimit = 3 };

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ResourceLimitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FamilySpec {
    std::string kind = "standard";  // standard, torus_gaussians, torus_trig, heisenberg_bumps, torus_eigen, zero
    int count = 10;
    int max_degree = 8;
    std::vector<int> ks{1, 2, 3};
};

struct Tolerances {
    double drift = 0.2;
    double calderon = 1e-2;
    double paraproduct = 1e-2;
    double semigroup = 0.0;  // 0: 1e-6 for spectral and closed form, 1e-3 otherwise
    double mass = 0.0;       // 0: 1e-10 spectral, 5e-3 otherwise
    double contraction = 0.0;  // 0: 1e-9 spectral and closed form, 1e-3 otherwise
};

struct AlgebraSpec {
    std::vector<int> m{1, 2};
    int lemma_trials = 1000;
};

struct ExperimentConfig {
    GroupModel group = GroupModel::torus(1);
    std::array<int, 3> nodes{128, 0, 0};
    EngineSpec engine;
    std::vector<BesovParams> params;
    TGrid tgrid = TGrid();
    FamilySpec family;
    std::vector<Characterization> characterizations;
    std::filesystem::path output_dir = "besov_out";
    std::uint64_t seed = 42;
    Tolerances tolerances;
    AlgebraSpec algebra;
    std::vector<double> embedding_qs{1.0, 1.5, 2.0, 4.0, kInfinity};
    bool refine = true;
    std::size_t max_nodes = 0;  // 0: unlimited
    nlohmann::json source;      // the validated document, echoed into summary.json
};

// Throws ConfigError with the offending key on any schema violation, unknown key included.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

FunctionFamily make_family(const ExperimentConfig& cfg);

struct NormRow {
    std::string function;
    Characterization characterization = Characterization::Heat;
    BesovParams params;
    NormBreakdown breakdown;
};

struct Failure {
    std::string invariant;
    std::string detail;
};

// Everything one subcommand produced; emit_outputs turns it into files.
struct Report {
    std::vector<NormRow> norms;
    std::vector<std::pair<BesovParams, EquivalenceReport>> equivalence;
    std::vector<EmbeddingReport> embedding;
    nlohmann::json algebra = nlohmann::json::array();
    nlohmann::json heat = nlohmann::json::array();
    std::vector<Failure> failures;
};

Report run_norms(const ExperimentConfig& cfg);
Report run_equivalence(const ExperimentConfig& cfg);
Report run_algebra(const ExperimentConfig& cfg);
Report run_heat_check(const ExperimentConfig& cfg);
Report run_full(const ExperimentConfig& cfg);

void write_norm_csv(const std::filesystem::path& path, const std::vector<NormRow>& rows);
void write_breakdown_csv(const std::filesystem::path& path, const std::vector<NormRow>& rows);
// Log-log scatter of one characterization pair with the ratio interval drawn as two lines.
std::string ratio_svg(const EquivalenceRun& run, std::size_t pair, const std::vector<Characterization>& chars);
nlohmann::json summary_json(const std::string& command, const ExperimentConfig& cfg, const Report& report);
// report.csv, breakdown.csv, summary.json, and the SVG plots and algebra/heat tables that apply.
void emit_outputs(const std::string& command, const ExperimentConfig& cfg, const Report& report);

// Parse, run and emit. Diagnostics go to stderr; the return value is the process exit status.
int run_command(const std::string& command, const std::filesystem::path& config_path,
                const std::optional<std::filesystem::path>& out_override);

// BESOV_THREADS, when set, must be a positive integer.
void apply_thread_env();

}  // namespace besov::cli
