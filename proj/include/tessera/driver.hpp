#pragma once

#include "tessera/benchmarks.hpp"
#include "tessera/estimator.hpp"
#include "tessera/extension.hpp"
#include "tessera/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tessera::driver {

/// Thrown on malformed configuration; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    // [problem]
    std::string name;
    int nvar = 0;
    std::string custom_cmd;
    bool binary_only = false;
    // [algorithm]
    int budget = 0;
    std::uint64_t seed = 1;
    int pool_size = 100;
    int gm_degree = -1;  // rule index s; -1 = dimension default
    int screening_k = 0;
    std::vector<std::string> stop_rules;  // "mix_below_pf", "pout_small"
    double pout_eps = 1e-2;
    // [output]
    std::string out_dir = "tessera_run";
    bool audit = false;
    bool progress = true;
};

/// Flat key=value configuration with [problem] [algorithm] [output] sections.
RunConfig parse_config(std::istream& is);
RunConfig parse_config_file(const std::string& path);

struct StepLog {
    int nsim = 0;
    CandidateKind action = CandidateKind::Explore;
};

struct RunResult {
    est::EstimateSnapshot final_snapshot;
    std::optional<Vector> t2;           // triangulation-space sensitivities
    std::optional<Vector> t2_physical;  // through the Nataf chain, if any
    std::vector<StepLog> steps;
    std::string stopped_by;  // empty = budget exhausted
    double wall_seconds = 0.0;
    std::vector<est::EstimateSnapshot> history;
    std::vector<double> audit_errors;  // |1 - partition sum| per audited step
};

/// Runs the adaptive loop to the configured budget and writes the run
/// directory: config echo, convergence.csv, sensitivity.csv, skeleton.txt,
/// summary.txt. `resume_dir` continues a previous run to the (total) budget.
RunResult run(const RunConfig& cfg, const std::string& resume_dir = "");

/// In-memory variant used by tests and the acceptance suite.
RunResult run_in_memory(const RunConfig& cfg, est::Estimator* out_state = nullptr);

/// Text summary of a finished run directory (deterministic: no wall time).
std::string report(const std::string& run_dir);

} // namespace tessera::driver
