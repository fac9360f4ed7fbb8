#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "grrap/bat.hpp"
#include "grrap/problem.hpp"
#include "grrap/swarm.hpp"

namespace grrap {

struct LoadedProblem {
  std::string id;
  ProblemInstance instance;
  ConnectedVectorSet vectors;
};

/// Parses the network, reads the instance file or synthesizes one, and builds
/// (or loads from `cache_dir`) the connected vectors.
LoadedProblem load_problem(const std::string& network_path, const std::optional<std::string>& instance_path,
                           int arc_cap = kDefaultArcCap, const std::string& cache_dir = {});

struct ExperimentConfig {
  std::vector<Algorithm> algorithms{Algorithm::kSsoa3};
  int n_sol = 100;
  int n_gen = 1000;
  int n_run = 1;
  std::uint64_t base_seed = 1;
  /// Empty: quarters of n_gen.
  std::vector<int> stage_generations;
  StageSchedule schedule = default_schedule();
  PsoParams pso;
  int jobs = 1;

  void validate() const;
};

struct StageRow {
  std::string problem;
  Algorithm algorithm = Algorithm::kSsoa3;
  std::uint64_t seed = 0;
  int stage = 0;
  int generation = 0;
  double best_rs = 0;
  double best_rp = 0;
  double gv = 0;
  double gc = 0;
  double gw = 0;
  bool feasible = false;
  double runtime_s = 0;
  /// Set on a failed run; the row then carries no stage data.
  std::optional<std::string> error;
};

struct RunRecord {
  std::string problem;
  Algorithm algorithm = Algorithm::kSsoa3;
  std::uint64_t seed = 0;
  double runtime_s = 0;
  std::optional<RunResult> result;
  std::string error;
};

struct ExperimentResult {
  std::vector<RunRecord> runs;
  std::vector<StageRow> rows;
};

/// Runs n_run seeded runs (seeds base_seed + k) of every algorithm on every
/// problem. Output order is (problem, algorithm, run, stage) regardless of
/// scheduling; a failing run yields one error row and does not stop others.
ExperimentResult run_experiment(const std::vector<LoadedProblem>& problems, const ExperimentConfig& config);

inline constexpr const char* kStageCsvHeader =
    "problem,algorithm,seed,stage,generation,best_rs,best_rp,gv,gc,gw,feasible,runtime_s";

void write_stage_csv(std::ostream& out, const std::vector<StageRow>& rows);

/// One line per run and arc: problem,algorithm,seed,arc,n,r
void write_solution_dump(std::ostream& out, const std::vector<RunRecord>& runs, const std::vector<LoadedProblem>& problems);

/// Parses "250,500,750,1000".
std::vector<int> parse_stage_list(const std::string& text);

}  // namespace grrap
