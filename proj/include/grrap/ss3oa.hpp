#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "grrap/swarm.hpp"

namespace grrap {

/// L9(3^3) design over (c_g, c_p, c_w). Levels are 1-based.
struct OADesign {
  std::array<std::array<int, 3>, 9> levels;
  /// values[factor][level - 1]
  std::array<std::array<double, 3>, 3> values;

  static OADesign standard();
  /// Every column holds each level three times and every column pair holds
  /// each of the nine level pairs exactly once.
  bool orthogonal() const noexcept;
  TrySetting setting(const std::array<int, 3>& level) const;
};

std::array<TrySetting, 9> derive_try_table(const OADesign& design);

/// averages[factor][level - 1]
using LevelAverages = std::array<std::array<double, 3>, 3>;

/// Mean of the three tries at each level of each factor. `try_fitness` must
/// hold one finite value per try.
LevelAverages average_by_level(const std::vector<double>& try_fitness, const OADesign& design);

/// Best level per factor; equal averages resolve to the lower level.
std::array<int, 3> best_levels(const LevelAverages& averages);

struct ScheduleChoice {
  std::array<std::array<int, 3>, 4> levels;
  StageSchedule schedule;
};
ScheduleChoice select_schedule(const std::array<LevelAverages, 4>& per_stage, const OADesign& design);

enum class TuningFitness {
  kBestG,       // global best r_p at the stage boundary
  kMeanPBest,   // swarm mean of personal-best r_p at the stage boundary
};

struct TuningProblem {
  std::string name;
  const ProblemInstance* instance;
  const ConnectedVectorSet* vectors;
};

struct TuningRow {
  int try_index = 0;
  std::string problem;
  std::uint64_t seed = 0;
  int stage = 0;
  double best_rs = 0;
  double best_rp = 0;
  double mean_pbest_rp = 0;
};

struct TuningOptions {
  int runs_per_problem = 5;
  std::uint64_t base_seed = 1;
  TuningFitness fitness = TuningFitness::kBestG;
  int jobs = 1;
};

struct TuningReport {
  std::vector<TuningRow> rows;
  /// try_fitness[stage][try]: mean over problems of the mean over runs.
  std::array<std::vector<double>, 4> try_fitness;
  std::array<LevelAverages, 4> level_averages;
  ScheduleChoice choice;
  std::size_t solver_invocations = 0;
};

/// Runs every try of the design on every problem `runs_per_problem` times
/// with SSOA3 (seeds base_seed + run). `base` supplies n_sol, n_gen and stage
/// generations, which must resolve to exactly four stages.
TuningReport run_tuning(const std::vector<TuningProblem>& problems, const OADesign& design, const SolverSpec& base,
                        const TuningOptions& options);

/// Rebuilds the per-stage try fitness from report rows alone.
std::array<std::vector<double>, 4> aggregate_rows(const std::vector<TuningRow>& rows, TuningFitness fitness);

void write_tuning_csv(std::ostream& out, const std::vector<TuningRow>& rows);

// Schedule file: one line per stage, '#' comments,
//   stage <s> <c_g> <c_p> <c_w>
std::string format_schedule(const StageSchedule& schedule);
StageSchedule parse_schedule(std::string_view text);
StageSchedule load_schedule(const std::string& path);

}  // namespace grrap
