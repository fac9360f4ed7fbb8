#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "grrap/bat.hpp"
#include "grrap/problem.hpp"
#include "grrap/rng.hpp"

namespace grrap {

/// Branch probabilities of the SSO update. Cumulative thresholds are
/// C_g = c_g, C_p = C_g + c_p, C_w = C_p + c_w; whatever is left below 1 is
/// the random-reset probability.
struct TrySetting {
  double cg = 0;
  double cp = 0;
  double cw = 0;

  double Cg() const noexcept { return cg; }
  double Cp() const noexcept { return cg + cp; }
  double Cw() const noexcept { return cg + cp + cw; }
  double cr() const noexcept { return Cw() < 1.0 ? 1.0 - Cw() : 0.0; }
  void validate() const;
};

/// One TrySetting per quarter of the generation budget.
struct StageSchedule {
  std::array<TrySetting, 4> stages;

  /// Stage s covers generations (s * n_gen / 4, (s + 1) * n_gen / 4].
  static int stage_of(int gen, int n_gen) noexcept;
  const TrySetting& at(int gen, int n_gen) const noexcept { return stages[stage_of(gen, n_gen)]; }
  static StageSchedule uniform(const TrySetting& s) { return {{s, s, s, s}}; }
  void validate() const;
};

/// Tuned schedule used by default for every algorithm built on the SSO rule.
StageSchedule default_schedule();

enum class Algorithm { kSsoa3, kSso, kBso, kNsso, kIfsso, kPsso, kPso };

inline constexpr std::array<Algorithm, 7> kAllAlgorithms{Algorithm::kSsoa3, Algorithm::kSso,   Algorithm::kBso,
                                                         Algorithm::kNsso,  Algorithm::kIfsso, Algorithm::kPsso,
                                                         Algorithm::kPso};

std::string_view to_string(Algorithm a) noexcept;
/// Accepts the lower-case tags ssoa3, sso, bso, nsso, ifsso, psso, pso.
std::optional<Algorithm> parse_algorithm(std::string_view tag);

struct PsoParams {
  double inertia = 0.9;
  double c1 = 2.0;
  double c2 = 2.0;
  /// Velocity bound as a fraction of the position range, applied symmetrically.
  double velocity_fraction = 0.25;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SolverSpec {
  Algorithm algorithm = Algorithm::kSsoa3;
  StageSchedule schedule = default_schedule();
  int n_sol = 100;
  int n_gen = 1000;
  std::uint64_t seed = 0;
  PsoParams pso;
  /// Generations at which the best solution is snapshotted. Empty means the
  /// four quarter points of n_gen.
  std::vector<int> stage_generations;

  std::vector<int> resolved_stages() const;
  void validate() const;
};

struct Scored {
  Solution x;
  Evaluation eval;
};

/// Fitness oracle shared by all solvers; counts every call.
class FitnessEvaluator {
 public:
  FitnessEvaluator(const ProblemInstance& inst, const ConnectedVectorSet& cvs) : inst_(inst), cvs_(cvs) {}

  Evaluation operator()(const Solution& s) {
    ++calls_;
    return penalized_reliability(inst_, cvs_, s);
  }
  Scored score(Solution s) {
    Evaluation e = (*this)(s);
    return {std::move(s), e};
  }
  std::uint64_t calls() const noexcept { return calls_; }
  const ProblemInstance& instance() const noexcept { return inst_; }

 private:
  const ProblemInstance& inst_;
  const ConnectedVectorSet& cvs_;
  std::uint64_t calls_ = 0;
};

// ---- update mechanisms ------------------------------------------------------

enum class Branch { kGlobal, kPersonal, kSelf, kRandom };

Branch select_branch(double rho, const TrySetting& setting) noexcept;

/// Fresh affixed value: uniform integer redundancy plus uniform reliability.
double random_coordinate(const VariableRanges& ranges, Rng& rng);

/// Plain SSO coordinate update.
double um0_update(double x, double g, double p, const TrySetting& setting, const VariableRanges& ranges, Rng& rng);

/// Perturbation added to the fractional part by the nSSO rule:
/// 0.0005 * U(-0.5, 0.5) * gen / max(gen_best, 1).
double um1_offset(int gen, int gen_best, Rng& rng);
/// Perturbation of the ifSSO rule: U(0, 1) * exp(-100 * gen / n_gen).
double um3_offset(int gen, int n_gen, Rng& rng);

/// SSO branch choice; unless the branch was a random reset, the offset is
/// added to the fractional part only and the result clamped into range.
double um1_update(double x, double g, double p, const TrySetting& setting, const VariableRanges& ranges, int gen,
                  int gen_best, Rng& rng);
double um3_update(double x, double g, double p, const TrySetting& setting, const VariableRanges& ranges, int gen,
                  int n_gen, Rng& rng);

struct ResetResult {
  enum class Status {
    kBinding,   // cost constraint now holds with equality (to round-off, never above)
    kClamped,   // binding value lay outside [r_min, r_max]; clamped
    kNoBudget,  // other subsystems already spend the whole cost budget; r unchanged
  };
  double r = 0;
  Status status = Status::kNoBudget;
};

/// Reliability for subsystem j (0-based) that makes the cost constraint bind,
/// all other variables fixed.
ResetResult boundary_reset_r(const ProblemInstance& inst, const Allocation& a, int j);

/// Solution produced by the boundary move at generation `gen`: coordinate
/// gen mod m is reset. Returns the input unchanged when there is no budget.
Solution boundary_candidate(const ProblemInstance& inst, const Solution& g, int gen);

/// Boundary move on the global best; kept only if the penalized reliability
/// strictly improves. Returns true when `best` changed. Costs one evaluation.
bool boundary_update(Scored& best, int gen, FitnessEvaluator& eval);

/// BSO perturbation of the global best: two distinct reliabilities redrawn,
/// then one random coordinate boundary-reset.
Solution um4_candidate(const ProblemInstance& inst, const Solution& g, Rng& rng);
bool um4_gbest_update(Scored& best, FitnessEvaluator& eval, Rng& rng);

struct PsoBounds {
  double x_lb = 0, x_ub = 0;
  double v_lb = 0, v_ub = 0;
  static PsoBounds from_range(double x_lb, double x_ub, double velocity_fraction);
};

/// Velocity and position step with clamping, independent draws per coordinate.
void um5_pso_update(std::span<double> x, std::span<double> v, std::span<const double> p, std::span<const double> g,
                    const PsoBounds& bounds, const PsoParams& params, Rng& rng);

// ---- solver -------------------------------------------------------------------

struct StageSnapshot {
  int stage = 0;
  int generation = 0;
  Scored best;
  double mean_pbest_rp = 0;
};

struct RunResult {
  Algorithm algorithm = Algorithm::kSsoa3;
  std::uint64_t seed = 0;
  Scored best;
  /// best_rp[t] is r_p(G) after generation t; index 0 is the initial population.
  std::vector<double> best_rp;
  std::vector<StageSnapshot> stages;
  std::uint64_t evaluations = 0;
};

/// Read-only view handed to an observer after every generation.
struct SwarmView {
  int generation;
  std::span<const Scored> solutions;
  std::span<const Scored> personal_best;
  const Scored& global_best;
};
using GenerationObserver = std::function<void(const SwarmView&)>;

RunResult run_solver(const SolverSpec& spec, const ProblemInstance& inst, const ConnectedVectorSet& cvs,
                     const GenerationObserver& observer = {});

}  // namespace grrap
