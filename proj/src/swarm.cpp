#include "grrap/swarm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace grrap {

void TrySetting::validate() const {
  for (double c : {cg, cp, cw}) {
    if (!(c >= 0.0 && std::isfinite(c))) throw ConfigError("branch probabilities must be finite and non-negative");
  }
}

int StageSchedule::stage_of(int gen, int n_gen) noexcept {
  if (n_gen <= 0 || gen <= 0) return 0;
  const long long s = (4LL * gen + n_gen - 1) / n_gen - 1;
  return static_cast<int>(std::clamp<long long>(s, 0, 3));
}

void StageSchedule::validate() const {
  for (const TrySetting& s : stages) s.validate();
}

StageSchedule default_schedule() {
  return {{
      TrySetting{0.4, 0.25, 0.3},
      TrySetting{0.4, 0.25, 0.0},
      TrySetting{0.4, 0.35, 0.0},
      TrySetting{0.4, 0.35, 0.0},
  }};
}

std::string_view to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::kSsoa3: return "ssoa3";
    case Algorithm::kSso: return "sso";
    case Algorithm::kBso: return "bso";
    case Algorithm::kNsso: return "nsso";
    case Algorithm::kIfsso: return "ifsso";
    case Algorithm::kPsso: return "psso";
    case Algorithm::kPso: return "pso";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view tag) {
  for (Algorithm a : kAllAlgorithms)
    if (to_string(a) == tag) return a;
  return std::nullopt;
}

std::vector<int> SolverSpec::resolved_stages() const {
  if (!stage_generations.empty()) return stage_generations;
  if (n_gen <= 0) return {0};
  std::vector<int> out;
  for (int s = 0; s < 4; ++s) {
    const int g = static_cast<int>(static_cast<long long>(n_gen) * (s + 1) / 4);
    if (g > 0 && (out.empty() || g > out.back())) out.push_back(g);
  }
  return out;
}

void SolverSpec::validate() const {
  if (n_sol < 1) throw ConfigError("n_sol must be at least 1");
  if (n_gen < 0) throw ConfigError("n_gen must be non-negative");
  schedule.validate();
  if (!(pso.velocity_fraction > 0 && std::isfinite(pso.inertia) && std::isfinite(pso.c1) && std::isfinite(pso.c2)))
    throw ConfigError("invalid PSO constants");
  const std::vector<int> st = resolved_stages();
  if (st.empty()) throw ConfigError("no stage generations");
  for (std::size_t i = 0; i < st.size(); ++i) {
    if (st[i] < 0) throw ConfigError("stage generations must be non-negative");
    if (i > 0 && st[i] <= st[i - 1]) throw ConfigError("stage generations must be strictly increasing");
  }
  if (st.back() != n_gen) throw ConfigError("last stage generation must equal n_gen");
}

// ---- update mechanisms ------------------------------------------------------

Branch select_branch(double rho, const TrySetting& setting) noexcept {
  if (rho < setting.Cg()) return Branch::kGlobal;
  if (rho < setting.Cp()) return Branch::kPersonal;
  if (rho < setting.Cw()) return Branch::kSelf;
  return Branch::kRandom;
}

double random_coordinate(const VariableRanges& ranges, Rng& rng) {
  const int n = rng.uniform_int(ranges.n_min, ranges.n_max);
  return n + rng.uniform(ranges.r_min, ranges.r_max);
}

double um0_update(double x, double g, double p, const TrySetting& setting, const VariableRanges& ranges, Rng& rng) {
  switch (select_branch(rng.uniform01(), setting)) {
    case Branch::kGlobal: return g;
    case Branch::kPersonal: return p;
    case Branch::kSelf: return x;
    case Branch::kRandom: break;
  }
  return random_coordinate(ranges, rng);
}

double um1_offset(int gen, int gen_best, Rng& rng) {
  const double rho = rng.uniform(-0.5, 0.5);
  return 0.0005 * rho * gen / std::max(gen_best, 1);
}

double um3_offset(int gen, int n_gen, Rng& rng) {
  const double rho = rng.uniform01();
  return rho * std::exp(-100.0 * gen / std::max(n_gen, 1));
}

namespace {

double shift_fraction(double value, double offset, const VariableRanges& ranges) {
  const double whole = std::clamp(std::floor(value), static_cast<double>(ranges.n_min),
                                  static_cast<double>(ranges.n_max));
  const double frac = std::clamp(value - std::floor(value) + offset, ranges.r_min, ranges.r_max);
  return whole + frac;
}

}  // namespace

double um1_update(double x, double g, double p, const TrySetting& setting, const VariableRanges& ranges, int gen,
                  int gen_best, Rng& rng) {
  const double rho = rng.uniform01();
  switch (select_branch(rho, setting)) {
    case Branch::kGlobal: return shift_fraction(g, um1_offset(gen, gen_best, rng), ranges);
    case Branch::kPersonal: return shift_fraction(p, um1_offset(gen, gen_best, rng), ranges);
    case Branch::kSelf: return shift_fraction(x, um1_offset(gen, gen_best, rng), ranges);
    case Branch::kRandom: break;
  }
  return random_coordinate(ranges, rng);
}

double um3_update(double x, double g, double p, const TrySetting& setting, const VariableRanges& ranges, int gen,
                  int n_gen, Rng& rng) {
  const double rho = rng.uniform01();
  switch (select_branch(rho, setting)) {
    case Branch::kGlobal: return shift_fraction(g, um3_offset(gen, n_gen, rng), ranges);
    case Branch::kPersonal: return shift_fraction(p, um3_offset(gen, n_gen, rng), ranges);
    case Branch::kSelf: return shift_fraction(x, um3_offset(gen, n_gen, rng), ranges);
    case Branch::kRandom: break;
  }
  return random_coordinate(ranges, rng);
}

ResetResult boundary_reset_r(const ProblemInstance& inst, const Allocation& a, int j) {
  const int m = inst.size();
  if (j < 0 || j >= m) throw std::out_of_range("boundary reset coordinate out of range");
  const auto& params = inst.params();
  const double cap = inst.bounds().cost;
  double others = 0;
  for (int i = 0; i < m; ++i)
    if (i != j) others += subsystem_cost(params[i], a.n[i], a.r[i]);
  const double budget = cap - others;
  if (!(budget > 0)) return {a.r[j], ResetResult::Status::kNoBudget};

  const ArcParams& pj = params[j];
  const double k = pj.alpha * (a.n[j] + std::exp(a.n[j] / 4.0));
  double r = std::exp(-1000.0 * std::pow(k / budget, 1.0 / pj.beta));

  const VariableRanges& rr = inst.ranges();
  if (r < rr.r_min || r > rr.r_max) return {std::clamp(r, rr.r_min, rr.r_max), ResetResult::Status::kClamped};

  // Round-off may leave the total a few ulps above the cap.
  std::vector<double> trial = a.r;
  trial[j] = r;
  for (int step = 0; step < 64 && g_cost(params, a.n, trial) > cap && trial[j] > rr.r_min; ++step)
    trial[j] = std::nextafter(trial[j], 0.0);
  return {trial[j], ResetResult::Status::kBinding};
}

namespace {

// Resets coordinate j of s in place. False when there is no budget.
bool apply_reset(const ProblemInstance& inst, Solution& s, int j) {
  const Allocation a = decode(s, inst.ranges());
  const ResetResult res = boundary_reset_r(inst, a, j);
  if (res.status == ResetResult::Status::kNoBudget) return false;
  s.x[j] = a.n[j] + res.r;
  if (res.status != ResetResult::Status::kBinding) return true;
  // n + r is rounded to the spacing of the integer part; step down until the
  // decoded solution is cost-feasible.
  const double cap = inst.bounds().cost;
  for (int step = 0; step < 64; ++step) {
    const Allocation d = decode(s, inst.ranges());
    if (g_cost(inst, d.n, d.r) <= cap || d.r[j] <= inst.ranges().r_min) break;
    s.x[j] = std::nextafter(s.x[j], 0.0);
  }
  return true;
}

}  // namespace

Solution boundary_candidate(const ProblemInstance& inst, const Solution& g, int gen) {
  Solution s = g;
  const int m = inst.size();
  apply_reset(inst, s, static_cast<int>(static_cast<long long>(gen) % m));
  return s;
}

bool boundary_update(Scored& best, int gen, FitnessEvaluator& eval) {
  Scored trial = eval.score(boundary_candidate(eval.instance(), best.x, gen));
  if (trial.eval.rp > best.eval.rp) {
    best = std::move(trial);
    return true;
  }
  return false;
}

Solution um4_candidate(const ProblemInstance& inst, const Solution& g, Rng& rng) {
  const int m = inst.size();
  const VariableRanges& rr = inst.ranges();
  Allocation a = decode(g, rr);
  const int first = rng.uniform_int(0, m - 1);
  int second = first;
  if (m > 1) {
    const int k = rng.uniform_int(0, m - 2);
    second = k >= first ? k + 1 : k;
  }
  a.r[first] = rng.uniform(rr.r_min, rr.r_max);
  if (second != first) a.r[second] = rng.uniform(rr.r_min, rr.r_max);
  Solution s = encode(a.n, a.r, rr);
  apply_reset(inst, s, rng.uniform_int(0, m - 1));
  return s;
}

bool um4_gbest_update(Scored& best, FitnessEvaluator& eval, Rng& rng) {
  Scored trial = eval.score(um4_candidate(eval.instance(), best.x, rng));
  if (trial.eval.rp > best.eval.rp) {
    best = std::move(trial);
    return true;
  }
  return false;
}

PsoBounds PsoBounds::from_range(double x_lb, double x_ub, double velocity_fraction) {
  const double v = velocity_fraction * (x_ub - x_lb);
  return {x_lb, x_ub, -v, v};
}

void um5_pso_update(std::span<double> x, std::span<double> v, std::span<const double> p, std::span<const double> g,
                    const PsoBounds& b, const PsoParams& params, Rng& rng) {
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double r1 = rng.uniform01();
    const double r2 = rng.uniform01();
    const double raw = params.inertia * v[j] + params.c1 * r1 * (p[j] - x[j]) + params.c2 * r2 * (g[j] - x[j]);
    v[j] = std::clamp(raw, b.v_lb, b.v_ub);
    x[j] = std::clamp(x[j] + v[j], b.x_lb, b.x_ub);
  }
}

// ---- solver -------------------------------------------------------------------

RunResult run_solver(const SolverSpec& spec, const ProblemInstance& inst, const ConnectedVectorSet& cvs,
                     const GenerationObserver& observer) {
  spec.validate();
  if (cvs.network_hash() != inst.network().content_hash() || cvs.arc_count() != inst.size())
    throw ConfigError("connected-vector set does not match the instance network");

  const int m = inst.size();
  const int n_sol = spec.n_sol;
  const VariableRanges& rr = inst.ranges();
  const std::vector<int> stage_gens = spec.resolved_stages();
  Rng rng(spec.seed);
  FitnessEvaluator eval(inst, cvs);

  std::vector<Scored> xs(n_sol), ps(n_sol);
  for (int k = 0; k < n_sol; ++k) {
    Solution s;
    s.x.reserve(m);
    for (int j = 0; j < m; ++j) s.x.push_back(random_coordinate(rr, rng));
    xs[k] = eval.score(std::move(s));
    ps[k] = xs[k];
  }
  int best_k = 0;
  for (int k = 1; k < n_sol; ++k)
    if (ps[k].eval.rp > ps[best_k].eval.rp) best_k = k;
  Scored gbest = ps[best_k];
  int gen_best = 0;

  const Algorithm algo = spec.algorithm;
  const bool whole_pso = algo == Algorithm::kPso;
  const bool frac_pso = algo == Algorithm::kPsso;
  std::vector<std::vector<double>> velocity;
  PsoBounds pso_bounds{};
  if (whole_pso || frac_pso) {
    velocity.assign(n_sol, std::vector<double>(m, 0.0));
    pso_bounds = whole_pso ? PsoBounds::from_range(rr.n_min + rr.r_min, rr.n_max + rr.r_max,
                                                   spec.pso.velocity_fraction)
                           : PsoBounds::from_range(rr.r_min, rr.r_max, spec.pso.velocity_fraction);
  }

  RunResult out;
  out.algorithm = algo;
  out.seed = spec.seed;
  out.best_rp.reserve(spec.n_gen + 1);
  out.best_rp.push_back(gbest.eval.rp);
  std::size_t next_stage = 0;
  auto snapshot = [&](int gen) {
    while (next_stage < stage_gens.size() && stage_gens[next_stage] == gen) {
      double mean = 0;
      for (const Scored& p : ps) mean += p.eval.rp;
      out.stages.push_back({static_cast<int>(next_stage), gen, gbest, mean / n_sol});
      ++next_stage;
    }
  };
  snapshot(0);
  if (observer) observer(SwarmView{0, xs, ps, gbest});

  std::vector<double> pf, gf;
  for (int t = 1; t <= spec.n_gen; ++t) {
    const TrySetting& setting = spec.schedule.at(t, spec.n_gen);
    bool gbest_moved = false;
    for (int k = 0; k < n_sol; ++k) {
      Scored& cur = xs[k];
      const Scored& pb = ps[k];
      // One G move per generation; other copies of G take the swarm update.
      const bool gbest_move =
          !gbest_moved && (algo == Algorithm::kSsoa3 || algo == Algorithm::kBso) && cur.x == gbest.x;

      if (gbest_move) {
        gbest_moved = true;
        Scored trial = gbest;
        if (algo == Algorithm::kSsoa3) {
          boundary_update(trial, t, eval);
        } else {
          um4_gbest_update(trial, eval, rng);
        }
        cur = std::move(trial);
      } else {
        Solution next = cur.x;
        switch (algo) {
          case Algorithm::kSsoa3:
          case Algorithm::kSso:
          case Algorithm::kBso:
            for (int j = 0; j < m; ++j) next.x[j] = um0_update(cur.x.x[j], gbest.x.x[j], pb.x.x[j], setting, rr, rng);
            break;
          case Algorithm::kNsso:
            for (int j = 0; j < m; ++j)
              next.x[j] = um1_update(cur.x.x[j], gbest.x.x[j], pb.x.x[j], setting, rr, t, gen_best, rng);
            break;
          case Algorithm::kIfsso:
            for (int j = 0; j < m; ++j)
              next.x[j] = um3_update(cur.x.x[j], gbest.x.x[j], pb.x.x[j], setting, rr, t, spec.n_gen, rng);
            break;
          case Algorithm::kPsso: {
            // Redundancy follows the SSO rule, reliability follows PSO.
            const Allocation ax = decode(cur.x, rr), ap = decode(pb.x, rr), ag = decode(gbest.x, rr);
            std::vector<double> frac = ax.r;
            um5_pso_update(frac, velocity[k], ap.r, ag.r, pso_bounds, spec.pso, rng);
            for (int j = 0; j < m; ++j) {
              int n = ax.n[j];
              switch (select_branch(rng.uniform01(), setting)) {
                case Branch::kGlobal: n = ag.n[j]; break;
                case Branch::kPersonal: n = ap.n[j]; break;
                case Branch::kSelf: break;
                case Branch::kRandom: n = rng.uniform_int(rr.n_min, rr.n_max); break;
              }
              next.x[j] = n + frac[j];
            }
            break;
          }
          case Algorithm::kPso:
            um5_pso_update(next.x, velocity[k], pb.x.x, gbest.x.x, pso_bounds, spec.pso, rng);
            break;
        }
        cur = eval.score(std::move(next));
      }

      if (cur.eval.rp > ps[k].eval.rp) {
        ps[k] = cur;
        if (ps[k].eval.rp > gbest.eval.rp) {
          gbest = ps[k];
          gen_best = t;
        }
      }
    }
    out.best_rp.push_back(gbest.eval.rp);
    snapshot(t);
    if (observer) observer(SwarmView{t, xs, ps, gbest});
  }

  out.best = std::move(gbest);
  out.evaluations = eval.calls();
  return out;
}

}  // namespace grrap
