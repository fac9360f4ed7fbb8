#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "grrap/swarm.hpp"
#include "oracles.hpp"

namespace grrap {
namespace {

const std::vector<int> kExampleN{3, 2, 2, 3, 3};
const std::vector<double> kExampleR{0.77946645, 0.87173278, 0.90284951, 0.71148780, 0.78781644};

std::vector<ArcParams> table_params() {
  const auto& rows = reference_table().rows;
  return {rows.begin(), rows.end()};
}

ProblemInstance series_instance() {
  return ProblemInstance(oracle::series_network(5), table_params(), reference_table().bounds);
}

ProblemInstance bridge_instance() {
  return ProblemInstance(oracle::bridge_network(), table_params(), reference_table().bounds);
}

TEST(StageSchedule, StageOfGeneration) {
  EXPECT_EQ(StageSchedule::stage_of(1, 1000), 0);
  EXPECT_EQ(StageSchedule::stage_of(250, 1000), 0);
  EXPECT_EQ(StageSchedule::stage_of(251, 1000), 1);
  EXPECT_EQ(StageSchedule::stage_of(500, 1000), 1);
  EXPECT_EQ(StageSchedule::stage_of(750, 1000), 2);
  EXPECT_EQ(StageSchedule::stage_of(751, 1000), 3);
  EXPECT_EQ(StageSchedule::stage_of(1000, 1000), 3);
  EXPECT_EQ(StageSchedule::stage_of(3, 3), 3);
}

TEST(StageSchedule, DefaultThresholds) {
  const StageSchedule s = default_schedule();
  EXPECT_NEAR(s.stages[0].Cp(), 0.65, 1e-15);
  EXPECT_NEAR(s.stages[0].Cw(), 0.95, 1e-15);
  EXPECT_NEAR(s.stages[1].Cw(), 0.65, 1e-15);
  EXPECT_NEAR(s.stages[2].Cp(), 0.75, 1e-15);
  EXPECT_NEAR(s.stages[3].Cw(), 0.75, 1e-15);
  EXPECT_NEAR(s.stages[0].cr(), 0.05, 1e-15);
}

TEST(Algorithm, TagsRoundTrip) {
  for (Algorithm a : kAllAlgorithms) EXPECT_EQ(parse_algorithm(to_string(a)), a);
  EXPECT_FALSE(parse_algorithm("ga").has_value());
}

TEST(SelectBranch, Thresholds) {
  EXPECT_EQ(select_branch(0.1, {0.4, 0.3, 0.2}), Branch::kGlobal);
  EXPECT_EQ(select_branch(0.5, {0.4, 0.25, 0.3}), Branch::kPersonal);
  EXPECT_EQ(select_branch(0.99, {0.6, 0.25, 0.2}), Branch::kSelf);
  EXPECT_EQ(select_branch(0.96, {0.4, 0.25, 0.3}), Branch::kRandom);
  // Zero-width personal branch never fires.
  EXPECT_EQ(select_branch(0.2, {0.2, 0.0, 0.2}), Branch::kSelf);
}

TEST(Um0, BranchesReturnTheirSource) {
  const VariableRanges rr;
  Rng rng(1);
  for (int k = 0; k < 100; ++k) {
    EXPECT_EQ(um0_update(3.6, 4.7, 5.8, {1.0, 0, 0}, rr, rng), 4.7);
    EXPECT_EQ(um0_update(3.6, 4.7, 5.8, {0, 1.0, 0}, rr, rng), 5.8);
    EXPECT_EQ(um0_update(3.6, 4.7, 5.8, {0, 0, 1.0}, rr, rng), 3.6);
  }
}

TEST(Um0, RandomBranchIsFreshCoordinate) {
  const VariableRanges rr;
  Rng a(9), b(9);
  for (int k = 0; k < 200; ++k) {
    const double got = um0_update(3.6, 4.7, 5.8, {0, 0, 0}, rr, a);
    b.uniform01();
    EXPECT_EQ(got, random_coordinate(rr, b));
    const Allocation d = decode(Solution{{got}}, rr);
    EXPECT_GE(d.n[0], 1);
    EXPECT_LE(d.n[0], 10);
  }
}

TEST(Um0, RandomBranchFrequency) {
  const VariableRanges rr;
  const TrySetting s{0.4, 0.3, 0.2};  // c_r = 0.1
  Rng rng(12345);
  const int draws = 10000;
  int fresh = 0;
  for (int k = 0; k < draws; ++k) {
    const double v = um0_update(100.0, 200.0, 300.0, s, rr, rng);
    if (v < 100.0) ++fresh;
  }
  const double sigma = std::sqrt(draws * 0.1 * 0.9);
  EXPECT_LE(std::abs(fresh - draws * 0.1), 3 * sigma);
}

TEST(Um1, OffsetBound) {
  Rng rng(3);
  for (int k = 0; k < 10000; ++k) {
    EXPECT_LE(std::abs(um1_offset(50, 50, rng)), 0.00025);
    EXPECT_LE(std::abs(um1_offset(7, 0, rng)), 0.00025 * 7);
  }
}

TEST(Um3, OffsetVanishesAtEnd) {
  Rng rng(4);
  for (int k = 0; k < 1000; ++k) {
    const double l = um3_offset(1000, 1000, rng);
    EXPECT_GE(l, 0.0);
    EXPECT_LE(l, std::exp(-100.0));
    EXPECT_LE(um3_offset(0, 1000, rng), 1.0);
  }
}

TEST(Um1, PerturbsFractionOnly) {
  const VariableRanges rr;
  Rng rng(5);
  for (int k = 0; k < 1000; ++k) {
    const double v = um1_update(3.6, 4.7, 5.8, {1.0, 0, 0}, rr, 20, 20, rng);
    EXPECT_EQ(std::floor(v), 4.0);
    EXPECT_LE(std::abs(v - 4.7), 0.00025 + 1e-12);
  }
  // Clamped into the reliability range at the top end.
  for (int k = 0; k < 1000; ++k) {
    const double v = um3_update(3.6, 4.7, 5.999999, {0, 1.0, 0}, rr, 0, 1000, rng);
    EXPECT_EQ(std::floor(v), 5.0);
    EXPECT_LE(v - 5.0, rr.r_max);
  }
}

TEST(Um1, RandomBranchAddsNoOffset) {
  const VariableRanges rr;
  Rng a(6), b(6);
  for (int k = 0; k < 100; ++k) {
    const double got = um1_update(3.6, 4.7, 5.8, {0, 0, 0}, rr, 10, 1, a);
    b.uniform01();
    EXPECT_EQ(got, random_coordinate(rr, b));
  }
  Rng c(7), d(7);
  for (int k = 0; k < 100; ++k) {
    const double got = um3_update(3.6, 4.7, 5.8, {0, 0, 0}, rr, 0, 10, c);
    d.uniform01();
    EXPECT_EQ(got, random_coordinate(rr, d));
  }
}

TEST(BoundaryReset, SingleArcMatchesBisection) {
  for (double target : {0.6, 0.85, 0.97}) {
    for (int n = 1; n <= 4; ++n) {
      const ArcParams p{2.33e-5, 1.5, 1, 7};
      const double cap = subsystem_cost(p, n, target) * 1.01;
      const ProblemInstance inst(oracle::series_network(1), {p}, {100, cap, 100});
      const ResetResult res = boundary_reset_r(inst, Allocation{{n}, {0.55}}, 0);
      ASSERT_EQ(res.status, ResetResult::Status::kBinding);
      const double root =
          oracle::bisect([&](double r) { return subsystem_cost(p, n, r) - cap; }, 0.5, 1 - 1e-12);
      EXPECT_NEAR(res.r, root, 1e-12);
      EXPECT_LE(subsystem_cost(p, n, res.r), cap);
    }
  }
}

TEST(BoundaryReset, ExampleStateBindsCost) {
  const ProblemInstance inst = series_instance();
  const ResetResult res = boundary_reset_r(inst, Allocation{kExampleN, kExampleR}, 4);
  ASSERT_EQ(res.status, ResetResult::Status::kBinding);
  EXPECT_GT(res.r, kExampleR[4]);
  EXPECT_NEAR(res.r, 0.7878166527, 1e-7);
  std::vector<double> r = kExampleR;
  r[4] = res.r;
  const double gc = g_cost(inst, kExampleN, r);
  EXPECT_LE(gc, 175.0);
  EXPECT_NEAR(gc, 175.0, 1e-9);

  const double root = oracle::bisect(
      [&](double v) {
        std::vector<double> t = kExampleR;
        t[4] = v;
        return g_cost(inst, kExampleN, t) - 175.0;
      },
      0.5, 0.99);
  EXPECT_NEAR(res.r, root, 1e-12);
}

TEST(BoundaryReset, NoBudgetAndClamped) {
  const ProblemInstance tight(oracle::series_network(5), table_params(), {110, 1, 200});
  const ResetResult none = boundary_reset_r(tight, Allocation{kExampleN, kExampleR}, 2);
  EXPECT_EQ(none.status, ResetResult::Status::kNoBudget);
  EXPECT_EQ(none.r, kExampleR[2]);

  const ProblemInstance loose(oracle::series_network(5), table_params(), {110, 1e12, 200});
  const ResetResult clamped = boundary_reset_r(loose, Allocation{kExampleN, kExampleR}, 2);
  EXPECT_EQ(clamped.status, ResetResult::Status::kClamped);
  EXPECT_EQ(clamped.r, loose.ranges().r_max);
}

TEST(BoundaryCandidate, CyclesThroughCoordinates) {
  const ProblemInstance inst = series_instance();
  const Solution g = encode(kExampleN, kExampleR);
  for (int gen = 0; gen < 10; ++gen) {
    const Solution s = boundary_candidate(inst, g, gen);
    for (int i = 0; i < 5; ++i) {
      if (i == gen % 5) {
        EXPECT_NE(s.x[i], g.x[i]);
      } else {
        EXPECT_EQ(s.x[i], g.x[i]);
      }
    }
    const Allocation a = decode(s);
    EXPECT_LE(g_cost(inst, a.n, a.r), 175.0);
  }
}

TEST(BoundaryUpdate, ImprovesExampleState) {
  const ProblemInstance inst = series_instance();
  const ConnectedVectorSet cvs = enumerate_connected(inst.network());
  FitnessEvaluator eval(inst, cvs);
  Scored g = eval.score(encode(kExampleN, kExampleR));
  const double before = g.eval.rp;
  EXPECT_TRUE(boundary_update(g, 4, eval));
  EXPECT_GT(g.eval.rp, before);
  EXPECT_NEAR(g.eval.rs, 0.9316823242437, 1e-7);
  EXPECT_TRUE(g.eval.feasible);
  EXPECT_EQ(eval.calls(), 2u);
}

TEST(BoundaryUpdate, NoBudgetKeepsBest) {
  const ProblemInstance inst(oracle::series_network(5), table_params(), {110, 1, 200});
  const ConnectedVectorSet cvs = enumerate_connected(inst.network());
  FitnessEvaluator eval(inst, cvs);
  Scored g = eval.score(encode(kExampleN, kExampleR));
  const Scored before = g;
  EXPECT_FALSE(boundary_update(g, 3, eval));
  EXPECT_EQ(g.x, before.x);
}

TEST(BoundaryUpdate, NeverDecreasesFitness) {
  const ProblemInstance inst = bridge_instance();
  const ConnectedVectorSet cvs = enumerate_connected(inst.network());
  FitnessEvaluator eval(inst, cvs);
  Rng rng(8);
  for (int k = 0; k < 300; ++k) {
    Solution s;
    for (int j = 0; j < 5; ++j) s.x.push_back(random_coordinate(inst.ranges(), rng));
    Scored g = eval.score(s);
    const Scored before = g;
    const bool changed = boundary_update(g, k, eval);
    EXPECT_GE(g.eval.rp, before.eval.rp);
    if (!changed) EXPECT_EQ(g.x, before.x);
  }
}

TEST(Um4, CandidateRedrawsAndBinds) {
  const auto& rows = reference_table().rows;
  const double cap = 1e9;
  const ProblemInstance inst(oracle::series_network(2), {rows[0], rows[1]}, {100, cap, 100});
  const Solution g = encode(std::vector<int>{2, 3}, std::vector<double>{0.6, 0.7});
  Rng rng(10);
  int binding = 0;
  for (int k = 0; k < 200; ++k) {
    const Solution s = um4_candidate(inst, g, rng);
    const Allocation a = decode(s);
    EXPECT_EQ(a.n, (std::vector<int>{2, 3}));
    for (int i = 0; i < 2; ++i) {
      EXPECT_GE(a.r[i], inst.ranges().r_min);
      EXPECT_LE(a.r[i], inst.ranges().r_max);
    }
    const double gc = g_cost(inst, a.n, a.r);
    EXPECT_LE(gc, cap);
    if (std::abs(gc - cap) <= 1e-9 * cap) ++binding;
  }
  EXPECT_GE(binding, 195);
}

TEST(Um4, ChangesAtMostThreeCoordinates) {
  const ProblemInstance inst = bridge_instance();
  const Solution g = encode(std::vector<int>(5, 1), std::vector<double>(5, 0.6));
  Rng rng(15);
  for (int k = 0; k < 200; ++k) {
    const Solution s = um4_candidate(inst, g, rng);
    int changed = 0;
    for (int i = 0; i < 5; ++i) {
      if (s.x[i] != g.x[i]) ++changed;
      EXPECT_EQ(std::floor(s.x[i]), 1.0);
    }
    EXPECT_GE(changed, 1);
    EXPECT_LE(changed, 3);
  }
}

TEST(Um4, SingleCoordinate) {
  const ArcParams p{2.33e-5, 1.5, 1, 7};
  const ProblemInstance inst(oracle::series_network(1), {p}, {100, 10, 100});
  Rng rng(11);
  const Solution s = um4_candidate(inst, Solution{{2.6}}, rng);
  const Allocation a = decode(s);
  EXPECT_EQ(a.n[0], 2);
  EXPECT_LE(subsystem_cost(p, 2, a.r[0]), 10.0);
}

TEST(Um4, GbestUpdateOnlyImproves) {
  const ProblemInstance inst = bridge_instance();
  const ConnectedVectorSet cvs = enumerate_connected(inst.network());
  FitnessEvaluator eval(inst, cvs);
  Rng rng(12);
  Scored g = eval.score(encode(std::vector<int>{2, 2, 1, 2, 2}, std::vector<double>(5, 0.8)));
  for (int k = 0; k < 100; ++k) {
    const double before = g.eval.rp;
    um4_gbest_update(g, eval, rng);
    EXPECT_GE(g.eval.rp, before);
  }
  EXPECT_EQ(eval.calls(), 101u);
}

TEST(Um5, DriftOnlyWhenAtAttractors) {
  const PsoBounds b = PsoBounds::from_range(1.5, 10.999999, 0.25);
  EXPECT_NEAR(b.v_ub, 0.25 * 9.499999, 1e-12);
  EXPECT_EQ(b.v_lb, -b.v_ub);
  std::vector<double> x{4.0}, v{1.0};
  const std::vector<double> same{4.0};
  Rng rng(13);
  um5_pso_update(x, v, same, same, b, PsoParams{}, rng);
  EXPECT_DOUBLE_EQ(v[0], 0.9);
  EXPECT_DOUBLE_EQ(x[0], 4.9);
}

TEST(Um5, ClampsVelocityAndPosition) {
  const PsoBounds b = PsoBounds::from_range(1.5, 10.999999, 0.25);
  std::vector<double> x{10.5}, v{100.0};
  const std::vector<double> same{10.5};
  Rng rng(14);
  um5_pso_update(x, v, same, same, b, PsoParams{}, rng);
  EXPECT_EQ(v[0], b.v_ub);
  EXPECT_EQ(x[0], b.x_ub);
  std::vector<double> y{2.0}, w{-100.0};
  const std::vector<double> at{2.0};
  um5_pso_update(y, w, at, at, b, PsoParams{}, rng);
  EXPECT_EQ(w[0], b.v_lb);
  EXPECT_EQ(y[0], b.x_lb);
}

SolverSpec small_spec(Algorithm a, std::uint64_t seed = 1) {
  SolverSpec spec;
  spec.algorithm = a;
  spec.n_sol = 20;
  spec.n_gen = 40;
  spec.seed = seed;
  return spec;
}

TEST(RunSolver, MonotoneAndInRange) {
  const ProblemInstance inst = bridge_instance();
  const ConnectedVectorSet cvs = enumerate_connected(inst.network());
  for (Algorithm a : kAllAlgorithms) {
    std::vector<double> last_pbest;
    const RunResult res = run_solver(small_spec(a), inst, cvs, [&](const SwarmView& view) {
      if (!last_pbest.empty()) {
        for (std::size_t k = 0; k < view.personal_best.size(); ++k)
          EXPECT_GE(view.personal_best[k].eval.rp, last_pbest[k]);
      }
      last_pbest.clear();
      for (const Scored& s : view.personal_best) last_pbest.push_back(s.eval.rp);
      for (const Scored& s : view.solutions) {
        const Allocation d = decode(s.x);
        for (int i = 0; i < 5; ++i) {
          EXPECT_GE(d.n[i], 1);
          EXPECT_LE(d.n[i], 10);
          EXPECT_GE(d.r[i], 0.5);
          EXPECT_LT(d.r[i], 1.0);
        }
      }
    });
    ASSERT_EQ(res.best_rp.size(), 41u);
    for (std::size_t t = 1; t < res.best_rp.size(); ++t) EXPECT_GE(res.best_rp[t], res.best_rp[t - 1]) << to_string(a);
    EXPECT_EQ(res.best_rp.back(), res.best.eval.rp);
  }
}

TEST(RunSolver, ZeroGenerationsReturnsBestInitial) {
  const ProblemInstance inst = bridge_instance();
  const ConnectedVectorSet cvs = enumerate_connected(inst.network());
  SolverSpec spec = small_spec(Algorithm::kSsoa3);
  spec.n_gen = 0;
  double best_initial = -1;
  const RunResult res = run_solver(spec, inst, cvs, [&](const SwarmView& view) {
    EXPECT_EQ(view.generation, 0);
    for (const Scored& s : view.solutions) best_initial = std::max(best_initial, s.eval.rp);
  });
  EXPECT_EQ(res.best.eval.rp, best_initial);
  EXPECT_EQ(res.evaluations, 20u);
  ASSERT_EQ(res.stages.size(), 1u);
  EXPECT_EQ(res.stages[0].generation, 0);
}

TEST(RunSolver, DeterministicPerSeed) {
  const ProblemInstance inst = bridge_instance();
  const ConnectedVectorSet cvs = enumerate_connected(inst.network());
  for (Algorithm a : kAllAlgorithms) {
    const RunResult r1 = run_solver(small_spec(a, 77), inst, cvs);
    const RunResult r2 = run_solver(small_spec(a, 77), inst, cvs);
    EXPECT_EQ(r1.best.x, r2.best.x);
    EXPECT_EQ(r1.best_rp, r2.best_rp);
    const RunResult r3 = run_solver(small_spec(a, 78), inst, cvs);
    EXPECT_NE(r1.best_rp, r3.best_rp);
  }
}

TEST(RunSolver, EqualEvaluationCounts) {
  const ProblemInstance inst = bridge_instance();
  const ConnectedVectorSet cvs = enumerate_connected(inst.network());
  for (Algorithm a : kAllAlgorithms) EXPECT_EQ(run_solver(small_spec(a), inst, cvs).evaluations, 20u * 41u);
}

TEST(RunSolver, StageSnapshots) {
  const ProblemInstance inst = bridge_instance();
  const ConnectedVectorSet cvs = enumerate_connected(inst.network());
  const RunResult res = run_solver(small_spec(Algorithm::kSso), inst, cvs);
  ASSERT_EQ(res.stages.size(), 4u);
  const int gens[] = {10, 20, 30, 40};
  for (int s = 0; s < 4; ++s) {
    EXPECT_EQ(res.stages[s].stage, s);
    EXPECT_EQ(res.stages[s].generation, gens[s]);
    EXPECT_EQ(res.stages[s].best.eval.rp, res.best_rp[gens[s]]);
    EXPECT_LE(res.stages[s].mean_pbest_rp, res.stages[s].best.eval.rp);
  }
}

TEST(RunSolver, ConfigErrors) {
  const ProblemInstance inst = bridge_instance();
  const ConnectedVectorSet cvs = enumerate_connected(inst.network());
  SolverSpec spec = small_spec(Algorithm::kSso);
  spec.n_sol = 0;
  EXPECT_THROW(run_solver(spec, inst, cvs), ConfigError);
  spec = small_spec(Algorithm::kSso);
  spec.stage_generations = {10, 20, 30};
  EXPECT_THROW(run_solver(spec, inst, cvs), ConfigError);
  spec.stage_generations = {20, 10, 40};
  EXPECT_THROW(run_solver(spec, inst, cvs), ConfigError);
  spec = small_spec(Algorithm::kSso);
  spec.schedule.stages[2].cp = -0.1;
  EXPECT_THROW(run_solver(spec, inst, cvs), ConfigError);
  const ConnectedVectorSet other = enumerate_connected(oracle::series_network(5));
  EXPECT_THROW(run_solver(small_spec(Algorithm::kSso), inst, other), ConfigError);
}

}  // namespace
}  // namespace grrap
