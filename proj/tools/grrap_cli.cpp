// grrap: exact network reliability and redundancy-allocation experiments.
//
//   grrap reliability --network bridge.net 0.95 0.90 0.85 0.80 0.75
//   grrap solve --network bridge.net --algo ssoa3 --algo pso --nrun 10 --out runs.csv
//   grrap tune --network a.net --network b.net --out tuning.csv
//   grrap synthesize --network net9.net --out net9.inst
//
// Exit codes: 0 success, 1 usage error, 2 input error, 3 runtime error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "grrap/bat.hpp"
#include "grrap/bench.hpp"
#include "grrap/parallel.hpp"
#include "grrap/problem.hpp"
#include "grrap/ss3oa.hpp"
#include "grrap/swarm.hpp"

namespace {

constexpr int kUsageError = 1;
constexpr int kInputError = 2;
constexpr int kRuntimeError = 3;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void warn_cap(int cap) {
  if (cap > grrap::kDefaultArcCap)
    std::cerr << "note: arc cap raised to " << cap << "; a network that large enumerates up to 2^" << cap << " = "
              << std::ldexp(1.0, cap) << " vectors\n";
}

std::vector<double> parse_probabilities(const std::vector<std::string>& tokens) {
  std::vector<double> p;
  for (std::string tok : tokens) {
    for (char& c : tok)
      if (c == ',') c = ' ';
    std::istringstream in(tok);
    std::string item;
    while (in >> item) {
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(item, &used);
      } catch (const std::exception&) {
        throw InputError("bad probability '" + item + "'");
      }
      if (used != item.size()) throw InputError("bad probability '" + item + "'");
      p.push_back(v);
    }
  }
  return p;
}

std::string format_reliability(double r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, r >= 1e-3 ? "%.15f" : "%.15e", r);
  return buf;
}

std::vector<grrap::LoadedProblem> load_problems(const std::vector<std::string>& networks,
                                                const std::vector<std::string>& instances, int cap,
                                                const std::string& cache_dir) {
  if (networks.empty()) throw InputError("at least one --network is required");
  if (!instances.empty() && instances.size() != networks.size())
    throw InputError("--instance must be given once per --network or not at all");
  std::vector<grrap::LoadedProblem> out;
  for (std::size_t i = 0; i < networks.size(); ++i) {
    std::optional<std::string> inst;
    if (!instances.empty()) inst = instances[i];
    out.push_back(grrap::load_problem(networks[i], inst, cap, cache_dir));
  }
  return out;
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path, std::ios::trunc);
  if (!file) throw InputError("cannot write '" + path + "'");
  return file;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact binary-state network reliability and redundancy allocation solvers"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  int cap = grrap::kDefaultArcCap;
  std::string cache_dir;

  // reliability
  auto* rel = app.add_subcommand("reliability", "Exact source-sink reliability for given arc probabilities");
  std::string rel_network;
  std::vector<std::string> rel_probs;
  rel->add_option("--network", rel_network, "Network file")->required();
  rel->add_option("probabilities", rel_probs, "Arc probabilities (space or comma separated)")->required();
  rel->add_option("--cap", cap, "Largest arc count to enumerate");

  // solve
  auto* solve = app.add_subcommand("solve", "Seeded multi-run experiments, staged CSV output");
  std::vector<std::string> networks, instances, algos;
  int nsol = 100, ngen = 1000, nrun = 1, jobs = grrap::default_jobs();
  std::uint64_t seed = 1;
  std::string schedule_path, stages_text, out_path, dump_path;
  std::optional<int> try_index;
  solve->add_option("--network", networks, "Network file (repeatable)")->required();
  solve->add_option("--instance", instances, "Instance file per network (default: synthesized)");
  solve->add_option("--algo", algos, "ssoa3|sso|bso|nsso|ifsso|psso|pso (repeatable)");
  solve->add_option("--nsol", nsol, "Solutions per swarm");
  solve->add_option("--ngen", ngen, "Generations");
  solve->add_option("--nrun", nrun, "Runs per problem and algorithm");
  solve->add_option("--seed", seed, "Base seed; run k uses seed + k");
  auto* sched_opt = solve->add_option("--schedule", schedule_path, "Stage schedule file");
  solve->add_option("--try", try_index, "Use one design try (0..8) for every stage")->excludes(sched_opt);
  solve->add_option("--stages", stages_text, "Stage generations, e.g. 250,500,750,1000");
  solve->add_option("--out", out_path, "CSV output (default stdout)");
  solve->add_option("--dump", dump_path, "Final solutions file (default <out>.solutions.csv)");
  solve->add_option("--jobs", jobs, "Worker threads");
  solve->add_option("--cap", cap, "Largest arc count to enumerate");
  solve->add_option("--cache-dir", cache_dir, "Directory for connected-vector caches");

  // tune
  auto* tune = app.add_subcommand("tune", "Orthogonal-array tuning of the SSO branch probabilities");
  std::vector<std::string> tune_networks, tune_instances;
  int tune_nsol = 100, tune_ngen = 1000, tune_nrun = 5;
  std::uint64_t tune_seed = 1;
  std::string tune_stages, tune_out = "tuning.csv", tune_schedule_out, fitness = "best";
  tune->add_option("--network", tune_networks, "Network file (repeatable)")->required();
  tune->add_option("--instance", tune_instances, "Instance file per network");
  tune->add_option("--nsol", tune_nsol, "Solutions per swarm");
  tune->add_option("--ngen", tune_ngen, "Generations");
  tune->add_option("--nrun", tune_nrun, "Runs per try and problem");
  tune->add_option("--seed", tune_seed, "Base seed; run k uses seed + k");
  tune->add_option("--stages", tune_stages, "Four stage generations");
  tune->add_option("--out", tune_out, "Tuning report CSV");
  tune->add_option("--schedule-out", tune_schedule_out, "Schedule file (default <out>.schedule)");
  tune->add_option("--fitness", fitness, "Aggregate best (global best) or mean (mean personal best)")
      ->check(CLI::IsMember({"best", "mean"}));
  tune->add_option("--jobs", jobs, "Worker threads");
  tune->add_option("--cap", cap, "Largest arc count to enumerate");
  tune->add_option("--cache-dir", cache_dir, "Directory for connected-vector caches");

  // synthesize
  auto* synth = app.add_subcommand("synthesize", "Write the synthesized instance file for a network");
  std::string synth_network, synth_out;
  synth->add_option("--network", synth_network, "Network file")->required();
  synth->add_option("--out", synth_out, "Instance file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsageError;
  }

  try {
    warn_cap(cap);
    if (rel->parsed()) {
      const grrap::Network net = grrap::load_network(rel_network);
      const std::vector<double> p = parse_probabilities(rel_probs);
      if (static_cast<int>(p.size()) != net.arc_count())
        throw InputError("expected " + std::to_string(net.arc_count()) + " probabilities, got " +
                         std::to_string(p.size()));
      for (double v : p)
        if (!(v >= 0 && v <= 1)) throw InputError("probabilities must lie in [0, 1]");
      const grrap::ConnectedVectorSet cvs = grrap::connected_vectors_cached(net, cache_dir, cap);
      std::cout << format_reliability(grrap::reliability(cvs, p)) << "\n";
      return 0;
    }

    if (synth->parsed()) {
      const grrap::Network net = grrap::load_network(synth_network);
      std::ofstream file;
      open_output(synth_out, file) << grrap::format_instance(grrap::synthesize_instance(net));
      return 0;
    }

    if (solve->parsed()) {
      grrap::ExperimentConfig cfg;
      if (!algos.empty()) {
        cfg.algorithms.clear();
        for (const std::string& tag : algos) {
          auto a = grrap::parse_algorithm(tag);
          if (!a) throw grrap::ConfigError("unknown algorithm '" + tag + "'");
          cfg.algorithms.push_back(*a);
        }
      }
      cfg.n_sol = nsol;
      cfg.n_gen = ngen;
      cfg.n_run = nrun;
      cfg.base_seed = seed;
      cfg.jobs = jobs;
      if (!stages_text.empty()) cfg.stage_generations = grrap::parse_stage_list(stages_text);
      if (!schedule_path.empty()) cfg.schedule = grrap::load_schedule(schedule_path);
      if (try_index) {
        if (*try_index < 0 || *try_index > 8) throw grrap::ConfigError("--try must be in 0..8");
        cfg.schedule = grrap::StageSchedule::uniform(grrap::derive_try_table(grrap::OADesign::standard())[*try_index]);
      }
      cfg.validate();
      const auto problems = load_problems(networks, instances, cap, cache_dir);
      const grrap::ExperimentResult res = grrap::run_experiment(problems, cfg);

      std::ofstream file;
      grrap::write_stage_csv(open_output(out_path, file), res.rows);
      if (dump_path.empty() && !out_path.empty() && out_path != "-") dump_path = out_path + ".solutions.csv";
      if (!dump_path.empty()) {
        std::ofstream dump(dump_path, std::ios::trunc);
        if (!dump) throw InputError("cannot write '" + dump_path + "'");
        grrap::write_solution_dump(dump, res.runs, problems);
      }
      int failed = 0;
      for (const auto& run : res.runs)
        if (!run.result) {
          ++failed;
          std::cerr << "run failed: " << run.problem << " " << grrap::to_string(run.algorithm) << " seed "
                    << run.seed << ": " << run.error << "\n";
        }
      return failed == 0 ? 0 : kRuntimeError;
    }

    if (tune->parsed()) {
      grrap::SolverSpec base;
      base.n_sol = tune_nsol;
      base.n_gen = tune_ngen;
      if (!tune_stages.empty()) base.stage_generations = grrap::parse_stage_list(tune_stages);
      base.validate();
      const auto problems = load_problems(tune_networks, tune_instances, cap, cache_dir);
      std::vector<grrap::TuningProblem> views;
      for (const auto& p : problems) views.push_back({p.id, &p.instance, &p.vectors});
      grrap::TuningOptions opt;
      opt.runs_per_problem = tune_nrun;
      opt.base_seed = tune_seed;
      opt.fitness = fitness == "mean" ? grrap::TuningFitness::kMeanPBest : grrap::TuningFitness::kBestG;
      opt.jobs = jobs;
      const grrap::TuningReport rep = grrap::run_tuning(views, grrap::OADesign::standard(), base, opt);

      std::ofstream csv;
      grrap::write_tuning_csv(open_output(tune_out, csv), rep.rows);
      if (tune_schedule_out.empty()) tune_schedule_out = tune_out + ".schedule";
      std::ofstream sched(tune_schedule_out, std::ios::trunc);
      if (!sched) throw InputError("cannot write '" + tune_schedule_out + "'");
      sched << grrap::format_schedule(rep.choice.schedule);

      static const char* kFactor[3] = {"c_g", "c_p", "c_w"};
      std::cerr << rep.solver_invocations << " solver runs\n";
      for (int s = 0; s < 4; ++s) {
        std::cerr << "stage " << s << ":";
        for (int f = 0; f < 3; ++f) {
          std::cerr << "  " << kFactor[f] << " [";
          for (int l = 0; l < 3; ++l)
            std::cerr << (l ? " " : "") << grrap::format_double(rep.level_averages[s][f][l]);
          std::cerr << "] -> " << rep.choice.levels[s][f];
        }
        std::cerr << "\n";
      }
      return 0;
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const grrap::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const grrap::ArcCapExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const grrap::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return 0;
}
