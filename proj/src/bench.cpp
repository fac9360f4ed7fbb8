#include "grrap/bench.hpp"

#include <chrono>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "grrap/csv.hpp"
#include "grrap/parallel.hpp"

namespace grrap {

LoadedProblem load_problem(const std::string& network_path, const std::optional<std::string>& instance_path,
                           int arc_cap, const std::string& cache_dir) {
  Network net = load_network(network_path);
  ProblemInstance inst = instance_path ? load_instance(*instance_path, net) : synthesize_instance(net);
  ConnectedVectorSet cvs = connected_vectors_cached(net, cache_dir, arc_cap);
  return {std::filesystem::path(network_path).stem().string(), std::move(inst), std::move(cvs)};
}

void ExperimentConfig::validate() const {
  if (algorithms.empty()) throw ConfigError("no algorithms selected");
  if (n_run < 1) throw ConfigError("n_run must be at least 1");
  SolverSpec probe;
  probe.n_sol = n_sol;
  probe.n_gen = n_gen;
  probe.stage_generations = stage_generations;
  probe.schedule = schedule;
  probe.pso = pso;
  probe.validate();
}

ExperimentResult run_experiment(const std::vector<LoadedProblem>& problems, const ExperimentConfig& config) {
  config.validate();
  const std::size_t n_alg = config.algorithms.size();
  const std::size_t n_run = static_cast<std::size_t>(config.n_run);
  const std::size_t total = problems.size() * n_alg * n_run;

  ExperimentResult out;
  out.runs.resize(total);
  parallel_for(total, config.jobs, [&](std::size_t job) {
    const std::size_t p = job / (n_alg * n_run);
    const std::size_t a = (job / n_run) % n_alg;
    const std::size_t r = job % n_run;
    RunRecord& rec = out.runs[job];
    rec.problem = problems[p].id;
    rec.algorithm = config.algorithms[a];
    rec.seed = config.base_seed + r;

    SolverSpec spec;
    spec.algorithm = rec.algorithm;
    spec.schedule = config.schedule;
    spec.n_sol = config.n_sol;
    spec.n_gen = config.n_gen;
    spec.seed = rec.seed;
    spec.pso = config.pso;
    spec.stage_generations = config.stage_generations;

    const auto start = std::chrono::steady_clock::now();
    try {
      rec.result = run_solver(spec, problems[p].instance, problems[p].vectors);
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
    rec.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });

  for (const RunRecord& rec : out.runs) {
    if (!rec.result) {
      StageRow row;
      row.problem = rec.problem;
      row.algorithm = rec.algorithm;
      row.seed = rec.seed;
      row.runtime_s = rec.runtime_s;
      row.error = rec.error;
      out.rows.push_back(std::move(row));
      continue;
    }
    for (const StageSnapshot& snap : rec.result->stages) {
      const Evaluation& e = snap.best.eval;
      out.rows.push_back({rec.problem, rec.algorithm, rec.seed, snap.stage, snap.generation, e.rs, e.rp, e.gv, e.gc,
                          e.gw, e.feasible, rec.runtime_s, std::nullopt});
    }
  }
  return out;
}

void write_stage_csv(std::ostream& out, const std::vector<StageRow>& rows) {
  out << kStageCsvHeader << "\n";
  for (const StageRow& r : rows) {
    out << csv_field(r.problem) << "," << to_string(r.algorithm) << "," << r.seed << ",";
    if (r.error) {
      out << ",,,,,,," << csv_field("error: " + *r.error) << "," << format_double(r.runtime_s) << "\n";
      continue;
    }
    out << r.stage << "," << r.generation << "," << format_double(r.best_rs) << "," << format_double(r.best_rp)
        << "," << format_double(r.gv) << "," << format_double(r.gc) << "," << format_double(r.gw) << ","
        << (r.feasible ? 1 : 0) << "," << format_double(r.runtime_s) << "\n";
  }
}

void write_solution_dump(std::ostream& out, const std::vector<RunRecord>& runs,
                         const std::vector<LoadedProblem>& problems) {
  out << "problem,algorithm,seed,arc,n,r\n";
  for (const RunRecord& rec : runs) {
    if (!rec.result) continue;
    const VariableRanges* ranges = nullptr;
    for (const LoadedProblem& p : problems)
      if (p.id == rec.problem) ranges = &p.instance.ranges();
    const Allocation a = ranges ? decode(rec.result->best.x, *ranges) : decode(rec.result->best.x);
    for (std::size_t i = 0; i < a.n.size(); ++i)
      out << csv_field(rec.problem) << "," << to_string(rec.algorithm) << "," << rec.seed << "," << i + 1 << ","
          << a.n[i] << "," << format_double(a.r[i]) << "\n";
  }
}

std::vector<int> parse_stage_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("bad stage generation '" + item + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos)
      throw ConfigError("bad stage generation '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty stage list");
  return out;
}

}  // namespace grrap
