#include "grrap/ss3oa.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "grrap/csv.hpp"
#include "grrap/parallel.hpp"

namespace grrap {

OADesign OADesign::standard() {
  return {
      {{
          {1, 1, 1},
          {1, 2, 2},
          {1, 3, 3},
          {2, 1, 2},
          {2, 2, 3},
          {2, 3, 1},
          {3, 1, 3},
          {3, 2, 1},
          {3, 3, 2},
      }},
      {{
          {0.6, 0.4, 0.2},
          {0.30, 0.25, 0.0},
          {0.30, 0.20, 0.0},
      }},
  };
}

bool OADesign::orthogonal() const noexcept {
  for (int f = 0; f < 3; ++f) {
    std::array<int, 3> count{};
    for (const auto& row : levels) {
      if (row[f] < 1 || row[f] > 3) return false;
      ++count[row[f] - 1];
    }
    for (int c : count)
      if (c != 3) return false;
  }
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      std::array<std::array<int, 3>, 3> pairs{};
      for (const auto& row : levels) ++pairs[row[a] - 1][row[b] - 1];
      for (const auto& line : pairs)
        for (int c : line)
          if (c != 1) return false;
    }
  }
  return true;
}

TrySetting OADesign::setting(const std::array<int, 3>& level) const {
  for (int l : level)
    if (l < 1 || l > 3) throw ConfigError("design level outside 1..3");
  return {values[0][level[0] - 1], values[1][level[1] - 1], values[2][level[2] - 1]};
}

std::array<TrySetting, 9> derive_try_table(const OADesign& design) {
  std::array<TrySetting, 9> out;
  for (std::size_t t = 0; t < 9; ++t) out[t] = design.setting(design.levels[t]);
  return out;
}

LevelAverages average_by_level(const std::vector<double>& try_fitness, const OADesign& design) {
  if (try_fitness.size() != design.levels.size())
    throw std::invalid_argument("incomplete design: expected " + std::to_string(design.levels.size()) +
                                " try values, got " + std::to_string(try_fitness.size()));
  LevelAverages sum{};
  std::array<std::array<int, 3>, 3> count{};
  for (std::size_t t = 0; t < try_fitness.size(); ++t) {
    if (!std::isfinite(try_fitness[t]))
      throw std::invalid_argument("incomplete design: try " + std::to_string(t) + " has no fitness");
    for (int f = 0; f < 3; ++f) {
      const int l = design.levels[t][f] - 1;
      sum[f][l] += try_fitness[t];
      ++count[f][l];
    }
  }
  for (int f = 0; f < 3; ++f)
    for (int l = 0; l < 3; ++l) {
      if (count[f][l] == 0) throw std::invalid_argument("design never uses a level");
      sum[f][l] /= count[f][l];
    }
  return sum;
}

std::array<int, 3> best_levels(const LevelAverages& averages) {
  std::array<int, 3> out{};
  for (int f = 0; f < 3; ++f) {
    int best = 0;
    for (int l = 1; l < 3; ++l)
      if (averages[f][l] > averages[f][best]) best = l;
    out[f] = best + 1;
  }
  return out;
}

ScheduleChoice select_schedule(const std::array<LevelAverages, 4>& per_stage, const OADesign& design) {
  ScheduleChoice c;
  for (int s = 0; s < 4; ++s) {
    c.levels[s] = best_levels(per_stage[s]);
    c.schedule.stages[s] = design.setting(c.levels[s]);
  }
  return c;
}

std::array<std::vector<double>, 4> aggregate_rows(const std::vector<TuningRow>& rows, TuningFitness fitness) {
  // stage -> try -> problem -> (sum, count)
  std::map<int, std::map<int, std::map<std::string, std::pair<double, int>>>> acc;
  int max_try = -1;
  for (const TuningRow& r : rows) {
    if (r.stage < 0 || r.stage > 3) throw std::invalid_argument("tuning row with stage outside 0..3");
    auto& cell = acc[r.stage][r.try_index][r.problem];
    cell.first += fitness == TuningFitness::kBestG ? r.best_rp : r.mean_pbest_rp;
    ++cell.second;
    max_try = std::max(max_try, r.try_index);
  }
  std::array<std::vector<double>, 4> out;
  for (int s = 0; s < 4; ++s) {
    out[s].assign(max_try + 1, std::nan(""));
    for (const auto& [t, problems] : acc[s]) {
      double total = 0;
      for (const auto& [name, cell] : problems) total += cell.first / cell.second;
      out[s][t] = total / static_cast<double>(problems.size());
    }
  }
  return out;
}

TuningReport run_tuning(const std::vector<TuningProblem>& problems, const OADesign& design, const SolverSpec& base,
                        const TuningOptions& options) {
  if (problems.empty()) throw ConfigError("tuning needs at least one problem");
  if (options.runs_per_problem < 1) throw ConfigError("runs per problem must be at least 1");
  if (!design.orthogonal()) throw ConfigError("design is not an orthogonal array");
  if (base.resolved_stages().size() != 4) throw ConfigError("tuning needs exactly four stage generations");

  const auto tries = derive_try_table(design);
  const std::size_t n_try = tries.size();
  const std::size_t n_prob = problems.size();
  const std::size_t n_run = static_cast<std::size_t>(options.runs_per_problem);
  const std::size_t total = n_try * n_prob * n_run;

  std::vector<std::vector<TuningRow>> per_job(total);
  parallel_for(total, options.jobs, [&](std::size_t job) {
    const std::size_t t = job / (n_prob * n_run);
    const std::size_t p = (job / n_run) % n_prob;
    const std::size_t r = job % n_run;
    SolverSpec spec = base;
    spec.algorithm = Algorithm::kSsoa3;
    spec.schedule = StageSchedule::uniform(tries[t]);
    spec.seed = options.base_seed + r;
    RunResult res;
    try {
      res = run_solver(spec, *problems[p].instance, *problems[p].vectors);
    } catch (const std::exception& e) {
      throw std::runtime_error("try " + std::to_string(t) + ", problem '" + problems[p].name + "', seed " +
                               std::to_string(spec.seed) + ": " + e.what());
    }
    for (const StageSnapshot& snap : res.stages)
      per_job[job].push_back({static_cast<int>(t), problems[p].name, spec.seed, snap.stage, snap.best.eval.rs,
                              snap.best.eval.rp, snap.mean_pbest_rp});
  });

  TuningReport report;
  report.solver_invocations = total;
  for (auto& rows : per_job)
    for (auto& row : rows) report.rows.push_back(std::move(row));
  report.try_fitness = aggregate_rows(report.rows, options.fitness);
  for (int s = 0; s < 4; ++s) report.level_averages[s] = average_by_level(report.try_fitness[s], design);
  report.choice = select_schedule(report.level_averages, design);
  return report;
}

void write_tuning_csv(std::ostream& out, const std::vector<TuningRow>& rows) {
  out << "try,problem,seed,stage,best_rs,best_rp\n";
  for (const TuningRow& r : rows)
    out << r.try_index << "," << csv_field(r.problem) << "," << r.seed << "," << r.stage << ","
        << format_double(r.best_rs) << "," << format_double(r.best_rp) << "\n";
}

std::string format_schedule(const StageSchedule& schedule) {
  std::ostringstream out;
  out << "# stage <s> <c_g> <c_p> <c_w>\n";
  for (int s = 0; s < 4; ++s) {
    const TrySetting& t = schedule.stages[s];
    out << "stage " << s << " " << format_double(t.cg) << " " << format_double(t.cp) << " " << format_double(t.cw)
        << "  # C_g=" << format_double(t.Cg()) << " C_p=" << format_double(t.Cp())
        << " C_w=" << format_double(t.Cw()) << "\n";
  }
  return out.str();
}

StageSchedule parse_schedule(std::string_view text) {
  StageSchedule out;
  std::array<bool, 4> seen{};
  std::istringstream doc{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(doc, raw)) {
    ++line_no;
    auto hash = raw.find('#');
    std::istringstream in(hash == std::string::npos ? raw : raw.substr(0, hash));
    std::string key;
    if (!(in >> key)) continue;
    if (key != "stage") throw ParseError(line_no, "unknown keyword '" + key + "'");
    int s = -1;
    TrySetting t;
    if (!(in >> s >> t.cg >> t.cp >> t.cw)) throw ParseError(line_no, "expected: stage <s> <c_g> <c_p> <c_w>");
    std::string extra;
    if (in >> extra) throw ParseError(line_no, "unexpected trailing token '" + extra + "'");
    if (s < 0 || s > 3) throw ParseError(line_no, "stage index outside 0..3");
    if (seen[s]) throw ParseError(line_no, "duplicate stage " + std::to_string(s));
    try {
      t.validate();
    } catch (const ConfigError& e) {
      throw ParseError(line_no, e.what());
    }
    seen[s] = true;
    out.stages[s] = t;
  }
  for (int s = 0; s < 4; ++s)
    if (!seen[s]) throw ParseError(0, "schedule is missing stage " + std::to_string(s));
  return out;
}

StageSchedule load_schedule(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open schedule file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_schedule(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + e.what());
  }
}

}  // namespace grrap
