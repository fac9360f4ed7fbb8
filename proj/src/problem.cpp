#include "grrap/problem.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace grrap {

const BaseTable& reference_table() {
  static const BaseTable table{
      {{
          {2.330e-5, 1.5, 1, 7},
          {1.450e-5, 1.5, 2, 8},
          {0.541e-5, 1.5, 3, 8},
          {8.050e-5, 1.5, 4, 6},
          {1.950e-5, 1.5, 2, 9},
      }},
      {110, 175, 200},
  };
  return table;
}

ProblemInstance::ProblemInstance(Network network, std::vector<ArcParams> params, ResourceBounds bounds,
                                 VariableRanges ranges)
    : network_(std::move(network)), params_(std::move(params)), bounds_(bounds), ranges_(ranges) {
  if (static_cast<int>(params_.size()) != network_.arc_count())
    throw std::invalid_argument("instance has " + std::to_string(params_.size()) + " parameter rows for " +
                                std::to_string(network_.arc_count()) + " arcs");
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const ArcParams& p = params_[i];
    if (!(p.alpha > 0 && p.beta > 0 && p.wv2 > 0 && p.w > 0))
      throw std::invalid_argument("arc " + std::to_string(i + 1) + ": alpha, beta, wv2, w must be positive");
  }
  if (!(bounds_.volume > 0 && bounds_.cost > 0 && bounds_.weight > 0))
    throw std::invalid_argument("resource bounds must be positive");
  if (ranges_.n_min < 1 || ranges_.n_min > ranges_.n_max) throw std::invalid_argument("invalid redundancy range");
  if (!(ranges_.r_min > 0 && ranges_.r_min < ranges_.r_max && ranges_.r_max < 1))
    throw std::invalid_argument("reliability range must satisfy 0 < r_min < r_max < 1");
}

Solution encode(std::span<const int> n, std::span<const double> r, const VariableRanges& ranges) {
  if (n.size() != r.size()) throw std::invalid_argument("encode: n and r lengths differ");
  Solution s;
  s.x.reserve(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (n[i] < ranges.n_min || n[i] > ranges.n_max)
      throw std::invalid_argument("encode: n_" + std::to_string(i + 1) + " outside redundancy range");
    if (!(r[i] >= ranges.r_min && r[i] <= ranges.r_max))
      throw std::invalid_argument("encode: r_" + std::to_string(i + 1) + " outside reliability range");
    s.x.push_back(n[i] + r[i]);
  }
  return s;
}

Allocation decode(const Solution& s, const VariableRanges& ranges) {
  Allocation a;
  a.n.reserve(s.x.size());
  a.r.reserve(s.x.size());
  for (double x : s.x) {
    if (std::isnan(x)) {
      a.n.push_back(ranges.n_min);
      a.r.push_back(ranges.r_min);
      continue;
    }
    const double whole = std::floor(x);
    const double frac = std::isfinite(x) ? x - whole : 0.0;
    const double n = std::clamp(whole, static_cast<double>(ranges.n_min), static_cast<double>(ranges.n_max));
    a.n.push_back(static_cast<int>(n));
    a.r.push_back(std::clamp(frac, ranges.r_min, ranges.r_max));
  }
  return a;
}

namespace {

void check_sizes(std::size_t params, std::size_t n) {
  if (params != n)
    throw std::invalid_argument("allocation length " + std::to_string(n) + " != subsystem count " +
                                std::to_string(params));
}

}  // namespace

double g_volume(std::span<const ArcParams> params, std::span<const int> n) {
  check_sizes(params.size(), n.size());
  double sum = 0;
  for (std::size_t i = 0; i < n.size(); ++i) sum += params[i].wv2 * n[i] * n[i];
  return sum;
}

double subsystem_cost(const ArcParams& p, int n, double r) {
  if (!(r > 0.0 && r < 1.0)) throw std::domain_error("cost undefined for reliability " + format_double(r));
  return p.alpha * std::pow(-1000.0 / std::log(r), p.beta) * (n + std::exp(n / 4.0));
}

double g_cost(std::span<const ArcParams> params, std::span<const int> n, std::span<const double> r) {
  check_sizes(params.size(), n.size());
  check_sizes(params.size(), r.size());
  double sum = 0;
  for (std::size_t i = 0; i < n.size(); ++i) sum += subsystem_cost(params[i], n[i], r[i]);
  return sum;
}

double g_weight(std::span<const ArcParams> params, std::span<const int> n) {
  check_sizes(params.size(), n.size());
  double sum = 0;
  for (std::size_t i = 0; i < n.size(); ++i) sum += params[i].w * n[i] * std::exp(n[i] / 4.0);
  return sum;
}

double subsystem_reliability(int n, double r) { return 1.0 - std::pow(1.0 - r, n); }

double penalize(double rs, double gv, double gc, double gw, const ResourceBounds& bounds) {
  double ratio = 1.0;
  if (gv > 0) ratio = std::min(ratio, bounds.volume / gv);
  if (gc > 0) ratio = std::min(ratio, bounds.cost / gc);
  if (gw > 0) ratio = std::min(ratio, bounds.weight / gw);
  return rs * ratio * ratio * ratio;
}

Evaluation penalized_reliability(const ProblemInstance& inst, const ConnectedVectorSet& cvs, const Allocation& a) {
  if (cvs.network_hash() != inst.network().content_hash() || cvs.arc_count() != inst.size())
    throw std::invalid_argument("connected-vector set belongs to a different network");
  const int m = inst.size();
  check_sizes(m, a.n.size());
  check_sizes(m, a.r.size());
  std::vector<double> p(m);
  for (int i = 0; i < m; ++i) p[i] = subsystem_reliability(a.n[i], a.r[i]);
  Evaluation e;
  e.rs = reliability(cvs, p);
  e.gv = g_volume(inst, a.n);
  e.gc = g_cost(inst, a.n, a.r);
  e.gw = g_weight(inst, a.n);
  const ResourceBounds& b = inst.bounds();
  e.feasible = e.gv <= b.volume && e.gc <= b.cost && e.gw <= b.weight;
  e.rp = e.feasible ? e.rs : penalize(e.rs, e.gv, e.gc, e.gw, b);
  return e;
}

Evaluation penalized_reliability(const ProblemInstance& inst, const ConnectedVectorSet& cvs, const Solution& s) {
  return penalized_reliability(inst, cvs, decode(s, inst.ranges()));
}

ProblemInstance synthesize_instance(const Network& net, const BaseTable& base) {
  const int m = net.arc_count();
  std::vector<ArcParams> params;
  params.reserve(m);
  for (int i = 1; i <= m; ++i) {
    const int row = (i % 5 == 0) ? 5 : i % 5;
    params.push_back(base.rows[row - 1]);
  }
  const ResourceBounds b{m * base.bounds.volume / 5, m * base.bounds.cost / 5, m * base.bounds.weight / 5};
  return ProblemInstance(net, std::move(params), b);
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

double read_double(std::istringstream& in, int line_no, const char* what) {
  std::string tok;
  if (!(in >> tok)) throw ParseError(line_no, std::string("expected number for ") + what);
  double v = 0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || !std::isfinite(v))
    throw ParseError(line_no, std::string("bad number '") + tok + "' for " + what);
  return v;
}

}  // namespace

ProblemInstance parse_instance(std::string_view text, const Network& net) {
  const int m = net.arc_count();
  std::vector<std::optional<ArcParams>> rows(m);
  std::optional<ResourceBounds> bounds;
  VariableRanges ranges;
  std::istringstream doc{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(doc, raw)) {
    ++line_no;
    auto hash = raw.find('#');
    std::istringstream in(hash == std::string::npos ? raw : raw.substr(0, hash));
    std::string key;
    if (!(in >> key)) continue;
    if (key == "param") {
      long long id = 0;
      if (!(in >> id)) throw ParseError(line_no, "expected arc id");
      if (id < 1 || id > m)
        throw ParseError(line_no, "arc id " + std::to_string(id) + " outside 1.." + std::to_string(m));
      if (rows[id - 1]) throw ParseError(line_no, "duplicate param for arc " + std::to_string(id));
      ArcParams p;
      p.alpha = read_double(in, line_no, "alpha");
      p.beta = read_double(in, line_no, "beta");
      p.wv2 = read_double(in, line_no, "wv2");
      p.w = read_double(in, line_no, "w");
      if (!(p.alpha > 0 && p.beta > 0 && p.wv2 > 0 && p.w > 0))
        throw ParseError(line_no, "param values must be positive");
      rows[id - 1] = p;
    } else if (key == "bounds") {
      if (bounds) throw ParseError(line_no, "duplicate bounds line");
      ResourceBounds b;
      b.volume = read_double(in, line_no, "volume bound");
      b.cost = read_double(in, line_no, "cost bound");
      b.weight = read_double(in, line_no, "weight bound");
      bounds = b;
    } else if (key == "rrange") {
      ranges.r_min = read_double(in, line_no, "r_min");
      ranges.r_max = read_double(in, line_no, "r_max");
      if (!(ranges.r_min > 0 && ranges.r_min < ranges.r_max && ranges.r_max < 1))
        throw ParseError(line_no, "rrange must satisfy 0 < r_min < r_max < 1");
    } else {
      throw ParseError(line_no, "unknown keyword '" + key + "'");
    }
    std::string extra;
    if (in >> extra) throw ParseError(line_no, "unexpected trailing token '" + extra + "'");
  }
  std::vector<ArcParams> params;
  params.reserve(m);
  for (int i = 0; i < m; ++i) {
    if (!rows[i]) throw ParseError(0, "missing param line for arc " + std::to_string(i + 1));
    params.push_back(*rows[i]);
  }
  if (!bounds) throw ParseError(0, "missing bounds line");
  try {
    return ProblemInstance(net, std::move(params), *bounds, ranges);
  } catch (const std::invalid_argument& e) {
    throw ParseError(0, e.what());
  }
}

ProblemInstance load_instance(const std::string& path, const Network& net) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open instance file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_instance(buf.str(), net);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + e.what());
  }
}

std::string format_instance(const ProblemInstance& inst) {
  std::ostringstream out;
  out << "# param <arc> <alpha> <beta> <wv2> <w>\n";
  for (int i = 0; i < inst.size(); ++i) {
    const ArcParams& p = inst.params()[i];
    out << "param " << i + 1 << " " << format_double(p.alpha) << " " << format_double(p.beta) << " "
        << format_double(p.wv2) << " " << format_double(p.w) << "\n";
  }
  const ResourceBounds& b = inst.bounds();
  out << "bounds " << format_double(b.volume) << " " << format_double(b.cost) << " " << format_double(b.weight)
      << "\n";
  out << "rrange " << format_double(inst.ranges().r_min) << " " << format_double(inst.ranges().r_max) << "\n";
  return out.str();
}

}  // namespace grrap
