#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "grrap/bat.hpp"
#include "grrap/netmodel.hpp"

namespace grrap {

/// Per-subsystem constants. `alpha` is the actual coefficient (tabulated
/// data lists alpha * 1e5).
struct ArcParams {
  double alpha = 0;
  double beta = 0;
  double wv2 = 0;  // w_i * v_i^2
  double w = 0;
};

struct ResourceBounds {
  double volume = 0;
  double cost = 0;
  double weight = 0;
};

/// Box for the redundancy (integer) and reliability (fractional) variables.
struct VariableRanges {
  int n_min = 1;
  int n_max = 10;
  double r_min = 0.5;
  double r_max = 1.0 - 1e-6;
};

/// Five-subsystem reference data (series and bridge benchmarks).
struct BaseTable {
  std::array<ArcParams, 5> rows;
  ResourceBounds bounds;
};

const BaseTable& reference_table();

class ProblemInstance {
 public:
  ProblemInstance(Network network, std::vector<ArcParams> params, ResourceBounds bounds,
                  VariableRanges ranges = {});

  const Network& network() const noexcept { return network_; }
  const std::vector<ArcParams>& params() const noexcept { return params_; }
  const ResourceBounds& bounds() const noexcept { return bounds_; }
  const VariableRanges& ranges() const noexcept { return ranges_; }
  int size() const noexcept { return static_cast<int>(params_.size()); }

 private:
  Network network_;
  std::vector<ArcParams> params_;
  ResourceBounds bounds_;
  VariableRanges ranges_;
};

/// Affixed solution: x_i = n_i + r_i.
struct Solution {
  std::vector<double> x;
  bool operator==(const Solution&) const = default;
};

struct Allocation {
  std::vector<int> n;
  std::vector<double> r;
};

struct Evaluation {
  double rs = 0;  // system reliability
  double rp = 0;  // penalized reliability
  double gv = 0;
  double gc = 0;
  double gw = 0;
  bool feasible = false;
};

Solution encode(std::span<const int> n, std::span<const double> r, const VariableRanges& ranges = {});

/// Total: integer part and fractional part are clamped into the ranges. This
/// is the only repair step applied to swarm output.
Allocation decode(const Solution& s, const VariableRanges& ranges = {});

double g_volume(std::span<const ArcParams> params, std::span<const int> n);
/// Throws std::domain_error unless every r_i lies strictly inside (0, 1).
double g_cost(std::span<const ArcParams> params, std::span<const int> n, std::span<const double> r);
double g_weight(std::span<const ArcParams> params, std::span<const int> n);

/// Cost contribution of one subsystem.
double subsystem_cost(const ArcParams& p, int n, double r);

inline double g_volume(const ProblemInstance& inst, std::span<const int> n) { return g_volume(inst.params(), n); }
inline double g_cost(const ProblemInstance& inst, std::span<const int> n, std::span<const double> r) {
  return g_cost(inst.params(), n, r);
}
inline double g_weight(const ProblemInstance& inst, std::span<const int> n) { return g_weight(inst.params(), n); }

/// Active parallel redundancy: 1 - (1 - r)^n.
double subsystem_reliability(int n, double r);

/// rs * min(V/gv, C/gc, W/gw, 1)^3.
double penalize(double rs, double gv, double gc, double gw, const ResourceBounds& bounds);

Evaluation penalized_reliability(const ProblemInstance& inst, const ConnectedVectorSet& cvs, const Solution& s);
Evaluation penalized_reliability(const ProblemInstance& inst, const ConnectedVectorSet& cvs, const Allocation& a);

/// Arc i takes reference row ((i - 1) mod 5) + 1; each bound scales by m / 5.
ProblemInstance synthesize_instance(const Network& net, const BaseTable& base = reference_table());

// Instance file, one directive per line, '#' comments:
//   param <i> <alpha> <beta> <wv2> <w>
//   bounds <V> <C> <W>
//   rrange <r_min> <r_max>          (optional)
ProblemInstance parse_instance(std::string_view text, const Network& net);
ProblemInstance load_instance(const std::string& path, const Network& net);
std::string format_instance(const ProblemInstance& inst);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

}  // namespace grrap
