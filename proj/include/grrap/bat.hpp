#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "grrap/netmodel.hpp"

namespace grrap {

inline constexpr int kDefaultArcCap = 30;

/// Refusal to enumerate 2^m vectors when m exceeds the configured cap.
class ArcCapExceeded : public std::length_error {
 public:
  ArcCapExceeded(int arcs, int cap);
  int arcs() const noexcept { return arcs_; }
  int cap() const noexcept { return cap_; }

 private:
  int arcs_;
  int cap_;
};

/// Binary-addition successor: the first 0 (from coordinate 1) becomes 1 and
/// every 1 before it becomes 0. Returns false, leaving x untouched, when x is
/// all ones.
bool next_vector(StateVector& x);

/// Every state vector whose up arcs connect source to sink, in binary-addition
/// order, packed one bit per arc (bit i-1 = arc i).
class ConnectedVectorSet {
 public:
  ConnectedVectorSet(std::uint64_t network_hash, int arc_count, std::uint64_t visited,
                     std::vector<std::uint64_t> vectors);

  std::uint64_t network_hash() const noexcept { return network_hash_; }
  int arc_count() const noexcept { return arc_count_; }
  /// How many vectors the enumeration visited (2^arc_count).
  std::uint64_t visited() const noexcept { return visited_; }
  std::size_t size() const noexcept { return vectors_.size(); }
  const std::vector<std::uint64_t>& packed() const noexcept { return vectors_; }
  StateVector vector(std::size_t k) const { return unpack_state(vectors_.at(k), arc_count_); }

 private:
  std::uint64_t network_hash_;
  int arc_count_;
  std::uint64_t visited_;
  std::vector<std::uint64_t> vectors_;
};

ConnectedVectorSet enumerate_connected(const Network& net, int arc_cap = kDefaultArcCap);

/// Exact source-sink reliability: sum over the stored vectors of the product
/// of p_i (arc up) or 1 - p_i (arc down).
double reliability(const ConnectedVectorSet& cvs, std::span<const double> p);

// Cache files are plain text:
//   grrap-connected-vectors 1
//   hash <16 hex digits>
//   arcs <m>
//   visited <2^m>
//   count <k>
//   followed by k lines, one hex mask per vector, in enumeration order.
inline constexpr int kCacheFormatVersion = 1;

void save_connected_vectors(const std::filesystem::path& file, const ConnectedVectorSet& cvs);
/// Empty when the file is missing, of another version, or keyed to another network.
std::optional<ConnectedVectorSet> load_connected_vectors(const std::filesystem::path& file,
                                                         const Network& net);

/// Loads `<dir>/<hash>.cvs` if present and valid, otherwise enumerates and
/// writes it. An empty dir disables caching.
ConnectedVectorSet connected_vectors_cached(const Network& net, const std::filesystem::path& dir,
                                            int arc_cap = kDefaultArcCap);

}  // namespace grrap
