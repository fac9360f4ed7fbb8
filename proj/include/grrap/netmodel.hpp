#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace grrap {

/// One binary-state arc. Node ids are 1-based, as in network files.
struct Arc {
  int tail = 0;
  int head = 0;
};

/// Coordinate i holds the state of arc i (0 = down, 1 = up).
using StateVector = std::vector<std::uint8_t>;

/// Thrown by the file parsers; `line()` is the 1-based offending line, 0 when
/// the problem is not tied to one line (e.g. a missing header).
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

enum class Traversal { kBreadthFirst, kDepthFirst };

/// Binary-state network with a designated source and sink. Immutable once built.
class Network {
 public:
  Network(int node_count, int source, int sink, bool directed, std::vector<Arc> arcs);

  int node_count() const noexcept { return node_count_; }
  int source() const noexcept { return source_; }
  int sink() const noexcept { return sink_; }
  bool directed() const noexcept { return directed_; }
  int arc_count() const noexcept { return static_cast<int>(arcs_.size()); }
  const std::vector<Arc>& arcs() const noexcept { return arcs_; }

  /// 64-bit FNV-1a over the canonical topology; keys connected-vector caches.
  std::uint64_t content_hash() const noexcept;

  /// Canonical network-file rendering (parse_network round-trips it).
  std::string to_text() const;

 private:
  int node_count_;
  int source_;
  int sink_;
  bool directed_;
  std::vector<Arc> arcs_;
};

Network parse_network(std::string_view text);
Network load_network(const std::string& path);

/// True iff the sink is reachable from the source over up arcs. Undirected
/// networks traverse arcs both ways.
bool is_connected(const Network& net, const StateVector& x,
                  Traversal order = Traversal::kBreadthFirst);

/// Same predicate over a packed state (bit i-1 = arc i). Requires arc_count <= 64.
bool is_connected_mask(const Network& net, std::uint64_t up_arcs);

std::uint64_t pack_state(const StateVector& x);
StateVector unpack_state(std::uint64_t mask, int arc_count);

}  // namespace grrap
