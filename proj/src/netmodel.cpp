#include "grrap/netmodel.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <optional>
#include <sstream>

namespace grrap {

Network::Network(int node_count, int source, int sink, bool directed, std::vector<Arc> arcs)
    : node_count_(node_count), source_(source), sink_(sink), directed_(directed), arcs_(std::move(arcs)) {
  if (node_count_ < 2) throw std::invalid_argument("network needs at least two nodes");
  auto in_range = [this](int v) { return v >= 1 && v <= node_count_; };
  if (!in_range(source_) || !in_range(sink_))
    throw std::invalid_argument("source/sink outside 1.." + std::to_string(node_count_));
  if (source_ == sink_) throw std::invalid_argument("source and sink coincide");
  for (std::size_t i = 0; i < arcs_.size(); ++i) {
    if (!in_range(arcs_[i].tail) || !in_range(arcs_[i].head))
      throw std::invalid_argument("arc " + std::to_string(i + 1) + " references a node outside 1.." +
                                  std::to_string(node_count_));
  }
}

std::uint64_t Network::content_hash() const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::int64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= static_cast<std::uint64_t>(v >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  mix(node_count_);
  mix(source_);
  mix(sink_);
  mix(directed_ ? 1 : 0);
  mix(arc_count());
  for (const Arc& a : arcs_) {
    mix(a.tail);
    mix(a.head);
  }
  return h;
}

std::string Network::to_text() const {
  std::ostringstream out;
  out << "nodes " << node_count_ << "\nsource " << source_ << "\nsink " << sink_ << "\nmode "
      << (directed_ ? "directed" : "undirected") << "\n";
  for (std::size_t i = 0; i < arcs_.size(); ++i)
    out << "arc " << i + 1 << " " << arcs_[i].tail << " " << arcs_[i].head << "\n";
  return out.str();
}

namespace {

std::string strip_comment(const std::string& line) {
  auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

int read_int(std::istringstream& in, int line_no, const char* what) {
  long long v = 0;
  if (!(in >> v)) throw ParseError(line_no, std::string("expected integer ") + what);
  if (v < -(1LL << 30) || v > (1LL << 30)) throw ParseError(line_no, std::string(what) + " out of range");
  return static_cast<int>(v);
}

void expect_end(std::istringstream& in, int line_no) {
  std::string extra;
  if (in >> extra) throw ParseError(line_no, "unexpected trailing token '" + extra + "'");
}

}  // namespace

Network parse_network(std::string_view text) {
  std::optional<int> nodes, source, sink;
  int source_line = 0, sink_line = 0;
  bool directed = false;
  struct PendingArc {
    int id;
    Arc arc;
    int line;
  };
  std::vector<PendingArc> pending;

  std::istringstream doc{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(doc, raw)) {
    ++line_no;
    std::istringstream in(strip_comment(raw));
    std::string key;
    if (!(in >> key)) continue;
    if (key == "nodes") {
      if (nodes) throw ParseError(line_no, "duplicate 'nodes' line");
      nodes = read_int(in, line_no, "node count");
      if (*nodes < 2) throw ParseError(line_no, "node count must be at least 2");
    } else if (key == "source") {
      if (source) throw ParseError(line_no, "duplicate 'source' line");
      source = read_int(in, line_no, "source node");
      source_line = line_no;
    } else if (key == "sink") {
      if (sink) throw ParseError(line_no, "duplicate 'sink' line");
      sink = read_int(in, line_no, "sink node");
      sink_line = line_no;
    } else if (key == "mode") {
      std::string mode;
      if (!(in >> mode)) throw ParseError(line_no, "expected 'directed' or 'undirected'");
      if (mode == "directed") {
        directed = true;
      } else if (mode == "undirected") {
        directed = false;
      } else {
        throw ParseError(line_no, "unknown mode '" + mode + "'");
      }
    } else if (key == "arc") {
      PendingArc p{};
      p.id = read_int(in, line_no, "arc id");
      p.arc.tail = read_int(in, line_no, "tail node");
      p.arc.head = read_int(in, line_no, "head node");
      p.line = line_no;
      pending.push_back(p);
    } else {
      throw ParseError(line_no, "unknown keyword '" + key + "'");
    }
    expect_end(in, line_no);
  }

  if (!nodes) throw ParseError(0, "missing 'nodes' header");
  if (!source) throw ParseError(0, "missing 'source' header");
  if (!sink) throw ParseError(0, "missing 'sink' header");
  if (*source < 1 || *source > *nodes) throw ParseError(source_line, "source node outside 1.." + std::to_string(*nodes));
  if (*sink < 1 || *sink > *nodes) throw ParseError(sink_line, "sink node outside 1.." + std::to_string(*nodes));
  if (*source == *sink) throw ParseError(std::max(source_line, sink_line), "source and sink must differ");

  const int m = static_cast<int>(pending.size());
  std::vector<Arc> arcs(m);
  std::vector<int> seen_at(m, 0);
  for (const PendingArc& p : pending) {
    if (p.id < 1 || p.id > m)
      throw ParseError(p.line, "arc id " + std::to_string(p.id) + " outside 1.." + std::to_string(m));
    if (seen_at[p.id - 1] != 0)
      throw ParseError(p.line, "duplicate arc id " + std::to_string(p.id) + " (first on line " +
                                   std::to_string(seen_at[p.id - 1]) + ")");
    for (int v : {p.arc.tail, p.arc.head}) {
      if (v < 1 || v > *nodes)
        throw ParseError(p.line, "arc " + std::to_string(p.id) + " references node " + std::to_string(v) +
                                     " in a " + std::to_string(*nodes) + "-node network");
    }
    seen_at[p.id - 1] = p.line;
    arcs[p.id - 1] = p.arc;
  }
  return Network(*nodes, *source, *sink, directed, std::move(arcs));
}

Network load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open network file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_network(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + e.what());
  }
}

bool is_connected(const Network& net, const StateVector& x, Traversal order) {
  if (static_cast<int>(x.size()) != net.arc_count())
    throw std::invalid_argument("state vector length " + std::to_string(x.size()) + " != arc count " +
                                std::to_string(net.arc_count()));
  const int n = net.node_count();
  std::vector<std::vector<int>> adj(n + 1);
  for (int i = 0; i < net.arc_count(); ++i) {
    if (!x[i]) continue;
    const Arc& a = net.arcs()[i];
    adj[a.tail].push_back(a.head);
    if (!net.directed()) adj[a.head].push_back(a.tail);
  }
  std::vector<char> visited(n + 1, 0);
  std::deque<int> work{net.source()};
  visited[net.source()] = 1;
  while (!work.empty()) {
    int v;
    if (order == Traversal::kBreadthFirst) {
      v = work.front();
      work.pop_front();
    } else {
      v = work.back();
      work.pop_back();
    }
    if (v == net.sink()) return true;
    for (int w : adj[v]) {
      if (!visited[w]) {
        visited[w] = 1;
        work.push_back(w);
      }
    }
  }
  return false;
}

bool is_connected_mask(const Network& net, std::uint64_t up_arcs) {
  if (net.node_count() > 64 || net.arc_count() > 64)
    return is_connected(net, unpack_state(up_arcs, net.arc_count()));
  const auto& arcs = net.arcs();
  const int m = net.arc_count();
  std::uint64_t reach = 1ULL << (net.source() - 1);
  const std::uint64_t target = 1ULL << (net.sink() - 1);
  bool grew = true;
  while (grew) {
    grew = false;
    for (int i = 0; i < m; ++i) {
      if (!((up_arcs >> i) & 1U)) continue;
      const std::uint64_t t = 1ULL << (arcs[i].tail - 1);
      const std::uint64_t h = 1ULL << (arcs[i].head - 1);
      if ((reach & t) && !(reach & h)) {
        reach |= h;
        grew = true;
      } else if (!net.directed() && (reach & h) && !(reach & t)) {
        reach |= t;
        grew = true;
      }
    }
    if (reach & target) return true;
  }
  return (reach & target) != 0;
}

std::uint64_t pack_state(const StateVector& x) {
  if (x.size() > 64) throw std::invalid_argument("cannot pack more than 64 arcs");
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i]) mask |= 1ULL << i;
  return mask;
}

StateVector unpack_state(std::uint64_t mask, int arc_count) {
  StateVector x(arc_count);
  for (int i = 0; i < arc_count; ++i) x[i] = static_cast<std::uint8_t>((mask >> i) & 1U);
  return x;
}

}  // namespace grrap
