#include "grrap/bat.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace grrap {

ArcCapExceeded::ArcCapExceeded(int arcs, int cap)
    : std::length_error("network has " + std::to_string(arcs) + " arcs; enumeration visits 2^" +
                        std::to_string(arcs) + " vectors, above the cap of " + std::to_string(cap) +
                        " arcs (raise it with --cap)"),
      arcs_(arcs),
      cap_(cap) {}

bool next_vector(StateVector& x) {
  std::size_t i = 0;
  while (i < x.size() && x[i] == 1) ++i;
  if (i == x.size()) return false;
  for (std::size_t k = 0; k < i; ++k) x[k] = 0;
  x[i] = 1;
  return true;
}

ConnectedVectorSet::ConnectedVectorSet(std::uint64_t network_hash, int arc_count, std::uint64_t visited,
                                       std::vector<std::uint64_t> vectors)
    : network_hash_(network_hash), arc_count_(arc_count), visited_(visited), vectors_(std::move(vectors)) {}

ConnectedVectorSet enumerate_connected(const Network& net, int arc_cap) {
  const int m = net.arc_count();
  if (m > arc_cap || m > 63) throw ArcCapExceeded(m, std::min(arc_cap, 63));

  // x_1 is the least significant bit, so the binary-addition successor of a
  // packed state is state + 1.
  const std::uint64_t end = 1ULL << m;
  std::vector<std::uint64_t> connected;
  std::uint64_t visited = 0;
  for (std::uint64_t state = 0; state < end; ++state) {
    ++visited;
    if (is_connected_mask(net, state)) connected.push_back(state);
  }
  return ConnectedVectorSet(net.content_hash(), m, visited, std::move(connected));
}

double reliability(const ConnectedVectorSet& cvs, std::span<const double> p) {
  const int m = cvs.arc_count();
  if (static_cast<int>(p.size()) != m)
    throw std::invalid_argument("probability vector length " + std::to_string(p.size()) + " != arc count " +
                                std::to_string(m));
  std::vector<double> up(m), down(m);
  for (int i = 0; i < m; ++i) {
    if (!(p[i] >= 0.0 && p[i] <= 1.0))
      throw std::invalid_argument("arc " + std::to_string(i + 1) + " probability outside [0,1]");
    up[i] = p[i];
    down[i] = 1.0 - p[i];
  }
  double sum = 0.0;
  for (std::uint64_t state : cvs.packed()) {
    double prod = 1.0;
    for (int i = 0; i < m; ++i) prod *= ((state >> i) & 1U) ? up[i] : down[i];
    sum += prod;
  }
  // Round-off only; a sum genuinely outside [0,1] would be a bug upstream.
  if (sum > 1.0 && sum < 1.0 + 1e-12) sum = 1.0;
  return sum;
}

void save_connected_vectors(const std::filesystem::path& file, const ConnectedVectorSet& cvs) {
  const auto tmp = std::filesystem::path(file).concat(".tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write cache file '" + tmp.string() + "'");
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016" PRIx64, cvs.network_hash());
    out << "grrap-connected-vectors " << kCacheFormatVersion << "\nhash " << hash << "\narcs " << cvs.arc_count()
        << "\nvisited " << cvs.visited() << "\ncount " << cvs.size() << "\n";
    out << std::hex;
    for (std::uint64_t v : cvs.packed()) out << v << "\n";
    if (!out) throw std::runtime_error("failed writing cache file '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, file);
}

std::optional<ConnectedVectorSet> load_connected_vectors(const std::filesystem::path& file, const Network& net) {
  std::ifstream in(file);
  if (!in) return std::nullopt;
  std::string tag, key;
  int version = 0;
  std::string hash_text;
  int arcs = 0;
  std::uint64_t visited = 0, count = 0;
  if (!(in >> tag >> version) || tag != "grrap-connected-vectors" || version != kCacheFormatVersion)
    return std::nullopt;
  if (!(in >> key >> hash_text) || key != "hash") return std::nullopt;
  if (!(in >> key >> arcs) || key != "arcs") return std::nullopt;
  if (!(in >> key >> visited) || key != "visited") return std::nullopt;
  if (!(in >> key >> count) || key != "count") return std::nullopt;
  std::uint64_t hash = 0;
  try {
    hash = std::stoull(hash_text, nullptr, 16);
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if (hash != net.content_hash() || arcs != net.arc_count()) return std::nullopt;
  std::vector<std::uint64_t> vectors;
  vectors.reserve(count);
  in >> std::hex;
  for (std::uint64_t k = 0; k < count; ++k) {
    std::uint64_t v = 0;
    if (!(in >> v)) return std::nullopt;
    vectors.push_back(v);
  }
  return ConnectedVectorSet(hash, arcs, visited, std::move(vectors));
}

ConnectedVectorSet connected_vectors_cached(const Network& net, const std::filesystem::path& dir, int arc_cap) {
  if (dir.empty()) return enumerate_connected(net, arc_cap);
  char name[40];
  std::snprintf(name, sizeof name, "%016" PRIx64 ".cvs", net.content_hash());
  const auto file = dir / name;
  if (auto cached = load_connected_vectors(file, net)) return std::move(*cached);
  ConnectedVectorSet cvs = enumerate_connected(net, arc_cap);
  std::filesystem::create_directories(dir);
  save_connected_vectors(file, cvs);
  return cvs;
}

}  // namespace grrap
