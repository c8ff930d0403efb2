#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace magsa {

using Complex = std::complex<double>;
using VertexIndex = std::uint32_t;
using EdgeIndex = std::uint32_t;

inline constexpr VertexIndex kNoVertex = std::numeric_limits<VertexIndex>::max();

// Error hierarchy. Every library failure derives from Error so callers
// (the CLI in particular) can map them onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class ParseError : public Error {
 public:
  using Error::Error;
};
class ValidationError : public Error {
 public:
  using Error::Error;
};
class PreconditionError : public Error {
 public:
  using Error::Error;
};
class TruncationError : public Error {
 public:
  using Error::Error;
};
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Accepted deviation of |sigma| from 1 in input data; values inside the
/// band are renormalized to exact unit modulus.
inline constexpr double kPhaseModulusTolerance = 1e-6;

/// One orientation per unoriented edge. The list of stored edges is the
/// fixed orientation E_s; reverse edges are derived, never stored.
struct StoredEdge {
  VertexIndex origin = 0;
  VertexIndex terminus = 0;
  double weight = 1.0;   // a(e) > 0
  Complex phase{1.0, 0.0};  // sigma(e), unit modulus
};

/// An oriented edge in E_0, derived from a stored edge. When `reversed` is
/// set this is the reverse of the stored orientation.
struct OrientedEdge {
  VertexIndex origin = 0;
  VertexIndex terminus = 0;
  EdgeIndex stored = 0;
  bool reversed = false;

  [[nodiscard]] OrientedEdge reverse() const noexcept {
    return {terminus, origin, stored, !reversed};
  }
  friend bool operator==(const OrientedEdge&, const OrientedEdge&) = default;
};

class GraphBuilder;

/// Finite, connected, locally finite weighted graph with a magnetic phase on
/// every edge and a real potential on every vertex. Immutable once built.
class MagneticGraph {
 public:
  MagneticGraph() = default;

  [[nodiscard]] std::size_t vertex_count() const noexcept { return ids_.size(); }
  [[nodiscard]] std::size_t edge_count() const noexcept { return edges_.size(); }

  [[nodiscard]] const std::string& id(VertexIndex v) const { return ids_.at(v); }
  [[nodiscard]] std::span<const std::string> ids() const noexcept { return ids_; }

  [[nodiscard]] std::optional<VertexIndex> find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Index of a vertex id; throws PreconditionError for unknown ids.
  [[nodiscard]] VertexIndex index_of(std::string_view id) const {
    if (auto v = find(id)) return *v;
    throw PreconditionError("unknown vertex '" + std::string(id) + "'");
  }

  [[nodiscard]] double weight(VertexIndex v) const { return w_[v]; }
  [[nodiscard]] double potential(VertexIndex v) const { return q_[v]; }
  [[nodiscard]] std::span<const double> weights() const noexcept { return w_; }
  [[nodiscard]] std::span<const double> potentials() const noexcept { return q_; }

  [[nodiscard]] const StoredEdge& edge(EdgeIndex e) const { return edges_[e]; }
  [[nodiscard]] std::span<const StoredEdge> edges() const noexcept { return edges_; }

  /// a(e); symmetric under reversal.
  [[nodiscard]] double weight(const OrientedEdge& e) const {
    return edges_[e.stored].weight;
  }
  /// sigma(e) for the given orientation; the reverse carries the conjugate.
  [[nodiscard]] Complex phase(const OrientedEdge& e) const {
    const Complex s = edges_[e.stored].phase;
    return e.reversed ? std::conj(s) : s;
  }
  [[nodiscard]] OrientedEdge oriented(EdgeIndex e) const {
    return {edges_[e].origin, edges_[e].terminus, e, false};
  }

  /// O_x: one outward oriented edge per neighbor of x.
  [[nodiscard]] std::span<const OrientedEdge> incident(VertexIndex x) const {
    return {adjacency_.data() + offsets_[x], adjacency_.data() + offsets_[x + 1]};
  }
  [[nodiscard]] std::size_t degree(VertexIndex x) const {
    return offsets_[x + 1] - offsets_[x];
  }
  [[nodiscard]] std::size_t max_degree() const {
    std::size_t m = 0;
    for (VertexIndex x = 0; x < vertex_count(); ++x) m = std::max(m, degree(x));
    return m;
  }

  [[nodiscard]] VertexIndex root() const noexcept { return root_; }

 private:
  friend class GraphBuilder;

  void build_adjacency() {
    const std::size_t n = ids_.size();
    offsets_.assign(n + 1, 0);
    for (const auto& e : edges_) {
      ++offsets_[e.origin + 1];
      ++offsets_[e.terminus + 1];
    }
    for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
    adjacency_.resize(2 * edges_.size());
    std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (EdgeIndex k = 0; k < edges_.size(); ++k) {
      const auto& e = edges_[k];
      adjacency_[cursor[e.origin]++] = {e.origin, e.terminus, k, false};
      adjacency_[cursor[e.terminus]++] = {e.terminus, e.origin, k, true};
    }
  }

  std::vector<std::string> ids_;
  std::unordered_map<std::string, VertexIndex> index_;
  std::vector<double> w_;
  std::vector<double> q_;
  std::vector<StoredEdge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<OrientedEdge> adjacency_;
  VertexIndex root_ = 0;
};

/// Hop distances r(x) = d(source, x) from a breadth-first search; -1 marks
/// unreachable vertices. Stops expanding past `max_radius` when given.
inline std::vector<int> hop_distances(const MagneticGraph& g, VertexIndex source,
                                      int max_radius = std::numeric_limits<int>::max()) {
  std::vector<int> r(g.vertex_count(), -1);
  std::queue<VertexIndex> frontier;
  r[source] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    const VertexIndex x = frontier.front();
    frontier.pop();
    if (r[x] >= max_radius) continue;
    for (const auto& e : g.incident(x)) {
      if (r[e.terminus] < 0) {
        r[e.terminus] = r[x] + 1;
        frontier.push(e.terminus);
      }
    }
  }
  return r;
}

/// Incrementally assembles a MagneticGraph. `build()` validates every graph
/// invariant; `build_unchecked()` skips validation and exists for corruption
/// harnesses only.
class GraphBuilder {
 public:
  VertexIndex add_vertex(std::string id, double w, double q = 0.0) {
    const auto v = static_cast<VertexIndex>(g_.ids_.size());
    if (!g_.index_.emplace(id, v).second) {
      throw ValidationError("duplicate vertex id '" + id + "'");
    }
    g_.ids_.push_back(std::move(id));
    g_.w_.push_back(w);
    g_.q_.push_back(q);
    return v;
  }

  void reserve(std::size_t vertices, std::size_t edges) {
    g_.ids_.reserve(vertices);
    g_.w_.reserve(vertices);
    g_.q_.reserve(vertices);
    g_.index_.reserve(vertices);
    g_.edges_.reserve(edges);
  }

  EdgeIndex add_edge(VertexIndex from, VertexIndex to, double a,
                     Complex sigma = {1.0, 0.0}) {
    g_.edges_.push_back({from, to, a, sigma});
    return static_cast<EdgeIndex>(g_.edges_.size() - 1);
  }

  EdgeIndex add_edge(std::string_view from, std::string_view to, double a,
                     Complex sigma = {1.0, 0.0}) {
    auto f = g_.find(from);
    auto t = g_.find(to);
    if (!f) throw ValidationError("edge references unknown vertex '" + std::string(from) + "'");
    if (!t) throw ValidationError("edge references unknown vertex '" + std::string(to) + "'");
    return add_edge(*f, *t, a, sigma);
  }

  void set_root(std::string_view id) { root_id_ = std::string(id); }

  [[nodiscard]] std::size_t vertex_count() const noexcept { return g_.ids_.size(); }

  MagneticGraph build() && {
    validate_and_normalize();
    return finish();
  }

  MagneticGraph build_unchecked() && { return finish(); }

 private:
  MagneticGraph finish() {
    if (g_.ids_.empty()) throw ValidationError("graph has no vertices");
    if (!adjacency_built_) g_.build_adjacency();
    if (root_id_) {
      auto r = g_.find(*root_id_);
      if (!r) throw ValidationError("root '" + *root_id_ + "' is not a vertex");
      g_.root_ = *r;
    }
    return std::move(g_);
  }

  void validate_and_normalize() {
    const std::size_t n = g_.ids_.size();
    if (n == 0) throw ValidationError("graph has no vertices");
    for (std::size_t v = 0; v < n; ++v) {
      if (!(g_.w_[v] > 0.0) || !std::isfinite(g_.w_[v])) {
        throw ValidationError("vertex '" + g_.ids_[v] + "': weight w must be positive");
      }
      if (!std::isfinite(g_.q_[v])) {
        throw ValidationError("vertex '" + g_.ids_[v] + "': potential q must be finite");
      }
    }
    auto label = [&](const StoredEdge& e) { return "[" + g_.ids_.at(e.origin) + "," + g_.ids_.at(e.terminus) + "]"; };
    std::vector<std::uint64_t> keys;
    keys.reserve(g_.edges_.size());
    for (auto& e : g_.edges_) {
      if (e.origin >= n || e.terminus >= n) throw ValidationError("edge references a vertex index out of range");
      if (e.origin == e.terminus) throw ValidationError("edge " + label(e) + " is a loop");
      if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
        throw ValidationError("edge " + label(e) + ": weight a must be positive");
      }
      const double modulus = std::abs(e.phase);
      if (!std::isfinite(modulus) || std::abs(modulus - 1.0) > kPhaseModulusTolerance) {
        throw ValidationError("edge " + label(e) + ": |sigma| differs from 1");
      }
      e.phase /= modulus;
      const auto lo = std::min(e.origin, e.terminus);
      const auto hi = std::max(e.origin, e.terminus);
      keys.push_back((std::uint64_t{lo} << 32) | hi);
    }
    std::sort(keys.begin(), keys.end());
    if (const auto dup = std::adjacent_find(keys.begin(), keys.end()); dup != keys.end()) {
      const auto lo = static_cast<VertexIndex>(*dup >> 32);
      const auto hi = static_cast<VertexIndex>(*dup & 0xffffffffu);
      throw ValidationError("edge [" + g_.ids_[lo] + "," + g_.ids_[hi] + "] duplicates an existing edge (multi-edge)");
    }
    // connectivity
    g_.build_adjacency();
    adjacency_built_ = true;
    const auto r = hop_distances(g_, 0);
    for (std::size_t v = 0; v < n; ++v) {
      if (r[v] < 0) {
        throw ValidationError("graph is disconnected: vertex '" + g_.ids_[v] +
                              "' is unreachable from '" + g_.ids_[0] + "'");
      }
    }
  }

  MagneticGraph g_;
  std::optional<std::string> root_id_;
  bool adjacency_built_ = false;
};

/// Combinatorial ball B_n(x0), split into its vertex set, the edges with
/// both endpoints inside, and the edges with at least one endpoint inside.
struct Ball {
  VertexIndex center = 0;
  int radius = 0;
  std::vector<VertexIndex> vertices;       // ascending index order
  std::vector<EdgeIndex> interior_edges;   // ascending
  std::vector<EdgeIndex> incident_edges;   // ascending, superset of interior
  std::vector<int> hops;                   // r(x) for every vertex of the graph

  [[nodiscard]] bool contains(VertexIndex v) const {
    return hops[v] >= 0 && hops[v] <= radius;
  }
  [[nodiscard]] std::size_t size() const noexcept { return vertices.size(); }
};

inline Ball ball(const MagneticGraph& g, VertexIndex x0, int n) {
  if (x0 >= g.vertex_count()) throw PreconditionError("ball center is not a vertex");
  if (n < 0) throw PreconditionError("ball radius must be nonnegative");
  Ball b;
  b.center = x0;
  b.radius = n;
  b.hops = hop_distances(g, x0, n + 1);
  for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
    if (b.contains(v)) b.vertices.push_back(v);
  }
  for (EdgeIndex k = 0; k < g.edge_count(); ++k) {
    const bool o = b.contains(g.edge(k).origin);
    const bool t = b.contains(g.edge(k).terminus);
    if (o && t) b.interior_edges.push_back(k);
    if (o || t) b.incident_edges.push_back(k);
  }
  return b;
}

inline Ball ball(const MagneticGraph& g, std::string_view x0, int n) {
  return ball(g, g.index_of(x0), n);
}

}  // namespace magsa
