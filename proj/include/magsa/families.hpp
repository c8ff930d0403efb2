#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

#include "magsa/graph.hpp"

namespace magsa {

using Rational = boost::rational<std::int64_t>;

/// Exact squares of the weights, for families whose weights are square roots
/// of rationals. Indexed like the graph's vertices and stored edges.
struct ExactWeights {
  std::vector<Rational> vertex_weight_sq;
  std::vector<Rational> edge_weight_sq;
};

/// A finite piece of a (possibly infinite) graph. Vertices flagged in
/// `frontier` may miss neighbors of the full graph; their degree and incident
/// edges are not trustworthy.
struct Truncation {
  MagneticGraph graph;
  std::vector<char> frontier;
  int radius = -1;  // -1: the graph is complete (finite family or file)
  std::optional<ExactWeights> exact;

  [[nodiscard]] bool complete() const noexcept { return radius < 0; }
};

inline Truncation whole_graph(MagneticGraph g) {
  Truncation t;
  t.frontier.assign(g.vertex_count(), 0);
  t.graph = std::move(g);
  return t;
}

enum class FamilyKind { halfline, triangular, cycle, random };

inline std::string_view family_name(FamilyKind k) {
  switch (k) {
    case FamilyKind::halfline: return "halfline";
    case FamilyKind::triangular: return "triangular";
    case FamilyKind::cycle: return "cycle";
    case FamilyKind::random: return "random";
  }
  return "?";
}

inline FamilyKind parse_family(std::string_view name) {
  if (name == "halfline") return FamilyKind::halfline;
  if (name == "triangular") return FamilyKind::triangular;
  if (name == "cycle") return FamilyKind::cycle;
  if (name == "random") return FamilyKind::random;
  throw PreconditionError("unknown family '" + std::string(name) + "'");
}

enum class DegreeBoundKind { exact, unbounded, lower_bound_only };

struct DegreeBound {
  DegreeBoundKind kind = DegreeBoundKind::exact;
  std::optional<int> value;  // N for exact, observed maximum for lower_bound_only
};

/// Procedural graph families. Parameters (all optional):
///   halfline, triangular: phase (angle per stored edge), q (constant potential)
///   cycle:  n (>= 3), flux (total flux; each stored edge carries flux/n), q
///   random: n, p, bandwidth (0 = any pair), w_min, w_max, a_min, a_max,
///           q_min, q_max, magnetic (0/1), seed
class Family {
 public:
  using Params = std::map<std::string, double>;

  Family(FamilyKind kind, Params params = {}) : kind_(kind), params_(std::move(params)) { validate(); }

  [[nodiscard]] FamilyKind kind() const noexcept { return kind_; }
  [[nodiscard]] std::string_view name() const { return family_name(kind_); }
  [[nodiscard]] const Params& params() const noexcept { return params_; }
  [[nodiscard]] double param(const std::string& key, double fallback) const {
    auto it = params_.find(key);
    return it == params_.end() ? fallback : it->second;
  }

  [[nodiscard]] bool finite() const noexcept {
    return kind_ == FamilyKind::cycle || kind_ == FamilyKind::random;
  }

  [[nodiscard]] std::string root_id() const {
    switch (kind_) {
      case FamilyKind::halfline: return "0";
      case FamilyKind::triangular: return "x0";
      case FamilyKind::cycle: return "c0";
      case FamilyKind::random: return "v0";
    }
    return {};
  }

  /// Everything within combinatorial distance `radius` of the root (finite
  /// families ignore the radius and return the whole graph).
  [[nodiscard]] Truncation truncate(int radius) const {
    if (!finite() && radius < 1) throw PreconditionError("truncation radius must be at least 1");
    switch (kind_) {
      case FamilyKind::halfline: return halfline(radius);
      case FamilyKind::triangular: return triangular(radius);
      case FamilyKind::cycle: return cycle();
      case FamilyKind::random: return random();
    }
    throw PreconditionError("unknown family");
  }

  /// Smallest truncation whose ball B_n(x0) holds no frontier vertex.
  [[nodiscard]] Truncation truncate_covering(std::string_view x0, int n) const {
    if (finite()) return truncate(0);
    int radius = std::max(1, n + 1);
    for (;;) {
      Truncation t = truncate(radius);
      if (auto v = t.graph.find(x0)) {
        const auto r = hop_distances(t.graph, *v, n);
        bool clear = true;
        for (std::size_t i = 0; i < r.size() && clear; ++i) clear = !(r[i] >= 0 && r[i] <= n && t.frontier[i]);
        if (clear) return t;
      }
      radius *= 2;
    }
  }

  // Closed-form knowledge about the untruncated family.

  [[nodiscard]] DegreeBound degree_bound() const {
    switch (kind_) {
      case FamilyKind::halfline:
      case FamilyKind::cycle: return {DegreeBoundKind::exact, 2};
      case FamilyKind::triangular: return {DegreeBoundKind::unbounded, std::nullopt};
      case FamilyKind::random: {
        const auto t = random();
        return {DegreeBoundKind::exact, static_cast<int>(t.graph.max_degree())};
      }
    }
    return {};
  }

  /// Whether w is constant on the whole family; nullopt when only the
  /// generated instance can tell.
  [[nodiscard]] std::optional<bool> constant_vertex_weight() const {
    switch (kind_) {
      case FamilyKind::halfline:
      case FamilyKind::triangular: return false;
      case FamilyKind::cycle: return true;
      case FamilyKind::random: return param("w_min", 0.1) == param("w_max", 10.0);
    }
    return std::nullopt;
  }

  /// inf q over the family.
  [[nodiscard]] double potential_infimum() const {
    if (kind_ == FamilyKind::random) return param("q_min", 0.0);
    return param("q", 0.0);
  }

  /// Limit of m_n a_n / n^2 as n -> infinity, where known in closed form.
  [[nodiscard]] std::optional<double> assumption_a_limit() const {
    switch (kind_) {
      case FamilyKind::halfline: return 2.0;
      case FamilyKind::triangular: return 0.0;
      case FamilyKind::cycle:
      case FamilyKind::random: return 0.0;  // balls saturate
    }
    return std::nullopt;
  }

  /// Closed forms for m_n and a_n^2 around the root.
  [[nodiscard]] std::optional<std::pair<int, Rational>> assumption_a_closed_form(int n) const {
    if (n < 1) return std::nullopt;
    const std::int64_t k = n;
    switch (kind_) {
      case FamilyKind::halfline: return std::pair{2, Rational((k + 1) * (k + 1) * (k + 1) * (k + 1))};
      case FamilyKind::triangular: return std::pair{static_cast<int>(2 * k + 2), Rational(k + 1)};
      default: return std::nullopt;
    }
  }

  /// Weighted distance from the root to the combinatorial sphere of radius n
  /// (min over the sphere), where known in closed form.
  [[nodiscard]] std::optional<double> closed_form_distance(int n) const {
    double s = 0.0;
    switch (kind_) {
      case FamilyKind::halfline:
        for (int j = 0; j < n; ++j) s += 1.0 / std::sqrt((j + 1.0) * (j + 2.0));
        return s;
      case FamilyKind::triangular:
        for (int k = 1; k <= n; ++k) s += std::pow(k + 1.0, -0.25);
        return s;
      default: return std::nullopt;
    }
  }

  /// Whether (V, d_{w,a}) is complete, where decidable in closed form:
  /// both infinite families have divergent distance partial sums, finite
  /// graphs are trivially complete.
  [[nodiscard]] std::optional<bool> metric_complete() const { return true; }

  /// Known classification of the infinite families under theorems 1, 2, 3.
  [[nodiscard]] std::optional<std::array<bool, 3>> known_classification() const {
    switch (kind_) {
      case FamilyKind::halfline: return std::array{false, false, true};
      case FamilyKind::triangular: return std::array{false, true, false};
      default: return std::nullopt;
    }
  }

 private:
  void validate() const {
    static const std::map<FamilyKind, std::vector<std::string>> allowed{
        {FamilyKind::halfline, {"phase", "q"}},
        {FamilyKind::triangular, {"phase", "q"}},
        {FamilyKind::cycle, {"n", "flux", "q"}},
        {FamilyKind::random,
         {"n", "p", "bandwidth", "w_min", "w_max", "a_min", "a_max", "q_min", "q_max", "magnetic", "seed"}}};
    const auto& keys = allowed.at(kind_);
    for (const auto& [k, v] : params_) {
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
        throw PreconditionError("family " + std::string(name()) + " has no parameter '" + k + "'");
      }
      if (!std::isfinite(v)) throw PreconditionError("parameter '" + k + "' must be finite");
    }
    if (kind_ == FamilyKind::cycle && param("n", 3) < 3) throw PreconditionError("cycle length must be at least 3");
    if (kind_ == FamilyKind::random) {
      if (param("n", 20) < 1) throw PreconditionError("random graph needs at least one vertex");
      const double p = param("p", 0.2);
      if (!(p > 0.0 && p <= 1.0)) throw PreconditionError("edge probability must lie in (0, 1]");
      if (!(param("w_min", 0.1) > 0.0) || param("w_max", 10.0) < param("w_min", 0.1)) {
        throw PreconditionError("vertex weight range must be positive and ordered");
      }
      if (!(param("a_min", 0.1) > 0.0) || param("a_max", 10.0) < param("a_min", 0.1)) {
        throw PreconditionError("edge weight range must be positive and ordered");
      }
      if (param("q_max", 0.0) < param("q_min", 0.0)) throw PreconditionError("potential range must be ordered");
      if (param("bandwidth", 0) < 0) throw PreconditionError("bandwidth must be nonnegative");
    }
  }

  [[nodiscard]] Complex edge_phase() const { return std::polar(1.0, param("phase", 0.0)); }

  // V = {0..R}, edges [n-1, n] with a = n and w(n-1) = 1/n.
  [[nodiscard]] Truncation halfline(int radius) const {
    GraphBuilder b;
    b.reserve(radius + 1, radius);
    ExactWeights exact;
    const double q = param("q", 0.0);
    for (int v = 0; v <= radius; ++v) {
      b.add_vertex(std::to_string(v), 1.0 / (v + 1.0), q);
      exact.vertex_weight_sq.emplace_back(1, std::int64_t{v + 1} * (v + 1));
    }
    for (int n = 1; n <= radius; ++n) {
      b.add_edge(static_cast<VertexIndex>(n - 1), static_cast<VertexIndex>(n), static_cast<double>(n),
                 edge_phase());
      exact.edge_weight_sq.emplace_back(std::int64_t{n} * n);
    }
    b.set_root("0");
    Truncation t;
    t.graph = std::move(b).build();
    t.frontier.assign(t.graph.vertex_count(), 0);
    t.frontier.back() = 1;
    t.radius = radius;
    t.exact = std::move(exact);
    return t;
  }

  // Rows 1..R+1 with k vertices in row k; complete bipartite joins between
  // consecutive rows; a = 1 and w = row^{-1/2}.
  [[nodiscard]] Truncation triangular(int radius) const {
    const int rows = radius + 1;
    const std::size_t nv = static_cast<std::size_t>(rows) * (rows + 1) / 2;
    std::size_t ne = 0;
    for (int k = 1; k < rows; ++k) ne += static_cast<std::size_t>(k) * (k + 1);
    GraphBuilder b;
    b.reserve(nv, ne);
    ExactWeights exact;
    exact.vertex_weight_sq.reserve(nv);
    exact.edge_weight_sq.assign(ne, Rational(1));
    const double q = param("q", 0.0);
    std::vector<VertexIndex> row_start;
    VertexIndex next = 0;
    for (int k = 1; k <= rows; ++k) {
      row_start.push_back(next);
      const double w = 1.0 / std::sqrt(static_cast<double>(k));
      for (int j = 0; j < k; ++j) {
        b.add_vertex("x" + std::to_string(next++), w, q);
        exact.vertex_weight_sq.emplace_back(1, k);
      }
    }
    const Complex phase = edge_phase();
    for (int k = 1; k < rows; ++k) {
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j <= k; ++j) {
          b.add_edge(row_start[k - 1] + i, row_start[k] + j, 1.0, phase);
        }
      }
    }
    b.set_root("x0");
    Truncation t;
    t.graph = std::move(b).build();
    t.frontier.assign(t.graph.vertex_count(), 0);
    for (VertexIndex v = row_start.back(); v < t.graph.vertex_count(); ++v) t.frontier[v] = 1;
    t.radius = radius;
    t.exact = std::move(exact);
    return t;
  }

  [[nodiscard]] Truncation cycle() const {
    const int n = static_cast<int>(param("n", 3));
    const Complex phase = std::polar(1.0, param("flux", 0.0) / n);
    GraphBuilder b;
    ExactWeights exact;
    for (int j = 0; j < n; ++j) {
      b.add_vertex("c" + std::to_string(j), 1.0, param("q", 0.0));
      exact.vertex_weight_sq.emplace_back(1);
    }
    for (int j = 0; j < n; ++j) {
      b.add_edge(static_cast<VertexIndex>(j), static_cast<VertexIndex>((j + 1) % n), 1.0, phase);
      exact.edge_weight_sq.emplace_back(1);
    }
    b.set_root("c0");
    Truncation t = whole_graph(std::move(b).build());
    t.exact = std::move(exact);
    return t;
  }

  // Erdos-Renyi style sample, optionally banded (|i - j| <= bandwidth),
  // redrawn from the same stream until connected.
  [[nodiscard]] Truncation random() const {
    const int n = static_cast<int>(param("n", 20));
    const double p = param("p", 0.2);
    const int band = static_cast<int>(param("bandwidth", 0));
    const bool magnetic = param("magnetic", 1.0) != 0.0;
    std::mt19937_64 rng(static_cast<std::uint64_t>(param("seed", 0)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
    constexpr int kMaxAttempts = 10000;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      GraphBuilder b;
      for (int v = 0; v < n; ++v) {
        const double w = uniform(param("w_min", 0.1), param("w_max", 10.0));
        const double q = uniform(param("q_min", 0.0), param("q_max", 0.0));
        b.add_vertex("v" + std::to_string(v), w, q);
      }
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          if (band > 0 && j - i > band) break;
          if (unit(rng) >= p) continue;
          const double a = uniform(param("a_min", 0.1), param("a_max", 10.0));
          const Complex sigma = magnetic ? std::polar(1.0, uniform(0.0, 2.0 * std::numbers::pi)) : Complex{1.0, 0.0};
          // random orientation for the stored edge
          if (unit(rng) < 0.5) {
            b.add_edge(static_cast<VertexIndex>(i), static_cast<VertexIndex>(j), a, sigma);
          } else {
            b.add_edge(static_cast<VertexIndex>(j), static_cast<VertexIndex>(i), a, sigma);
          }
        }
      }
      b.set_root("v0");
      try {
        return whole_graph(std::move(b).build());
      } catch (const ValidationError&) {
        // disconnected sample: draw again
      }
    }
    throw PreconditionError("random family: no connected sample within the attempt limit; raise p");
  }

  FamilyKind kind_;
  Params params_;
};

}  // namespace magsa
