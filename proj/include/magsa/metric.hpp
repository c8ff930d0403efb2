#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "magsa/check_result.hpp"
#include "magsa/families.hpp"
#include "magsa/graph.hpp"

namespace magsa {

/// Slack used when deciding membership of metric balls, so that radii given
/// in closed form (1/sqrt(2) and the like) include the vertex they name.
inline constexpr double kDistanceSlack = 1e-12;

/// Length of an edge in the weighted metric: sqrt(min(w(o), w(t)) / a(e)).
inline double edge_length(const MagneticGraph& g, const StoredEdge& e) {
  return std::sqrt(std::min(g.weight(e.origin), g.weight(e.terminus)) / e.weight);
}
inline double edge_length(const MagneticGraph& g, EdgeIndex e) { return edge_length(g, g.edge(e)); }
inline double edge_length(const MagneticGraph& g, const OrientedEdge& e) {
  return edge_length(g, g.edge(e.stored));
}

/// Multi-source Dijkstra over edge lengths. Ties pop in vertex index order.
inline std::vector<double> distances_from(const MagneticGraph& g, const std::vector<VertexIndex>& sources) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(g.vertex_count(), inf);
  using Item = std::pair<double, VertexIndex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (VertexIndex s : sources) {
    dist[s] = 0.0;
    heap.emplace(0.0, s);
  }
  while (!heap.empty()) {
    const auto [d, x] = heap.top();
    heap.pop();
    if (d > dist[x]) continue;
    for (const auto& e : g.incident(x)) {
      const double nd = d + edge_length(g, e);
      if (nd < dist[e.terminus]) {
        dist[e.terminus] = nd;
        heap.emplace(nd, e.terminus);
      }
    }
  }
  return dist;
}

inline std::vector<double> distances_from(const MagneticGraph& g, VertexIndex source) {
  return distances_from(g, std::vector<VertexIndex>{source});
}

/// d_{w,a}(x, y) within the stored graph.
inline double dist(const MagneticGraph& g, VertexIndex x, VertexIndex y) {
  const double d = distances_from(g, x)[y];
  if (!std::isfinite(d)) throw PreconditionError("vertex '" + g.id(y) + "' unreachable from '" + g.id(x) + "'");
  return d;
}

/// U_R = {x : d_{w,a}(x0, x) <= R}, ascending.
inline std::vector<VertexIndex> metric_ball(const MagneticGraph& g, VertexIndex x0, double radius) {
  if (radius < 0.0) throw PreconditionError("metric ball radius must be nonnegative");
  const auto d = distances_from(g, x0);
  std::vector<VertexIndex> out;
  for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
    if (d[v] <= radius + kDistanceSlack) out.push_back(v);
  }
  return out;
}

enum class CutoffKind { phi_n, psi_r };

/// A cut-off function with values in [0, 1] on every vertex of the graph.
struct CutoffFamily {
  CutoffKind kind = CutoffKind::phi_n;
  double parameter = 0.0;  // n or R
  VertexIndex center = 0;
  std::vector<double> values;
};

/// phi_n(x) = ((2n - r(x)) / n v 0) ^ 1 with r the hop distance from x0.
inline CutoffFamily phi_n(const MagneticGraph& g, VertexIndex x0, int n) {
  if (n < 1) throw PreconditionError("phi_n needs n >= 1");
  const auto r = hop_distances(g, x0);
  CutoffFamily c{CutoffKind::phi_n, static_cast<double>(n), x0, std::vector<double>(g.vertex_count())};
  for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
    const int numerator = std::clamp(2 * n - r[v], 0, n);
    c.values[v] = static_cast<double>(numerator) / n;
  }
  return c;
}

/// psi_R(x) = min{1, d_{w,a}(x, V \ U_{R+1})}, computed by multi-source
/// Dijkstra. `frontier` vertices (where the stored graph is cut off) are added
/// to the sources; this can only lower the values.
inline CutoffFamily psi_r(const MagneticGraph& g, VertexIndex x0, double radius,
                          const std::vector<char>& frontier = {}) {
  if (radius < 0.0) throw PreconditionError("psi_R needs R >= 0");
  const auto d0 = distances_from(g, x0);
  std::vector<VertexIndex> sources;
  bool outside = false;
  for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
    const bool beyond = d0[v] > radius + 1.0 + kDistanceSlack;
    outside = outside || beyond;
    if (beyond || (!frontier.empty() && frontier[v])) sources.push_back(v);
  }
  if (!outside) {
    throw TruncationError("stored graph does not extend beyond U_{R+1} for R = " + std::to_string(radius));
  }
  const auto d = distances_from(g, sources);
  CutoffFamily c{CutoffKind::psi_r, radius, x0, std::vector<double>(g.vertex_count())};
  for (VertexIndex v = 0; v < g.vertex_count(); ++v) c.values[v] = std::min(1.0, d[v]);
  return c;
}

/// Properties (i)-(iii) of phi_n. The gradient bound is checked exactly:
/// every value must be an integer multiple k/n and neighboring multiples may
/// differ by at most one.
inline CheckResult check_phi_properties(const MagneticGraph& g, const CutoffFamily& phi) {
  const int n = static_cast<int>(phi.parameter);
  CheckResult res("phi_n_properties", 0.0);
  const auto r = hop_distances(g, phi.center);
  std::vector<int> numerator(g.vertex_count());
  int max_jump = 0;
  for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
    const double value = phi.values[v];
    const int k = static_cast<int>(std::lround(value * n));
    numerator[v] = k;
    if (static_cast<double>(k) / n != value) res.observe(1.0, "not a multiple of 1/n at " + g.id(v));
    if (value < 0.0 || value > 1.0) res.observe(std::max(-value, value - 1.0), "range at " + g.id(v));
    if (r[v] <= n && value != 1.0) res.observe(1.0 - value, "not 1 inside B_n at " + g.id(v));
    if (r[v] >= 2 * n && value != 0.0) res.observe(value, "not 0 outside B_2n at " + g.id(v));
  }
  for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
    const auto& se = g.edge(e);
    const int jump = std::abs(numerator[se.terminus] - numerator[se.origin]);
    max_jump = std::max(max_jump, jump);
    if (jump > 1) res.observe(static_cast<double>(jump - 1) / n, "gradient above 1/n on edge " + std::to_string(e));
  }
  // in units of 1/n, so 1/n itself compares equal
  res.record("sup_gradient", static_cast<double>(max_jump) / n);
  res.record("gradient_bound", 1.0 / n);
  return res;
}

/// Properties (i)-(v) of psi_R. The Lipschitz property is checked over all
/// vertex pairs when `all_pairs` is set, otherwise over adjacent pairs.
inline CheckResult check_psi_properties(const MagneticGraph& g, const CutoffFamily& psi, bool all_pairs,
                                        double tolerance = kIdentityTolerance) {
  CheckResult res("psi_R_properties", tolerance);
  const double radius = psi.parameter;
  const auto d0 = distances_from(g, psi.center);
  std::size_t support = 0;
  for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
    const double value = psi.values[v];
    if (d0[v] <= radius) res.observe(1.0 - value, "(i) at " + g.id(v));
    if (d0[v] > radius + 1.0 + kDistanceSlack) res.observe(std::abs(value), "(ii) at " + g.id(v));
    res.observe(std::max({0.0, -value, value - 1.0}), "(iii) at " + g.id(v));
    if (value != 0.0) {
      ++support;
      if (d0[v] > radius + 1.0 + kDistanceSlack) res.observe(1.0, "(iv) support at " + g.id(v));
    }
  }
  double worst = 0.0;
  if (all_pairs) {
    for (VertexIndex x = 0; x < g.vertex_count(); ++x) {
      const auto dx = distances_from(g, x);
      for (VertexIndex y = x + 1; y < g.vertex_count(); ++y) {
        const double excess = std::abs(psi.values[x] - psi.values[y]) - dx[y];
        worst = std::max(worst, excess);
        res.observe(std::max(0.0, excess), "(v) between " + g.id(x) + " and " + g.id(y));
      }
    }
  } else {
    for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
      const auto& se = g.edge(e);
      const double excess = std::abs(psi.values[se.origin] - psi.values[se.terminus]) - edge_length(g, se);
      worst = std::max(worst, excess);
      res.observe(std::max(0.0, excess), "(v) on edge " + std::to_string(e));
    }
  }
  res.record("support_size", static_cast<double>(support));
  res.record("max_lipschitz_excess", worst);
  return res;
}

/// d_{w,a}(x, y) <= sqrt(w(x) / a([x, y])) for every pair of neighbors.
inline CheckResult check_edge_length_bound(const MagneticGraph& g) {
  CheckResult res("edge_length_bound", kIdentityTolerance);
  for (VertexIndex x = 0; x < g.vertex_count(); ++x) {
    const auto d = distances_from(g, x);
    for (const auto& e : g.incident(x)) {
      const double bound = std::sqrt(g.weight(x) / g.weight(e));
      res.observe(std::max(0.0, d[e.terminus] - bound) / bound, g.id(x) + "->" + g.id(e.terminus));
    }
  }
  return res;
}

struct ProfileRecord {
  int n = 0;
  double min_dist = 0.0;
  double max_dist = 0.0;
  int margin = 0;
  bool stabilized = true;
  std::optional<double> closed_form;
};

/// Per-radius weighted distances from x0 to the combinatorial sphere
/// {r(x) = n}, each computed on the truncation of radius n + margin and
/// recomputed with margin + 2 to flag values that have not settled.
/// A divergent profile is evidence of completeness, never a proof.
struct MetricProfile {
  std::string center;
  int margin = 1;
  std::vector<ProfileRecord> records;
};

inline constexpr double kProfileStabilityTolerance = 1e-9;

namespace detail {
/// Per-hop-layer min and max of the weighted distance from x0, layers 0..max_n.
inline std::vector<std::pair<double, double>> sphere_extents(const MagneticGraph& g, VertexIndex c, int max_n) {
  const auto r = hop_distances(g, c, max_n);
  const auto d = distances_from(g, c);
  std::vector<std::pair<double, double>> out(static_cast<std::size_t>(max_n) + 1,
                                             {std::numeric_limits<double>::infinity(), 0.0});
  for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
    if (r[v] < 0 || r[v] > max_n) continue;
    auto& [lo, hi] = out[r[v]];
    lo = std::min(lo, d[v]);
    hi = std::max(hi, d[v]);
  }
  return out;
}
}  // namespace detail

/// All radii share one truncation of radius max(radii) + margin; the check
/// truncation is two hops larger. Record n carries its effective margin.
inline MetricProfile completeness_profile(const Family& family, std::string_view x0,
                                          const std::vector<int>& radii, int margin) {
  if (margin < 1) throw PreconditionError("profile margin must be at least 1");
  MetricProfile p{std::string(x0), margin, {}};
  if (radii.empty()) return p;
  const int top = *std::max_element(radii.begin(), radii.end());
  if (*std::min_element(radii.begin(), radii.end()) < 0) throw PreconditionError("profile radius must be nonnegative");
  const bool at_root = x0 == family.root_id();
  auto truncation = [&](int radius) {
    return at_root ? family.truncate(radius) : family.truncate_covering(x0, radius);
  };
  const auto t1 = truncation(top + margin);
  const auto e1 = detail::sphere_extents(t1.graph, t1.graph.index_of(x0), top);
  const auto t2 = truncation(top + margin + 2);
  const auto e2 = detail::sphere_extents(t2.graph, t2.graph.index_of(x0), top);
  const int effective = t1.complete() ? 0 : t1.radius;
  for (int n : radii) {
    const auto [lo, hi] = e1[n];
    if (!std::isfinite(lo)) continue;  // finite graph exhausted
    const auto [lo2, hi2] = e2[n];
    ProfileRecord rec{n, lo, hi, effective > 0 ? effective - n : 0, true, std::nullopt};
    rec.stabilized = std::abs(lo - lo2) <= kProfileStabilityTolerance && std::abs(hi - hi2) <= kProfileStabilityTolerance;
    if (at_root) rec.closed_form = family.closed_form_distance(n);
    p.records.push_back(rec);
  }
  return p;
}

inline MetricProfile completeness_profile(const Family& family, std::string_view x0, int max_n, int margin) {
  std::vector<int> radii;
  for (int n = 1; n <= max_n; ++n) radii.push_back(n);
  return completeness_profile(family, x0, radii, margin);
}

/// Profile of a stored graph treated as complete (no larger truncation exists).
inline MetricProfile completeness_profile(const MagneticGraph& g, std::string_view x0, int max_n) {
  MetricProfile p{std::string(x0), 0, {}};
  const auto ext = detail::sphere_extents(g, g.index_of(x0), max_n);
  for (int n = 1; n <= max_n; ++n) {
    const auto [lo, hi] = ext[n];
    if (!std::isfinite(lo)) break;
    p.records.push_back({n, lo, hi, 0, true, std::nullopt});
  }
  return p;
}

inline std::string profile_csv(const MetricProfile& p) {
  std::string out = "n,min_dist,max_dist,margin,stabilized\n";
  char buf[128];
  for (const auto& r : p.records) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%d,%s\n", r.n, r.min_dist, r.max_dist, r.margin,
                  r.stabilized ? "true" : "false");
    out += buf;
  }
  return out;
}

}  // namespace magsa
