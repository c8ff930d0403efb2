#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "magsa/families.hpp"
#include "magsa/graph.hpp"
#include "magsa/graph_io.hpp"
#include "magsa/metric.hpp"
#include "magsa/spectrum.hpp"

namespace magsa {

struct AssumptionARecord {
  int n = 0;
  int m = 0;           // max full degree over B_n
  int m_internal = 0;  // same, counting only edges inside B_n
  double a = 0.0;      // max a(e)/w(x), x in B_n, e incident to x
  double ratio = 0.0;  // m a / n^2
  std::optional<Rational> a_sq;      // exact a^2 when the weights allow it
  std::optional<Rational> ratio_sq;  // exact ratio^2
};

/// log(ratio) ~ log(coefficient) + exponent log(n), least squares over the
/// upper half of the radii.
struct PowerLawFit {
  double exponent = 0.0;
  double coefficient = 0.0;
  std::size_t points = 0;
};

struct AssumptionASequence {
  std::string center;
  std::vector<AssumptionARecord> records;
  std::optional<PowerLawFit> trend;
  bool m_monotone = true;
  bool a_monotone = true;
};

inline std::optional<PowerLawFit> fit_power_law(const std::vector<AssumptionARecord>& records) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = records.size() / 2; i < records.size(); ++i) {
    if (records[i].ratio > 0.0) pts.emplace_back(std::log(records[i].n), std::log(records[i].ratio));
  }
  if (pts.size() < 2) return std::nullopt;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(pts.size());
  const double den = k * sxx - sx * sx;
  if (den == 0.0) return std::nullopt;
  const double slope = (k * sxy - sx * sy) / den;
  return PowerLawFit{slope, std::exp((sy - slope * sx) / k), pts.size()};
}

/// m_n, a_n and m_n a_n / n^2 for n = 1..max_n around x0. B_max_n must hold
/// no frontier vertex, so every degree seen is the degree in the full graph.
inline AssumptionASequence assumption_a(const Truncation& t, VertexIndex x0, int max_n) {
  if (max_n < 1) throw PreconditionError("assumption (A) needs max_n >= 1");
  const auto& g = t.graph;
  const auto hops = hop_distances(g, x0, max_n + 1);
  for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
    if (hops[v] >= 0 && hops[v] <= max_n && t.frontier[v]) {
      throw TruncationError("truncation too small: B_" + std::to_string(max_n) + "(" + g.id(x0) +
                            ") reaches frontier vertex '" + g.id(v) + "'; need radius max_n + 1");
    }
  }
  // per-layer maxima, then running maxima over layers
  const auto layers = static_cast<std::size_t>(max_n) + 1;
  std::vector<int> layer_m(layers, 0), layer_m_edge(layers, 0);
  std::vector<double> layer_a(layers, 0.0);
  std::vector<std::optional<Rational>> layer_a_sq(layers);
  const bool exact = t.exact.has_value();
  for (VertexIndex x = 0; x < g.vertex_count(); ++x) {
    const int h = hops[x];
    if (h < 0 || h > max_n) continue;
    const int deg = static_cast<int>(g.degree(x));
    int up = 0;
    for (const auto& e : g.incident(x)) {
      if (hops[e.terminus] == h + 1) ++up;
      const double r = g.weight(e) / g.weight(x);
      layer_a[h] = std::max(layer_a[h], r);
      if (exact) {
        const Rational r_sq = t.exact->edge_weight_sq[e.stored] / t.exact->vertex_weight_sq[x];
        if (!layer_a_sq[h] || *layer_a_sq[h] < r_sq) layer_a_sq[h] = r_sq;
      }
    }
    layer_m[h] = std::max(layer_m[h], deg);
    layer_m_edge[h] = std::max(layer_m_edge[h], deg - up);
  }

  AssumptionASequence seq;
  seq.center = g.id(x0);
  int m_below = layer_m[0];  // max over layers < n
  int m = layer_m[0];
  double a = layer_a[0];
  std::optional<Rational> a_sq = layer_a_sq[0];
  for (int n = 1; n <= max_n; ++n) {
    const int prev_m = m;
    const double prev_a = a;
    m = std::max(m, layer_m[n]);
    a = std::max(a, layer_a[n]);
    if (exact && layer_a_sq[n] && (!a_sq || *a_sq < *layer_a_sq[n])) a_sq = layer_a_sq[n];
    AssumptionARecord rec;
    rec.n = n;
    rec.m = m;
    rec.m_internal = std::max(m_below, layer_m_edge[n]);
    rec.a = a;
    rec.ratio = m * a / (static_cast<double>(n) * n);
    if (exact && a_sq) {
      rec.a_sq = *a_sq;
      const std::int64_t n4 = std::int64_t{n} * n * n * n;
      rec.ratio_sq = Rational(std::int64_t{m} * m) * *a_sq / Rational(n4);
    }
    seq.m_monotone = seq.m_monotone && m >= prev_m;
    seq.a_monotone = seq.a_monotone && a >= prev_a;
    seq.records.push_back(rec);
    m_below = std::max(m_below, layer_m[n]);
  }
  seq.trend = fit_power_law(seq.records);
  return seq;
}

inline AssumptionASequence assumption_a(const Family& family, std::string_view x0, int max_n) {
  const Truncation t = family.truncate_covering(x0, max_n);
  return assumption_a(t, t.graph.index_of(x0), max_n);
}

/// Degree bound: closed form for built-in families; for a stored graph exact
/// when it is complete, otherwise the maximum seen within probe_radius of
/// the root among non-frontier vertices, flagged as a lower bound.
inline DegreeBound bounded_degree(const Family& family) { return family.degree_bound(); }

inline DegreeBound bounded_degree(const Truncation& t, VertexIndex x0, int probe_radius) {
  const auto& g = t.graph;
  if (t.complete()) return {DegreeBoundKind::exact, static_cast<int>(g.max_degree())};
  const auto hops = hop_distances(g, x0, probe_radius);
  int m = 0;
  for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
    if (hops[v] >= 0 && !t.frontier[v]) m = std::max(m, static_cast<int>(g.degree(v)));
  }
  return {DegreeBoundKind::lower_bound_only, m};
}

struct FormBoundRecord {
  int n = 0;
  std::size_t dimension = 0;
  double lambda_min = 0.0;
};

/// lambda_min of the symmetrized Dirichlet truncations S(B_n), with
/// C_est = max(0, -lambda_min(n_max)).
struct FormBoundEstimate {
  std::string center;
  std::vector<FormBoundRecord> records;
  bool monotone = true;  // lambda_min(n+1) <= lambda_min(n) + 1e-10
  double c_est = 0.0;
};

inline constexpr double kMonotoneSlack = 1e-10;

inline FormBoundEstimate form_bound(const Truncation& t, VertexIndex x0, const std::vector<int>& radii) {
  const auto& g = t.graph;
  FormBoundEstimate est;
  est.center = g.id(x0);
  int last = -1;
  for (int n : radii) {
    if (n <= last) throw PreconditionError("form_bound radii must be ascending");
    last = n;
    const Ball b = ball(g, x0, n);
    for (VertexIndex v : b.vertices) {
      if (t.frontier[v]) throw TruncationError("ball B_" + std::to_string(n) + " reaches the truncation frontier");
    }
    const auto spec = spectrum(g, b, 1);
    if (!est.records.empty() && spec.eigenvalues[0] > est.records.back().lambda_min + kMonotoneSlack) {
      est.monotone = false;
    }
    est.records.push_back({n, b.size(), spec.eigenvalues[0]});
  }
  if (!est.records.empty()) est.c_est = std::max(0.0, -est.records.back().lambda_min);
  return est;
}

inline FormBoundEstimate form_bound(const MagneticGraph& g, VertexIndex x0, const std::vector<int>& radii) {
  return form_bound(whole_graph(g), x0, radii);
}

enum class HypothesisStatus { holds, fails, undecidable };

inline std::string_view status_name(HypothesisStatus s) {
  switch (s) {
    case HypothesisStatus::holds: return "holds";
    case HypothesisStatus::fails: return "fails";
    case HypothesisStatus::undecidable: return "undecidable";
  }
  return "?";
}

struct Hypothesis {
  std::string name;
  HypothesisStatus status = HypothesisStatus::undecidable;
  std::string evidence;
  std::vector<std::pair<std::string, double>> values;
};

struct TheoremVerdict {
  int number = 0;
  std::vector<Hypothesis> hypotheses;
  bool applicable = false;          // every hypothesis holds
  bool trivially_applicable = false;  // finite graph: H is a Hermitian matrix
};

struct TheoremReport {
  std::string subject;
  std::string center;
  std::string graph_hash;  // of the graph the sequences were read from
  int max_n = 0;
  bool finite = false;
  std::optional<std::string> notice;
  std::array<TheoremVerdict, 3> theorems;
  std::optional<std::array<bool, 3>> known_classification;
  std::optional<bool> matches_known;
  AssumptionASequence assumption;
  FormBoundEstimate form;
  MetricProfile profile;
  DegreeBound degree;
};

/// Radii 1..16, then powers of two, then max_n.
inline std::vector<int> report_radii(int max_n) {
  std::vector<int> r;
  for (int n = 1; n <= std::min(max_n, 16); ++n) r.push_back(n);
  for (int n = 32; n < max_n; n *= 2) r.push_back(n);
  if (max_n > 16) r.push_back(max_n);
  return r;
}

struct ReportOptions {
  int max_n = 50;
  std::size_t form_bound_dimension_limit = 2000;
  int profile_margin = 1;
};

namespace detail {

inline void finalize(TheoremReport& rep) {
  for (auto& th : rep.theorems) {
    th.applicable = std::all_of(th.hypotheses.begin(), th.hypotheses.end(),
                                [](const Hypothesis& h) { return h.status == HypothesisStatus::holds; });
    th.trivially_applicable = rep.finite;
  }
  if (rep.known_classification) {
    bool same = true;
    for (int i = 0; i < 3; ++i) same = same && rep.theorems[i].applicable == (*rep.known_classification)[i];
    rep.matches_known = same;
  }
}

inline std::vector<int> form_bound_radii(const MagneticGraph& g, VertexIndex x0, const std::vector<int>& radii,
                                         std::size_t limit, const std::vector<char>& frontier) {
  const int top = radii.empty() ? 0 : radii.back();
  const auto hops = hop_distances(g, x0, top);
  std::vector<std::size_t> count(static_cast<std::size_t>(top) + 1, 0);
  std::vector<char> touches(static_cast<std::size_t>(top) + 1, 0);
  for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
    if (hops[v] < 0) continue;
    ++count[hops[v]];
    if (!frontier.empty() && frontier[v]) touches[hops[v]] = 1;
  }
  std::vector<int> out;
  std::size_t total = count[0];
  bool clear = !touches[0];
  int at = 0;
  for (int n : radii) {
    while (at < n) {
      ++at;
      total += count[at];
      clear = clear && !touches[at];
    }
    if (total > limit || !clear) break;
    out.push_back(n);
  }
  return out;
}

inline Hypothesis semibounded_closed_form(double q_inf) {
  // Delta_sigma = delta_sigma d_sigma >= 0, so (Hu,u) >= inf q ||u||^2
  return {"semibounded", HypothesisStatus::holds,
          "q >= " + format_real(q_inf) + " and the magnetic Laplacian is nonnegative",
          {{"C", std::max(0.0, -q_inf)}}};
}

}  // namespace detail

/// Applicability of the three criteria for a built-in family. Hypotheses use
/// closed-form knowledge of the family; the finite sequences are evidence.
inline TheoremReport theorem_report(const Family& family, std::string_view x0, const ReportOptions& opt) {
  TheoremReport rep;
  rep.subject = std::string(family.name());
  rep.center = std::string(x0);
  rep.max_n = opt.max_n;
  rep.finite = family.finite();
  if (rep.finite) rep.notice = "finite graph: H is a Hermitian matrix and trivially self-adjoint";
  rep.known_classification = family.known_classification();

  const Truncation t = family.truncate_covering(x0, opt.max_n);
  const VertexIndex c = t.graph.index_of(x0);
  rep.graph_hash = graph_hash(t.graph);
  int n_top = opt.max_n;
  if (rep.finite) {
    const auto hops = hop_distances(t.graph, c);
    n_top = std::max(1, std::min(opt.max_n, *std::max_element(hops.begin(), hops.end())));
  }
  rep.assumption = assumption_a(t, c, n_top);
  const auto radii = report_radii(n_top);
  rep.form = form_bound(t, c, detail::form_bound_radii(t.graph, c, radii, opt.form_bound_dimension_limit, t.frontier));
  rep.profile = completeness_profile(family, x0, radii, opt.profile_margin);
  rep.degree = bounded_degree(family);
  const double q_inf = family.potential_infimum();

  // Theorem 1
  {
    auto& th = rep.theorems[0];
    th.number = 1;
    const auto constant = family.constant_vertex_weight();
    bool truncation_constant = true;
    const auto& w = t.graph.weights();
    for (double x : w) truncation_constant = truncation_constant && x == w.front();
    Hypothesis h{"constant_vertex_weight", HypothesisStatus::undecidable, "", {}};
    if (!truncation_constant) {
      h.status = HypothesisStatus::fails;
      h.evidence = "w varies on the truncation";
    } else if (constant) {
      h.status = *constant ? HypothesisStatus::holds : HypothesisStatus::fails;
      h.evidence = "family closed form";
    }
    h.values = {{"w_min", *std::min_element(w.begin(), w.end())}, {"w_max", *std::max_element(w.begin(), w.end())}};
    th.hypotheses.push_back(h);
    th.hypotheses.push_back({"potential_bounded_below", HypothesisStatus::holds, "family closed form",
                             {{"inf_q", q_inf}}});
  }
  // Theorem 2
  {
    auto& th = rep.theorems[1];
    th.number = 2;
    Hypothesis h{"assumption_a", HypothesisStatus::undecidable, "", {}};
    const auto limit = family.assumption_a_limit();
    if (limit) {
      h.status = *limit == 0.0 ? HypothesisStatus::holds : HypothesisStatus::fails;
      h.evidence = "closed-form limit of m_n a_n / n^2";
      h.values.emplace_back("limit", *limit);
    }
    if (!rep.assumption.records.empty()) h.values.emplace_back("ratio_at_max_n", rep.assumption.records.back().ratio);
    if (rep.assumption.trend) h.values.emplace_back("fitted_exponent", rep.assumption.trend->exponent);
    th.hypotheses.push_back(h);
    auto sb = detail::semibounded_closed_form(q_inf);
    sb.values.emplace_back("C_est", rep.form.c_est);
    th.hypotheses.push_back(sb);
  }
  // Theorem 3
  {
    auto& th = rep.theorems[2];
    th.number = 3;
    Hypothesis deg{"bounded_degree", HypothesisStatus::undecidable, "", {}};
    switch (rep.degree.kind) {
      case DegreeBoundKind::exact:
        deg.status = HypothesisStatus::holds;
        deg.evidence = "exact degree bound";
        deg.values.emplace_back("N", *rep.degree.value);
        break;
      case DegreeBoundKind::unbounded:
        deg.status = HypothesisStatus::fails;
        deg.evidence = "degree grows without bound in the family";
        deg.values.emplace_back("m_max_n", rep.assumption.records.back().m);
        break;
      case DegreeBoundKind::lower_bound_only:
        deg.evidence = "observed maximum degree is only a lower bound";
        if (rep.degree.value) deg.values.emplace_back("N_lower", *rep.degree.value);
        break;
    }
    th.hypotheses.push_back(deg);
    Hypothesis complete{"metric_complete", HypothesisStatus::undecidable, "", {}};
    if (const auto mc = family.metric_complete()) {
      complete.status = *mc ? HypothesisStatus::holds : HypothesisStatus::fails;
      complete.evidence = rep.finite ? "finite metric space" : "closed-form distance sums diverge";
    }
    if (!rep.profile.records.empty()) complete.values.emplace_back("profile_min_dist_at_max_n", rep.profile.records.back().min_dist);
    th.hypotheses.push_back(complete);
    th.hypotheses.push_back(rep.theorems[1].hypotheses[1]);
  }
  detail::finalize(rep);
  return rep;
}

/// Report for a stored graph. Without `finite` the file is an opaque
/// truncation of an unknown infinite graph: limits, completeness and global
/// bounds are undecidable and only the finite evidence is reported.
inline TheoremReport theorem_report(const MagneticGraph& g, std::string_view x0, bool finite,
                                    const ReportOptions& opt) {
  TheoremReport rep;
  rep.subject = "graph";
  rep.center = std::string(x0);
  rep.graph_hash = graph_hash(g);
  rep.finite = finite;
  if (finite) rep.notice = "finite graph: H is a Hermitian matrix and trivially self-adjoint";
  const VertexIndex c = g.index_of(x0);
  const auto hops = hop_distances(g, c);
  const int ecc = *std::max_element(hops.begin(), hops.end());
  // opaque: the outermost layer may miss neighbors
  Truncation t = whole_graph(g);
  if (!finite) {
    t.radius = ecc;
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) t.frontier[v] = hops[v] == ecc;
  }
  const int n_top = std::max(1, std::min(opt.max_n, finite ? ecc : ecc - 1));
  rep.max_n = n_top;
  if (finite || ecc >= 2) rep.assumption = assumption_a(t, c, n_top);
  const auto radii = report_radii(n_top);
  rep.form = form_bound(t, c, detail::form_bound_radii(g, c, radii, opt.form_bound_dimension_limit, t.frontier));
  rep.profile = completeness_profile(g, x0, n_top);
  rep.degree = bounded_degree(t, c, ecc);

  double q_min = g.potentials().empty() ? 0.0 : *std::min_element(g.potentials().begin(), g.potentials().end());
  const auto& w = g.weights();
  const bool w_constant = std::all_of(w.begin(), w.end(), [&](double x) { return x == w.front(); });
  const auto known = [&](bool exact_value, const char* why) {
    return finite ? Hypothesis{"", exact_value ? HypothesisStatus::holds : HypothesisStatus::fails, why, {}}
                  : Hypothesis{"", HypothesisStatus::undecidable, "opaque truncation", {}};
  };

  auto& th1 = rep.theorems[0];
  th1.number = 1;
  Hypothesis wc = w_constant ? known(true, "w constant on the whole graph")
                             : Hypothesis{"", HypothesisStatus::fails, "w varies on the stored graph", {}};
  wc.name = "constant_vertex_weight";
  wc.values = {{"w_min", *std::min_element(w.begin(), w.end())}, {"w_max", *std::max_element(w.begin(), w.end())}};
  th1.hypotheses.push_back(wc);
  Hypothesis qb = known(true, "finite minimum of q");
  qb.name = "potential_bounded_below";
  qb.values = {{"min_q_observed", q_min}};
  th1.hypotheses.push_back(qb);

  auto& th2 = rep.theorems[1];
  th2.number = 2;
  Hypothesis aa = known(true, "m_n and a_n are eventually constant");
  aa.name = "assumption_a";
  if (!rep.assumption.records.empty()) aa.values.emplace_back("ratio_at_max_n", rep.assumption.records.back().ratio);
  if (rep.assumption.trend) aa.values.emplace_back("fitted_exponent", rep.assumption.trend->exponent);
  th2.hypotheses.push_back(aa);
  Hypothesis sb = known(true, "finite-dimensional H");
  sb.name = "semibounded";
  sb.values = {{"C_est", rep.form.c_est}};
  th2.hypotheses.push_back(sb);

  auto& th3 = rep.theorems[2];
  th3.number = 3;
  Hypothesis deg = known(true, "finite graph");
  deg.name = "bounded_degree";
  if (rep.degree.value) deg.values.emplace_back(finite ? "N" : "N_lower", *rep.degree.value);
  th3.hypotheses.push_back(deg);
  Hypothesis mc = known(true, "finite metric space");
  mc.name = "metric_complete";
  if (!rep.profile.records.empty()) mc.values.emplace_back("profile_min_dist_at_max_n", rep.profile.records.back().min_dist);
  th3.hypotheses.push_back(mc);
  th3.hypotheses.push_back(sb);
  detail::finalize(rep);
  return rep;
}

}  // namespace magsa
