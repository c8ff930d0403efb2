#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "magsa/assembly.hpp"
#include "magsa/check_result.hpp"
#include "magsa/fields.hpp"
#include "magsa/harmonic.hpp"
#include "magsa/metric.hpp"
#include "magsa/operators.hpp"

namespace magsa {

// Machine checks of the identities and inequalities of the magnetic calculus.
// Identity violations are measured relative to the sum of magnitudes of the
// elementary products that make up both sides, which bounds the rounding
// error of either evaluation.

namespace detail {

/// (|H| |u|)(x): H with every coefficient replaced by its modulus, applied to |u|.
inline std::vector<double> abs_schrodinger(const MagneticGraph& g, const VertexField& u) {
  std::vector<double> out(g.vertex_count());
  for (VertexIndex x = 0; x < g.vertex_count(); ++x) {
    double s = 0.0;
    for (const auto& e : g.incident(x)) s += g.weight(e) * (std::abs(u[x]) + std::abs(u[e.terminus]));
    out[x] = s / g.weight(x) + std::abs(g.potential(x)) * std::abs(u[x]);
  }
  return out;
}

inline double abs_inner(const MagneticGraph& g, const std::vector<double>& f, const VertexField& h) {
  double s = 0.0;
  for (VertexIndex x = 0; x < g.vertex_count(); ++x) s += g.weight(x) * f[x] * std::abs(h[x]);
  return s;
}

inline void require_support_inside(const MagneticGraph& g, std::span<const double> phi,
                                   const std::vector<VertexIndex>& interior) {
  std::vector<char> inside(g.vertex_count(), 0);
  for (VertexIndex x : interior) inside[x] = 1;
  for (VertexIndex x = 0; x < g.vertex_count(); ++x) {
    if (phi[x] != 0.0 && !inside[x]) {
      throw PreconditionError("cut-off support escapes the harmonic interior at '" + g.id(x) + "'");
    }
  }
}

}  // namespace detail

/// (d_sigma u, Y) = (u, delta_sigma Y).
inline CheckResult check_adjointness(const MagneticGraph& g, const VertexField& u, const EdgeField& y,
                                     double tolerance = kIdentityTolerance) {
  CheckResult res("adjointness", tolerance);
  const Complex lhs = inner_e(g, d_sigma(g, u), y);
  const Complex rhs = inner_v(g, u, delta_sigma(g, y));
  double scale = 0.0;
  for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
    const auto& se = g.edge(e);
    scale += se.weight * (std::abs(u[se.terminus]) + std::abs(u[se.origin])) * std::abs(y[e]);
  }
  res.observe(relative_gap(std::abs(lhs - rhs), scale), "global");
  res.record("lhs_re", lhs.real());
  res.record("lhs_im", lhs.imag());
  return res;
}

/// delta_sigma d_sigma u = Delta_sigma u at every vertex.
inline CheckResult check_factorization(const MagneticGraph& g, const VertexField& u,
                                       double tolerance = kIdentityTolerance) {
  CheckResult res("factorization", tolerance);
  const VertexField lhs = delta_sigma(g, d_sigma(g, u));
  const VertexField rhs = laplacian_sigma(g, u);
  for (VertexIndex x = 0; x < g.vertex_count(); ++x) {
    double scale = 0.0;
    for (const auto& e : g.incident(x)) scale += g.weight(e) * (std::abs(u[x]) + std::abs(u[e.terminus]));
    scale /= g.weight(x);
    res.observe(relative_gap(std::abs(lhs[x] - rhs[x]), scale), [&] { return g.id(x); });
  }
  return res;
}

/// (H u, v) = (u, H v).
inline CheckResult check_symmetry(const MagneticGraph& g, const VertexField& u, const VertexField& v,
                                  double tolerance = kIdentityTolerance) {
  CheckResult res("symmetry", tolerance);
  const Complex lhs = inner_v(g, schrodinger(g, u), v);
  const Complex rhs = inner_v(g, u, schrodinger(g, v));
  const double scale = detail::abs_inner(g, detail::abs_schrodinger(g, u), v) +
                       detail::abs_inner(g, detail::abs_schrodinger(g, v), u);
  res.observe(relative_gap(std::abs(lhs - rhs), scale), "global");
  return res;
}

/// (Delta_sigma u, u) = (d_sigma u, d_sigma u) >= 0, and (H u, u) is real.
inline CheckResult check_form_nonnegativity(const MagneticGraph& g, const VertexField& u,
                                            double tolerance = kIdentityTolerance) {
  CheckResult res("form_nonnegativity", tolerance);
  const Complex lap = inner_v(g, laplacian_sigma(g, u), u);
  const EdgeField du = d_sigma(g, u);
  const double energy = inner_e(g, du, du).real();
  const Complex h = inner_v(g, schrodinger(g, u), u);
  double scale = 0.0;
  for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
    const auto& se = g.edge(e);
    const double m = std::abs(u[se.origin]) + std::abs(u[se.terminus]);
    scale += se.weight * m * m;
  }
  const double hscale = detail::abs_inner(g, detail::abs_schrodinger(g, u), u);
  res.observe(relative_gap(std::abs(lap - energy), scale), "form identity");
  res.observe(relative_gap(std::max(0.0, -energy), scale), "negative energy");
  res.observe(relative_gap(std::abs(h.imag()), hscale), "imaginary part of (Hu,u)");
  res.record("energy", energy);
  return res;
}

/// Leibniz rule: Delta_sigma(uv)(x) = (Delta_sigma u)(x) v(x)
///   + (1/w(x)) sum_{e in O_x} a(e) sigma(reverse e) u(t(e)) (v(x) - v(t(e))).
inline CheckResult check_leibniz(const MagneticGraph& g, const VertexField& u, const VertexField& v,
                                 double tolerance = kIdentityTolerance) {
  CheckResult res("leibniz", tolerance);
  const VertexField lhs = laplacian_sigma(g, u.times(v));
  const VertexField lap_u = laplacian_sigma(g, u);
  for (VertexIndex x = 0; x < g.vertex_count(); ++x) {
    Complex correction{};
    double scale = 0.0;
    for (const auto& e : g.incident(x)) {
      const VertexIndex t = e.terminus;
      const double a = g.weight(e);
      correction += a * std::conj(g.phase(e)) * u[t] * (v[x] - v[t]);
      scale += a * (std::abs(u[x]) * std::abs(v[x]) + std::abs(u[t]) * (std::abs(v[x]) + 2.0 * std::abs(v[t])));
    }
    const Complex rhs = lap_u[x] * v[x] + correction / g.weight(x);
    res.observe(relative_gap(std::abs(lhs[x] - rhs), scale / g.weight(x)), [&] { return g.id(x); });
  }
  return res;
}

/// Kato inequality |u| (Delta |u|) <= Re((Delta_sigma u) conj(u)) pointwise,
/// with Delta the sigma == 1 Laplacian.
inline CheckResult check_kato(const MagneticGraph& g, const VertexField& u, double tolerance = kIdentityTolerance) {
  CheckResult res("kato", tolerance);
  const VertexField modulus = u.modulus();
  const VertexField lap_abs = laplacian_plain(g, modulus);
  const VertexField lap_u = laplacian_sigma(g, u);
  double min_slack = std::numeric_limits<double>::infinity();
  for (VertexIndex x = 0; x < g.vertex_count(); ++x) {
    const double lhs = modulus[x].real() * lap_abs[x].real();
    const double rhs = (lap_u[x] * std::conj(u[x])).real();
    double scale = 0.0;
    for (const auto& e : g.incident(x)) scale += g.weight(e) * std::abs(u[x]) * (std::abs(u[x]) + std::abs(u[e.terminus]));
    scale /= g.weight(x);
    min_slack = std::min(min_slack, rhs - lhs);
    res.observe(relative_gap(std::max(0.0, lhs - rhs), scale), [&] { return g.id(x); });
  }
  res.record("min_slack", min_slack);
  return res;
}

/// Product rule for the quadratic form, no harmonicity assumed:
/// (H(u phi), u phi) = (phi H u, u phi)
///   + sum_x sum_{e in O_x} a(e) sigma(reverse e) u(t(e)) (phi(x) - phi(t(e))) conj(u(x)) phi(x).
inline CheckResult check_general_product_identity(const MagneticGraph& g, const VertexField& u,
                                                  std::span<const double> phi,
                                                  double tolerance = kIdentityTolerance) {
  CheckResult res("general_product_identity", tolerance);
  const VertexField uphi = u.times(phi);
  const Complex lhs = inner_v(g, schrodinger(g, uphi), uphi);
  const VertexField phi_hu = schrodinger(g, u).times(phi);
  Complex rhs = inner_v(g, phi_hu, uphi);
  double scale = detail::abs_inner(g, detail::abs_schrodinger(g, uphi), uphi) +
                 detail::abs_inner(g, detail::abs_schrodinger(g, u), uphi.times(phi));
  for (VertexIndex x = 0; x < g.vertex_count(); ++x) {
    for (const auto& e : g.incident(x)) {
      const VertexIndex t = e.terminus;
      const double a = g.weight(e);
      rhs += a * std::conj(g.phase(e)) * u[t] * (phi[x] - phi[t]) * std::conj(u[x]) * phi[x];
      scale += a * std::abs(u[t]) * (std::abs(phi[x]) + std::abs(phi[t])) * std::abs(u[x]) * std::abs(phi[x]);
    }
  }
  res.observe(relative_gap(std::abs(lhs - rhs), scale), "global");
  res.record("lhs_re", lhs.real());
  return res;
}

/// Edge-sum form of (H(u phi), u phi) for H u = 0 on supp phi:
/// sum_{e in E_s} a(e) [ Re sigma(rev e) (u1(t)u1(o) + u2(t)u2(o))
///                      + Im sigma(rev e) (-u1(o)u2(t) + u1(t)u2(o)) ] (phi(o) - phi(t))^2.
inline double ground_form_edge_sum(const MagneticGraph& g, const VertexField& u, std::span<const double> phi) {
  double s = 0.0;
  for (const auto& e : g.edges()) {
    const Complex back = std::conj(e.phase);
    const Complex ut = u[e.terminus];
    const Complex uo = u[e.origin];
    const double dphi = phi[e.origin] - phi[e.terminus];
    s += e.weight *
         (back.real() * (ut.real() * uo.real() + ut.imag() * uo.imag()) +
          back.imag() * (-uo.real() * ut.imag() + ut.real() * uo.imag())) *
         dphi * dphi;
  }
  return s;
}

/// The same quantity written as one half of a sum over all oriented edges.
inline double ground_form_half_sum(const MagneticGraph& g, const VertexField& u, std::span<const double> phi) {
  double s = 0.0;
  for (VertexIndex x = 0; x < g.vertex_count(); ++x) {
    for (const auto& e : g.incident(x)) {
      const Complex back = std::conj(g.phase(e));
      const Complex ut = u[e.terminus];
      const Complex uo = u[x];
      const double dphi = phi[x] - phi[e.terminus];
      s += g.weight(e) *
           (back.real() * (ut.real() * uo.real() + ut.imag() * uo.imag()) +
            back.imag() * (-uo.real() * ut.imag() + ut.real() * uo.imag())) *
           dphi * dphi;
    }
  }
  return 0.5 * s;
}

/// Agreement of the edge-sum and half-oriented-sum forms.
inline CheckResult check_pairing_consistency(const MagneticGraph& g, const VertexField& u,
                                             std::span<const double> phi,
                                             double tolerance = kIdentityTolerance) {
  CheckResult res("pairing_consistency", tolerance);
  const double edges = ground_form_edge_sum(g, u, phi);
  const double half = ground_form_half_sum(g, u, phi);
  double scale = 0.0;
  for (const auto& e : g.edges()) {
    const double dphi = phi[e.origin] - phi[e.terminus];
    scale += e.weight * 2.0 * std::abs(u[e.terminus]) * std::abs(u[e.origin]) * dphi * dphi;
  }
  res.observe(relative_gap(std::abs(edges - half), scale), "global");
  res.record("edge_sum", edges);
  res.record("half_sum", half);
  return res;
}

/// Ground-state form identity: for H u = 0 on supp phi,
/// (H(u phi), u phi) equals ground_form_edge_sum.
inline CheckResult check_ground_form_identity(const MagneticGraph& g, const HarmonicExtension& ext,
                                              std::span<const double> phi,
                                              double tolerance = kSolveTolerance) {
  detail::require_support_inside(g, phi, ext.interior);
  CheckResult res("ground_form_identity", tolerance);
  const VertexField& u = ext.solution;
  const VertexField uphi = u.times(phi);
  const Complex lhs = inner_v(g, schrodinger(g, uphi), uphi);
  const double rhs = ground_form_edge_sum(g, u, phi);
  double scale = detail::abs_inner(g, detail::abs_schrodinger(g, uphi), uphi);
  for (const auto& e : g.edges()) {
    const double dphi = phi[e.origin] - phi[e.terminus];
    scale += e.weight * 2.0 * std::abs(u[e.terminus]) * std::abs(u[e.origin]) * dphi * dphi;
  }
  res.observe(relative_gap(std::abs(lhs - rhs), scale), "global");
  res.record("lhs_re", lhs.real());
  res.record("lhs_im", lhs.imag());
  res.record("rhs", rhs);
  return res;
}

/// Maximum degree over `vertices` and maximum of a(e)/w(x) over those
/// vertices and all their incident edges.
inline std::pair<std::size_t, double> degree_weight_maxima(const MagneticGraph& g,
                                                           const std::vector<VertexIndex>& vertices) {
  std::size_t m = 0;
  double ratio = 0.0;
  for (VertexIndex x : vertices) {
    m = std::max(m, g.degree(x));
    for (const auto& e : g.incident(x)) ratio = std::max(ratio, g.weight(e) / g.weight(x));
  }
  return {m, ratio};
}

namespace detail {
inline void check_chain(CheckResult& res, const std::vector<std::pair<std::string, double>>& chain) {
  double scale = 0.0;
  for (const auto& [name, value] : chain) scale = std::max(scale, std::abs(value));
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    const double slack = chain[i + 1].second - chain[i].second;
    res.record("slack_" + chain[i].first + "_" + chain[i + 1].first, slack);
    res.observe(relative_gap(std::max(0.0, -slack), scale),
                [&] { return chain[i].first + " <= " + chain[i + 1].first; });
  }
  for (const auto& [name, value] : chain) res.record(name, value);
}
}  // namespace detail

/// Cut-off energy chain for phi_n around x0, u = ext.solution:
///   (H(u phi_n), u phi_n)
///     <= (1/n^2) sum_{e in B_2n} a(e) (|u(t)|^2 + |u(o)|^2)
///     <= (m_2n a_2n / n^2) sum_{x in B_2n} w(x) |u(x)|^2
///     <= (m_2n a_2n / n^2) ||u||^2.
/// The edge sum runs over edges with both endpoints in B_2n, the only edges
/// on which phi_n varies. With `form_lower_bound` c, also checks
/// c ||u phi_n||^2 <= (H(u phi_n), u phi_n), and for c >= 1 the final bound
/// ||u phi_n||^2 <= (m_2n a_2n / n^2) ||u||^2.
inline CheckResult check_cutoff_energy_bound(const MagneticGraph& g, const HarmonicExtension& ext, int n,
                                             VertexIndex x0, std::optional<double> form_lower_bound = {},
                                             double tolerance = kSolveTolerance) {
  const CutoffFamily phi = phi_n(g, x0, n);
  detail::require_support_inside(g, phi.values, ext.interior);
  CheckResult res("cutoff_energy_bound_phi", tolerance);
  const VertexField& u = ext.solution;
  const VertexField uphi = u.times(phi.values);
  const double energy = inner_v(g, schrodinger(g, uphi), uphi).real();
  const Ball b2n = ball(g, x0, 2 * n);
  const double inv_n2 = 1.0 / (static_cast<double>(n) * n);
  double edge_sum = 0.0;
  for (EdgeIndex k : b2n.interior_edges) {
    const auto& e = g.edge(k);
    edge_sum += e.weight * (std::norm(u[e.terminus]) + std::norm(u[e.origin]));
  }
  const auto [m, a] = degree_weight_maxima(g, b2n.vertices);
  const double factor = static_cast<double>(m) * a * inv_n2;
  double ball_mass = 0.0;
  for (VertexIndex x : b2n.vertices) ball_mass += g.weight(x) * std::norm(u[x]);
  const double total_mass = norm_v(g, u) * norm_v(g, u);
  const double cut_mass = norm_v(g, uphi) * norm_v(g, uphi);

  std::vector<std::pair<std::string, double>> chain;
  if (form_lower_bound) chain.emplace_back("coercive_mass", *form_lower_bound * cut_mass);
  chain.emplace_back("energy", energy);
  chain.emplace_back("edge_bound", inv_n2 * edge_sum);
  chain.emplace_back("ball_bound", factor * ball_mass);
  chain.emplace_back("global_bound", factor * total_mass);
  detail::check_chain(res, chain);
  if (form_lower_bound && *form_lower_bound >= 1.0) {
    const double slack = factor * total_mass - cut_mass;
    res.record("final_slack", slack);
    res.observe(relative_gap(std::max(0.0, -slack), factor * total_mass), "final bound");
  }
  res.record("m_2n", static_cast<double>(m));
  res.record("a_2n", a);
  res.record("cut_mass", cut_mass);
  return res;
}

/// Cut-off energy chain for psi_R around x0, u = ext.solution. With S the
/// shell of vertices incident to an edge on which psi_R varies and N a degree
/// bound:
///   (H(u psi), u psi)
///     <= (1/2) sum_x sum_{e in O_x} a(e) |u(x)|^2 (psi(x) - psi(t(e)))^2
///     <= (1/2) sum_{x in S} sum_{e in O_x} a(e) |u(x)|^2 d_{w,a}(x, t(e))^2
///     <= (N/2) sum_{x in S} w(x) |u(x)|^2.
/// S contains A = U_{R+1} \ U_R but also vertices of U_R next to A and
/// vertices outside U_{R+1} next to A. The same chain summed over A alone
/// does not hold in general; its values and slacks are recorded as
/// annulus_* details but not checked.
inline CheckResult check_psi_energy_bound(const MagneticGraph& g, const HarmonicExtension& ext, double radius,
                                          VertexIndex x0, std::optional<int> degree_bound = {},
                                          std::optional<double> form_lower_bound = {},
                                          const std::vector<char>& frontier = {},
                                          double tolerance = kSolveTolerance) {
  const CutoffFamily psi = psi_r(g, x0, radius, frontier);
  detail::require_support_inside(g, psi.values, ext.interior);
  CheckResult res("cutoff_energy_bound_psi", tolerance);
  const VertexField& u = ext.solution;
  const VertexField upsi = u.times(psi.values);
  const double energy = inner_v(g, schrodinger(g, upsi), upsi).real();
  const auto d0 = distances_from(g, x0);
  const int n_bound = degree_bound.value_or(static_cast<int>(g.max_degree()));

  double gradient_sum = 0.0;
  double annulus_lengths = 0.0;
  double annulus_mass = 0.0;
  double shell_lengths = 0.0;
  double shell_mass = 0.0;
  for (VertexIndex x = 0; x < g.vertex_count(); ++x) {
    const double mass = std::norm(u[x]);
    bool varies = false;
    for (const auto& e : g.incident(x)) {
      const double jump = psi.values[x] - psi.values[e.terminus];
      gradient_sum += g.weight(e) * mass * jump * jump;
      varies = varies || jump != 0.0;
    }
    const bool in_annulus = d0[x] > radius + kDistanceSlack && d0[x] <= radius + 1.0 + kDistanceSlack;
    if (!in_annulus && !varies) continue;
    const auto dx = distances_from(g, x);
    double lengths = 0.0;
    for (const auto& e : g.incident(x)) lengths += g.weight(e) * mass * dx[e.terminus] * dx[e.terminus];
    if (in_annulus) {
      annulus_lengths += lengths;
      annulus_mass += g.weight(x) * mass;
    }
    if (varies) {
      shell_lengths += lengths;
      shell_mass += g.weight(x) * mass;
    }
  }
  const double cut_mass = norm_v(g, upsi) * norm_v(g, upsi);
  std::vector<std::pair<std::string, double>> chain;
  if (form_lower_bound) chain.emplace_back("coercive_mass", *form_lower_bound * cut_mass);
  chain.emplace_back("energy", energy);
  chain.emplace_back("gradient_bound", 0.5 * gradient_sum);
  chain.emplace_back("shell_length_bound", 0.5 * shell_lengths);
  chain.emplace_back("shell_degree_bound", 0.5 * n_bound * shell_mass);
  detail::check_chain(res, chain);
  if (form_lower_bound && *form_lower_bound >= 1.0) {
    const double bound = 0.5 * n_bound * shell_mass;
    res.record("final_slack", bound - cut_mass);
    res.observe(relative_gap(std::max(0.0, cut_mass - bound), std::max(bound, cut_mass)), "final bound");
  }
  res.record("annulus_length_bound", 0.5 * annulus_lengths);
  res.record("annulus_degree_bound", 0.5 * n_bound * annulus_mass);
  res.record("annulus_slack_gradient", 0.5 * annulus_lengths - 0.5 * gradient_sum);
  res.record("annulus_slack_energy", 0.5 * n_bound * annulus_mass - energy);
  if (form_lower_bound && *form_lower_bound >= 1.0) {
    res.record("annulus_final_slack", 0.5 * n_bound * annulus_mass - cut_mass);
  }
  res.record("degree_bound", n_bound);
  res.record("cut_mass", cut_mass);
  return res;
}

/// w(x) M[x,y] = conj(w(y) M[y,x]) on the assembled operator: exact on the
/// stored weighted form, to rounding on M, and S Hermitian within 1e-12.
inline CheckResult check_hermiticity(const TruncatedOperator& op, double tolerance = kIdentityTolerance) {
  CheckResult res("hermiticity", tolerance);
  const DenseMatrix form(op.form);
  const DenseMatrix m(op.matrix);
  const Eigen::Index n = op.dimension();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double f = std::abs(form(i, j) - std::conj(form(j, i)));
      res.observe(f == 0.0 ? 0.0 : 1.0 + f, [&] { return "form(" + std::to_string(i) + "," + std::to_string(j) + ")"; });
      const Complex lhs = op.weights[i] * m(i, j);
      const Complex rhs = std::conj(op.weights[j] * m(j, i));
      res.observe(relative_gap(std::abs(lhs - rhs), std::abs(lhs) + std::abs(rhs)),
                  [&] { return "M(" + std::to_string(i) + "," + std::to_string(j) + ")"; });
    }
  }
  if (op.symmetrized) {
    const DenseMatrix s(*op.symmetrized);
    const double norm = std::max(1.0, s.cwiseAbs().maxCoeff());
    res.observe(relative_gap((s - s.adjoint()).cwiseAbs().maxCoeff(), norm), "symmetrized");
  }
  return res;
}

}  // namespace magsa
