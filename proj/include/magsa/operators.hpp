#pragma once

#include <optional>

#include "magsa/fields.hpp"
#include "magsa/graph.hpp"

namespace magsa {

// Discrete magnetic calculus on a stored graph. Sums run in vertex / stored
// edge order so results are reproducible bit for bit.

/// (f, h) = sum_x w(x) f(x) conj(h(x)).
inline Complex inner_v(const MagneticGraph& g, const VertexField& f, const VertexField& h) {
  Complex s{};
  for (VertexIndex x = 0; x < g.vertex_count(); ++x) s += g.weight(x) * f[x] * std::conj(h[x]);
  return s;
}

inline double norm_v(const MagneticGraph& g, const VertexField& f) {
  double s = 0.0;
  for (VertexIndex x = 0; x < g.vertex_count(); ++x) s += g.weight(x) * std::norm(f[x]);
  return std::sqrt(s);
}

/// (F, G) = sum over stored edges of a(e) F(e) conj(G(e)).
inline Complex inner_e(const MagneticGraph& g, const EdgeField& f, const EdgeField& h) {
  Complex s{};
  for (EdgeIndex e = 0; e < g.edge_count(); ++e) s += g.edge(e).weight * f[e] * std::conj(h[e]);
  return s;
}

/// du(e) = u(t(e)) - u(o(e)).
inline EdgeField d_plain(const MagneticGraph& g, const VertexField& u) {
  EdgeField out(g.edge_count());
  for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
    const auto& se = g.edge(e);
    out[e] = u[se.terminus] - u[se.origin];
  }
  return out;
}

/// Deformed differential: (d_sigma u)(e) = conj(sigma(e)) u(t(e)) - u(o(e)),
/// stored on E_s.
inline EdgeField d_sigma(const MagneticGraph& g, const VertexField& u) {
  EdgeField out(g.edge_count());
  for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
    const auto& se = g.edge(e);
    out[e] = std::conj(se.phase) * u[se.terminus] - u[se.origin];
  }
  return out;
}

/// Deformed co-differential, the adjoint of d_sigma:
/// (delta Y)(x) = (1/w(x)) [ sum_{t(e)=x} sigma(e) a(e) Y(e) - sum_{o(e)=x} a(e) Y(e) ].
inline VertexField delta_sigma(const MagneticGraph& g, const EdgeField& y) {
  VertexField out(g.vertex_count());
  for (VertexIndex x = 0; x < g.vertex_count(); ++x) {
    Complex s{};
    for (const auto& e : g.incident(x)) {
      const auto& se = g.edge(e.stored);
      if (e.reversed) {
        s += se.phase * se.weight * y[e.stored];  // x is the terminus
      } else {
        s -= se.weight * y[e.stored];
      }
    }
    out[x] = s / g.weight(x);
  }
  return out;
}

namespace detail {

inline Complex laplacian_at(const MagneticGraph& g, const VertexField& u, VertexIndex x,
                            bool magnetic) {
  Complex s{};
  for (const auto& e : g.incident(x)) {
    // sigma of the reverse edge is the conjugate of sigma(e)
    const Complex back = magnetic ? std::conj(g.phase(e)) : Complex{1.0, 0.0};
    s += g.weight(e) * (u[x] - back * u[e.terminus]);
  }
  return s / g.weight(x);
}

template <class PointOp>
VertexField evaluate(const MagneticGraph& g, const Ball* restrict_to, PointOp&& op) {
  VertexField out(g.vertex_count());
  if (restrict_to) {
    for (VertexIndex x : restrict_to->vertices) out[x] = op(x);
  } else {
    for (VertexIndex x = 0; x < g.vertex_count(); ++x) out[x] = op(x);
  }
  return out;
}

}  // namespace detail

/// Magnetic Laplacian
///   (Delta_sigma u)(x) = (1/w(x)) sum_{e in O_x} a(e) (u(x) - sigma(reverse e) u(t(e))).
/// With `restrict_to`, only ball vertices are evaluated; other entries are 0.
inline VertexField laplacian_sigma(const MagneticGraph& g, const VertexField& u,
                                   const Ball* restrict_to = nullptr) {
  return detail::evaluate(g, restrict_to,
                          [&](VertexIndex x) { return detail::laplacian_at(g, u, x, true); });
}

/// Physical Laplacian, the sigma == 1 case.
inline VertexField laplacian_plain(const MagneticGraph& g, const VertexField& u,
                                   const Ball* restrict_to = nullptr) {
  return detail::evaluate(g, restrict_to,
                          [&](VertexIndex x) { return detail::laplacian_at(g, u, x, false); });
}

/// Magnetic Schrodinger operator H u = Delta_sigma u + q u.
inline VertexField schrodinger(const MagneticGraph& g, const VertexField& u,
                               const Ball* restrict_to = nullptr) {
  return detail::evaluate(g, restrict_to, [&](VertexIndex x) {
    return detail::laplacian_at(g, u, x, true) + g.potential(x) * u[x];
  });
}

}  // namespace magsa
