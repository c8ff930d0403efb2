#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <json.hpp>

#include "magsa/graph.hpp"

namespace magsa {

using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::ColMajor>;
using DenseMatrix = Eigen::MatrixXcd;

/// Matrix of H restricted to functions supported in a ball (Dirichlet
/// truncation), in ball-vertex order.
///
/// `form` holds w(x) M[x,y]; it is Hermitian in the standard sense by
/// construction (entries -a(e) sigma and their exact conjugates). `matrix`
/// is M = D^{-1} form and `symmetrized` is S = D^{1/2} M D^{-1/2}.
struct TruncatedOperator {
  Ball ball;
  std::vector<VertexIndex> order;     // local index -> vertex
  std::vector<int> local;             // vertex -> local index, -1 outside
  Eigen::VectorXd weights;            // w(x) in local order
  SparseMatrix form;
  SparseMatrix matrix;
  std::optional<SparseMatrix> symmetrized;

  [[nodiscard]] Eigen::Index dimension() const { return static_cast<Eigen::Index>(order.size()); }
};

/// Full weighted degree plus potential on the diagonal: edges leaving the ball
/// still contribute, matching H acting on ball-supported functions extended by 0.
inline TruncatedOperator assemble(const MagneticGraph& g, const Ball& b, bool symmetrize) {
  if (b.vertices.empty()) throw PreconditionError("cannot assemble an empty ball");
  TruncatedOperator op;
  op.ball = b;
  op.order = b.vertices;
  op.local.assign(g.vertex_count(), -1);
  const auto n = static_cast<Eigen::Index>(op.order.size());
  op.weights.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    op.local[op.order[i]] = static_cast<int>(i);
    op.weights[i] = g.weight(op.order[i]);
  }

  std::vector<Eigen::Triplet<Complex>> form_entries;
  std::vector<Eigen::Triplet<Complex>> matrix_entries;
  for (Eigen::Index i = 0; i < n; ++i) {
    const VertexIndex x = op.order[i];
    const double wx = g.weight(x);
    double degree = 0.0;
    for (const auto& e : g.incident(x)) {
      const double a = g.weight(e);
      degree += a;
      const int j = op.local[e.terminus];
      if (j < 0) continue;
      // coefficient of u(y) in (H u)(x) is -a([x,y]) sigma([y,x]) / w(x)
      const Complex entry = -a * std::conj(g.phase(e));
      form_entries.emplace_back(i, j, entry);
      matrix_entries.emplace_back(i, j, entry / wx);
    }
    form_entries.emplace_back(i, i, Complex{degree + wx * g.potential(x), 0.0});
    matrix_entries.emplace_back(i, i, Complex{degree / wx + g.potential(x), 0.0});
  }
  op.form.resize(n, n);
  op.form.setFromTriplets(form_entries.begin(), form_entries.end());
  op.matrix.resize(n, n);
  op.matrix.setFromTriplets(matrix_entries.begin(), matrix_entries.end());

  if (symmetrize) {
    Eigen::VectorXd root(n);
    for (Eigen::Index i = 0; i < n; ++i) root[i] = std::sqrt(op.weights[i]);
    SparseMatrix s = op.form;
    for (Eigen::Index k = 0; k < s.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(s, k); it; ++it) {
        // the product is commutative, so S[x,y] and S[y,x] share a denominator
        it.valueRef() /= root[it.row()] * root[it.col()];
      }
    }
    op.symmetrized = std::move(s);
  }
  return op;
}

inline TruncatedOperator assemble(const MagneticGraph& g, VertexIndex x0, int radius,
                                  bool symmetrize) {
  return assemble(g, ball(g, x0, radius), symmetrize);
}

namespace detail {
inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace detail

/// Triplet CSV "row_id,col_id,re,im", row-major by local index.
inline std::string matrix_csv(const MagneticGraph& g, const TruncatedOperator& op,
                              const SparseMatrix& m) {
  std::vector<std::tuple<Eigen::Index, Eigen::Index, Complex>> entries;
  for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      entries.emplace_back(it.row(), it.col(), it.value());
    }
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
  });
  std::string out = "row_id,col_id,re,im\n";
  for (const auto& [r, c, v] : entries) {
    out += g.id(op.order[r]) + "," + g.id(op.order[c]) + "," + detail::format_real(v.real()) + "," +
           detail::format_real(v.imag()) + "\n";
  }
  return out;
}

/// Sidecar describing the index order and weight diagonal of an exported matrix.
inline nlohmann::json matrix_sidecar(const MagneticGraph& g, const TruncatedOperator& op) {
  nlohmann::json ids = nlohmann::json::array();
  nlohmann::json weights = nlohmann::json::array();
  for (Eigen::Index i = 0; i < op.dimension(); ++i) {
    ids.push_back(g.id(op.order[i]));
    weights.push_back(op.weights[i]);
  }
  return {{"center", g.id(op.ball.center)},
          {"radius", op.ball.radius},
          {"dimension", op.dimension()},
          {"index_order", std::move(ids)},
          {"weight_diagonal", std::move(weights)},
          {"symmetrized", op.symmetrized.has_value()}};
}

}  // namespace magsa
