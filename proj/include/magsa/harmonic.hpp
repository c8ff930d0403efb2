#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "magsa/fields.hpp"
#include "magsa/operators.hpp"

namespace magsa {

/// Relative residual accepted from the harmonic-extension solve.
inline constexpr double kSolveTolerance = 1e-10;

/// Solution of H u = 0 on an interior vertex set with prescribed boundary
/// values. The solution vanishes off interior and boundary.
struct HarmonicExtension {
  std::vector<VertexIndex> interior;
  std::vector<VertexIndex> boundary;
  VertexField solution;
  double residual = 0.0;  // max over interior of |(H u)(x)|
};

/// Raised when the interior block of H is singular; carries the smallest
/// singular value of that block when it could be computed (NaN otherwise).
class SingularSystemError : public NumericError {
 public:
  SingularSystemError(const std::string& what, double smallest_singular_value)
      : NumericError(what), smallest_singular_value_(smallest_singular_value) {}
  [[nodiscard]] double smallest_singular_value() const noexcept { return smallest_singular_value_; }

 private:
  double smallest_singular_value_;
};

namespace detail {

/// Smallest singular value of the Hermitian matrix D^{-1/2} A D^{-1/2}; its
/// eigenvalues are real so the singular values are their moduli.
inline double smallest_singular_value(const Eigen::SparseMatrix<Complex>& form,
                                      const Eigen::VectorXd& weights) {
  constexpr Eigen::Index kLimit = 3000;
  if (form.rows() > kLimit) return std::numeric_limits<double>::quiet_NaN();
  Eigen::MatrixXcd s(form);
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    for (Eigen::Index j = 0; j < s.cols(); ++j) s(i, j) /= std::sqrt(weights[i]) * std::sqrt(weights[j]);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(s, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().minCoeff();
}

}  // namespace detail

/// Solves (H u)(x) = 0 for x in `interior` with u fixed on the boundary.
/// Every neighbor of an interior vertex must be interior or boundary.
inline HarmonicExtension harmonic_extension(
    const MagneticGraph& g, std::vector<VertexIndex> interior,
    const std::vector<std::pair<VertexIndex, Complex>>& boundary_values) {
  const std::size_t nv = g.vertex_count();
  std::vector<int> local(nv, -1);
  std::vector<char> on_boundary(nv, 0);
  std::sort(interior.begin(), interior.end());
  interior.erase(std::unique(interior.begin(), interior.end()), interior.end());

  HarmonicExtension ext;
  ext.solution = VertexField(nv);
  for (const auto& [v, value] : boundary_values) {
    if (v >= nv) throw PreconditionError("boundary vertex outside the graph");
    on_boundary[v] = 1;
    ext.solution[v] = value;
    ext.boundary.push_back(v);
  }
  for (std::size_t i = 0; i < interior.size(); ++i) {
    const VertexIndex x = interior[i];
    if (x >= nv) throw PreconditionError("interior vertex outside the graph");
    if (on_boundary[x]) throw PreconditionError("vertex '" + g.id(x) + "' is both interior and boundary");
    local[x] = static_cast<int>(i);
  }
  ext.interior = interior;
  if (interior.empty()) return ext;

  const auto n = static_cast<Eigen::Index>(interior.size());
  std::vector<Eigen::Triplet<Complex>> entries;
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
  Eigen::VectorXd weights(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const VertexIndex x = interior[i];
    weights[i] = g.weight(x);
    double degree = 0.0;
    for (const auto& e : g.incident(x)) {
      const double a = g.weight(e);
      degree += a;
      const Complex coupling = -a * std::conj(g.phase(e));
      if (local[e.terminus] >= 0) {
        entries.emplace_back(i, local[e.terminus], coupling);
      } else if (on_boundary[e.terminus]) {
        rhs[i] -= coupling * ext.solution[e.terminus];
      } else {
        throw PreconditionError("neighbor '" + g.id(e.terminus) + "' of interior vertex '" + g.id(x) +
                                "' is neither interior nor boundary");
      }
    }
    entries.emplace_back(i, i, Complex{degree + g.weight(x) * g.potential(x), 0.0});
  }
  Eigen::SparseMatrix<Complex> form(n, n);
  form.setFromTriplets(entries.begin(), entries.end());
  form.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu;
  lu.analyzePattern(form);
  lu.factorize(form);
  if (lu.info() != Eigen::Success) {
    const double smin = detail::smallest_singular_value(form, weights);
    throw SingularSystemError("harmonic extension system is singular (smallest singular value " +
                                  std::to_string(smin) + "); shift the potential",
                              smin);
  }
  const Eigen::VectorXcd x = lu.solve(rhs);
  for (Eigen::Index i = 0; i < n; ++i) ext.solution[interior[i]] = x[i];

  const VertexField hu = schrodinger(g, ext.solution);
  double scale = 0.0;
  for (std::size_t v = 0; v < nv; ++v) scale = std::max(scale, std::abs(ext.solution[static_cast<VertexIndex>(v)]));
  double row_scale = 0.0;
  for (VertexIndex x : interior) {
    ext.residual = std::max(ext.residual, std::abs(hu[x]));
    double row = std::abs(g.potential(x));
    for (const auto& e : g.incident(x)) row += 2.0 * g.weight(e) / g.weight(x);
    row_scale = std::max(row_scale, row);
  }
  if (!std::isfinite(ext.residual) || ext.residual > kSolveTolerance * std::max(1.0, scale * row_scale)) {
    const double smin = detail::smallest_singular_value(form, weights);
    throw SingularSystemError("harmonic extension residual " + std::to_string(ext.residual) +
                                  " too large (smallest singular value " + std::to_string(smin) + ")",
                              smin);
  }
  return ext;
}

}  // namespace magsa
