#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "magsa/assembly.hpp"

namespace magsa {

/// Required eigenpair residual ||S v - lambda v|| / ||v||.
inline constexpr double kEigenResidualTolerance = 1e-9;
/// Above this dimension the iterative solver replaces the dense one.
inline constexpr Eigen::Index kDenseSpectrumLimit = 500;

struct SpectrumResult {
  std::vector<double> eigenvalues;  // ascending
  std::vector<double> residuals;    // per eigenpair
  std::string method;               // "dense" or "lanczos"
};

inline DenseMatrix to_dense(const SparseMatrix& m) { return DenseMatrix(m); }

namespace detail {

inline double residual_norm(const SparseMatrix& s, const Eigen::VectorXcd& v, double lambda) {
  return (s * v - lambda * v).norm() / v.norm();
}

inline SpectrumResult dense_spectrum(const SparseMatrix& s, int k) {
  const DenseMatrix dense(s);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(dense);
  if (solver.info() != Eigen::Success) throw NumericError("dense Hermitian eigensolver failed");
  SpectrumResult out;
  out.method = "dense";
  for (int i = 0; i < k; ++i) {
    const double lambda = solver.eigenvalues()[i];
    out.eigenvalues.push_back(lambda);
    out.residuals.push_back(residual_norm(s, solver.eigenvectors().col(i), lambda));
  }
  return out;
}

/// Lower bound on the spectrum from Gershgorin discs.
inline double gershgorin_lower(const SparseMatrix& s) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(s.rows());
  Eigen::VectorXd radius = Eigen::VectorXd::Zero(s.rows());
  for (Eigen::Index k = 0; k < s.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(s, k); it; ++it) {
      if (it.row() == it.col()) {
        diag[it.row()] = it.value().real();
      } else {
        radius[it.row()] += std::abs(it.value());
      }
    }
  }
  return (diag - radius).minCoeff();
}

/// Shift-invert Lanczos with full reorthogonalization. The shift sits below
/// the Gershgorin bound so S - shift is positive definite and the smallest
/// eigenvalues of S become the dominant ones of the inverse. The Krylov space
/// grows until every requested Ritz pair meets the residual tolerance.
inline SpectrumResult lanczos_spectrum(const SparseMatrix& s, int k) {
  const Eigen::Index n = s.rows();
  const double scale = std::max(1.0, std::abs(gershgorin_lower(s)));
  const double shift = gershgorin_lower(s) - scale;
  SparseMatrix shifted = s;
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) -= shift;
  Eigen::SimplicialLDLT<SparseMatrix> factor(shifted);
  if (factor.info() != Eigen::Success) throw NumericError("sparse factorization failed in shift-invert Lanczos");

  Eigen::MatrixXcd basis(n, std::min<Eigen::Index>(n, 64));
  std::vector<double> alpha;
  std::vector<double> beta;
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = 1.0 + 0.25 * std::sin(0.7 * static_cast<double>(i));
  v.normalize();

  SpectrumResult out;
  out.method = "lanczos";
  double worst = 0.0;
  Eigen::Index m = 0;
  while (m < n) {
    if (m == basis.cols()) basis.conservativeResize(n, std::min<Eigen::Index>(n, 2 * basis.cols()));
    basis.col(m) = v;
    Eigen::VectorXcd w = factor.solve(v);
    const double a = (v.adjoint() * w)(0).real();
    alpha.push_back(a);
    // two passes of classical Gram-Schmidt against the whole basis
    for (int pass = 0; pass < 2; ++pass) {
      w -= basis.leftCols(m + 1) * (basis.leftCols(m + 1).adjoint() * w);
    }
    const double b = w.norm();
    ++m;
    const bool exhausted = m == n;
    const bool probe = exhausted || (m >= static_cast<Eigen::Index>(k) + 8 && m % 8 == 0);
    if (probe) {
      Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
      Eigen::VectorXd sub = Eigen::VectorXd::Zero(std::max<Eigen::Index>(m - 1, 1));
      for (Eigen::Index i = 0; i + 1 < m; ++i) sub[i] = beta[i];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      tri.computeFromTridiagonal(diag, sub.head(std::max<Eigen::Index>(m - 1, 0)), Eigen::ComputeEigenvectors);
      if (tri.info() != Eigen::Success) throw NumericError("tridiagonal eigensolver failed");
      const int available = static_cast<int>(std::min<Eigen::Index>(m, k));
      std::vector<double> values;
      std::vector<double> residuals;
      worst = 0.0;
      for (int i = 0; i < available; ++i) {
        // largest eigenvalues of the inverse are the last ones
        const Eigen::Index col = m - 1 - i;
        const double theta = tri.eigenvalues()[col];
        const double lambda = shift + 1.0 / theta;
        Eigen::VectorXcd y = basis.leftCols(m) * tri.eigenvectors().col(col).cast<Complex>();
        const double r = residual_norm(s, y, lambda);
        values.push_back(lambda);
        residuals.push_back(r);
        worst = std::max(worst, r);
      }
      if (available == k && worst <= kEigenResidualTolerance) {
        out.eigenvalues = std::move(values);
        out.residuals = std::move(residuals);
        return out;
      }
      if (exhausted) break;
    }
    if (b <= 1e-12 * std::max(1.0, std::abs(a))) {
      // invariant subspace found; continue from a fresh direction so that
      // repeated eigenvalues are not missed
      beta.push_back(0.0);
      for (Eigen::Index i = 0; i < n; ++i) v[i] = std::cos(1.3 * static_cast<double>(i * (m + 1)) + 0.1 * m);
      for (int pass = 0; pass < 2; ++pass) {
        v -= basis.leftCols(m) * (basis.leftCols(m).adjoint() * v);
      }
      v.normalize();
    } else {
      beta.push_back(b);
      v = w / b;
    }
  }
  throw NumericError("Lanczos did not converge; achieved residual " + std::to_string(worst));
}

}  // namespace detail

/// The k smallest eigenvalues of the symmetrized truncation, ascending, each
/// with its residual. Dense up to kDenseSpectrumLimit, Lanczos above.
inline SpectrumResult spectrum(const TruncatedOperator& op, int k) {
  if (!op.symmetrized) throw PreconditionError("spectrum needs a symmetrized operator");
  const Eigen::Index n = op.dimension();
  if (k < 1 || k > n) throw PreconditionError("requested eigenvalue count outside [1, dimension]");
  SpectrumResult r = n <= kDenseSpectrumLimit ? detail::dense_spectrum(*op.symmetrized, k)
                                              : detail::lanczos_spectrum(*op.symmetrized, k);
  std::vector<std::size_t> idx(r.eigenvalues.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return r.eigenvalues[a] < r.eigenvalues[b]; });
  SpectrumResult sorted{{}, {}, r.method};
  for (auto i : idx) {
    sorted.eigenvalues.push_back(r.eigenvalues[i]);
    sorted.residuals.push_back(r.residuals[i]);
  }
  const double worst = *std::max_element(sorted.residuals.begin(), sorted.residuals.end());
  if (worst > kEigenResidualTolerance) {
    throw NumericError("eigenpair residual " + std::to_string(worst) + " exceeds tolerance");
  }
  return sorted;
}

inline SpectrumResult spectrum(const MagneticGraph& g, const Ball& b, int k) {
  return spectrum(assemble(g, b, true), k);
}

}  // namespace magsa
