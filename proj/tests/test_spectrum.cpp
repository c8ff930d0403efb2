#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "generators.hpp"
#include "magsa/magsa.hpp"
#include "oracles.hpp"

using namespace magsa;
using testsupport::Complex;

namespace {

/// 3-cycle with w = a = 1 and the same phase on every stored edge.
testsupport::RawGraph cycle3(double theta) {
  testsupport::RawGraph r;
  r.w = {1, 1, 1};
  r.q = {0, 0, 0};
  const Complex s = std::polar(1.0, theta);
  r.edges = {{0, 1, 1.0, s}, {1, 2, 1.0, s}, {2, 0, 1.0, s}};
  return r;
}

}  // namespace

TEST(Assembly, SingleVertexBall) {
  const auto t = Family(FamilyKind::halfline).truncate(2);
  const auto op = assemble(t.graph, 0, 0, true);
  ASSERT_EQ(op.dimension(), 1);
  EXPECT_EQ(DenseMatrix(op.matrix)(0, 0), Complex(1.0, 0.0));
  EXPECT_EQ(matrix_csv(t.graph, op, op.matrix), "row_id,col_id,re,im\n0,0,1,0\n");
  const auto side = matrix_sidecar(t.graph, op);
  EXPECT_EQ(side["index_order"], nlohmann::json::array({"0"}));
  EXPECT_EQ(side["weight_diagonal"][0], 1.0);
}

TEST(Assembly, MatchesDenseOracleOnWholeGraph) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const auto raw = testsupport::random_raw_graph(rng, {});
    const auto g = testsupport::to_graph(raw);
    const auto op = assemble(g, ball(g, 0, raw.n()), true);
    const auto m = testsupport::dense_h(raw);
    const DenseMatrix got(op.matrix);
    for (int i = 0; i < raw.n(); ++i) {
      for (int j = 0; j < raw.n(); ++j) {
        EXPECT_NEAR(std::abs(got(i, j) - m[i][j]), 0.0, 1e-12 * (1.0 + std::abs(m[i][j])));
      }
    }
  }
}

TEST(Assembly, CsvIsRowMajorAndExact) {
  GraphBuilder b;
  b.add_vertex("p", 2.0);
  b.add_vertex("r", 1.0);
  b.add_edge("p", "r", 1.0, {0.0, 1.0});
  const auto g = std::move(b).build();
  const auto op = assemble(g, 0, 1, false);
  EXPECT_EQ(matrix_csv(g, op, op.matrix),
            "row_id,col_id,re,im\n"
            "p,p,0.5,0\n"
            "p,r,-0,0.5\n"
            "r,p,-0,-1\n"
            "r,r,1,0\n");
}

TEST(Spectrum, OneByOneIsTheDiagonal) {
  const auto t = Family(FamilyKind::halfline, {{"q", 0.25}}).truncate(2);
  const auto r = spectrum(t.graph, ball(t.graph, 0, 0), 1);
  EXPECT_DOUBLE_EQ(r.eigenvalues[0], 1.25);
}

TEST(Spectrum, CycleWithoutField) {
  const auto raw = cycle3(0.0);
  const auto g = testsupport::to_graph(raw);
  const auto r = spectrum(g, ball(g, 0, 1), 3);
  const auto oracle = testsupport::jacobi_eigenvalues(testsupport::symmetrize(raw, testsupport::dense_h(raw)));
  ASSERT_EQ(oracle.size(), 3u);
  EXPECT_NEAR(oracle[0], 0.0, 1e-12);
  EXPECT_NEAR(oracle[1], 3.0, 1e-12);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(r.eigenvalues[i], oracle[i], 1e-9);
}

TEST(Spectrum, UniformPhaseCycleClosedForm) {
  for (double theta : {0.3, std::numbers::pi / 3, 1.0, std::numbers::pi}) {
    const auto raw = cycle3(theta);
    const auto oracle = testsupport::jacobi_eigenvalues(testsupport::symmetrize(raw, testsupport::dense_h(raw)));
    std::vector<double> closed;
    for (int k = 0; k < 3; ++k) closed.push_back(2.0 - 2.0 * std::cos((3.0 * theta + 2.0 * std::numbers::pi * k) / 3.0));
    std::sort(closed.begin(), closed.end());
    const auto g = testsupport::to_graph(raw);
    const auto r = spectrum(g, ball(g, 0, 1), 3);
    for (int i = 0; i < 3; ++i) {
      EXPECT_NEAR(oracle[i], closed[i], 1e-12);
      EXPECT_NEAR(r.eigenvalues[i], oracle[i], 1e-9);
    }
  }
}

TEST(Spectrum, RandomGraphsAgainstJacobi) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 15; ++trial) {
    const auto raw = testsupport::random_raw_graph(rng, {});
    const auto g = testsupport::to_graph(raw);
    const int k = std::min(4, raw.n());
    const auto r = spectrum(g, ball(g, 0, raw.n()), k);
    const auto oracle = testsupport::jacobi_eigenvalues(testsupport::symmetrize(raw, testsupport::dense_h(raw)));
    for (int i = 0; i < k; ++i) EXPECT_NEAR(r.eigenvalues[i], oracle[i], 1e-9 * (1.0 + std::abs(oracle[i])));
    for (double res : r.residuals) EXPECT_LE(res, kEigenResidualTolerance);
  }
}

TEST(Spectrum, LanczosAgreesWithDenseAboveThreshold) {
  std::mt19937_64 rng(43);
  testsupport::GraphSpec spec;
  spec.w_lo = 0.5;
  spec.w_hi = 2.0;
  spec.a_lo = 0.5;
  spec.a_hi = 2.0;
  const auto g = testsupport::to_graph(testsupport::random_path_graph(rng, 700, spec));
  const auto op = assemble(g, ball(g, 0, 800), true);
  const auto lanczos = spectrum(op, 3);
  EXPECT_EQ(lanczos.method, "lanczos");
  const auto dense = detail::dense_spectrum(*op.symmetrized, 3);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(lanczos.eigenvalues[i], dense.eigenvalues[i], 1e-9);
}

TEST(Spectrum, GaugeInvariance) {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 10; ++trial) {
    auto raw = testsupport::random_raw_graph(rng, {});
    const auto g = testsupport::to_graph(raw);
    std::vector<double> theta(raw.n());
    for (auto& t : theta) t = testsupport::uniform(rng, 0.0, 2.0 * std::numbers::pi);
    for (auto& e : raw.edges) e.sigma *= std::polar(1.0, theta[e.t] - theta[e.o]);
    const auto gauged = testsupport::to_graph(raw);
    const int k = std::min(5, raw.n());
    const auto a = spectrum(g, ball(g, 0, raw.n()), k);
    const auto b = spectrum(gauged, ball(gauged, 0, raw.n()), k);
    for (int i = 0; i < k; ++i) EXPECT_NEAR(a.eigenvalues[i], b.eigenvalues[i], 1e-10 * (1.0 + std::abs(a.eigenvalues[i])));
  }
}

TEST(Spectrum, NestedBallsAreMonotone) {
  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = testsupport::to_graph(testsupport::random_raw_graph(rng, {}));
    double last = std::numeric_limits<double>::infinity();
    for (int n = 0; n <= 5; ++n) {
      const double l = spectrum(g, ball(g, 0, n), 1).eigenvalues[0];
      EXPECT_LE(l, last + 1e-10);
      last = l;
    }
  }
}

TEST(Spectrum, UnitWeightsBetweenZeroAndDiagonal) {
  std::mt19937_64 rng(46);
  testsupport::GraphSpec spec;
  spec.w_lo = spec.w_hi = 1.0;
  spec.a_lo = spec.a_hi = 1.0;
  spec.q_lo = spec.q_hi = 0.0;
  spec.magnetic = false;
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = testsupport::to_graph(testsupport::random_raw_graph(rng, spec));
    const auto op = assemble(g, ball(g, 0, 2), true);
    const double l = spectrum(op, 1).eigenvalues[0];
    const DenseMatrix s(*op.symmetrized);
    EXPECT_GE(l, -1e-12);
    EXPECT_LE(l, s.diagonal().real().minCoeff() + 1e-12);
  }
}

TEST(Spectrum, RejectsBadCounts) {
  const auto t = Family(FamilyKind::halfline).truncate(3);
  EXPECT_THROW(spectrum(t.graph, ball(t.graph, 0, 1), 0), PreconditionError);
  EXPECT_THROW(spectrum(t.graph, ball(t.graph, 0, 1), 3), PreconditionError);
  EXPECT_THROW(spectrum(assemble(t.graph, 0, 1, false), 1), PreconditionError);
}
