#include <gtest/gtest.h>

#include <random>

#include "generators.hpp"
#include "magsa/magsa.hpp"
#include "oracles.hpp"

using namespace magsa;
using testsupport::Complex;

namespace {

MagneticGraph random_graph(std::mt19937_64& rng) { return testsupport::to_graph(testsupport::random_raw_graph(rng, {})); }

/// Harmonic extension on B_k(root) with random boundary values on S_{k+1}.
HarmonicExtension harmonic_on_ball(const MagneticGraph& g, int k, std::mt19937_64& rng) {
  const Ball inner = ball(g, g.root(), k);
  std::vector<std::pair<VertexIndex, Complex>> boundary;
  for (VertexIndex x = 0; x < g.vertex_count(); ++x) {
    if (inner.hops[x] == k + 1) boundary.emplace_back(x, Complex{testsupport::uniform(rng, -1, 1), testsupport::uniform(rng, -1, 1)});
  }
  return harmonic_extension(g, inner.vertices, boundary);
}

}  // namespace

TEST(CheckResult, PassedTracksTolerance) {
  CheckResult r("x", 1e-3);
  r.observe(1e-4, "a");
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(*r.location, "a");
  r.observe(1e-2, std::string("b"));
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(*r.location, "b");
  r.observe(std::nan(""), "c");
  EXPECT_FALSE(r.passed);
  EXPECT_TRUE(std::isinf(r.max_violation));
}

TEST(Leibniz, TrivialCasesHaveZeroViolation) {
  std::mt19937_64 rng(1);
  const auto g = random_graph(rng);
  const auto u = testsupport::random_field(rng, static_cast<int>(g.vertex_count()));
  const auto one = VertexField::constant(g.vertex_count(), {1.0, 0.0});
  EXPECT_EQ(check_leibniz(g, u, one).max_violation, 0.0);
  EXPECT_TRUE(check_leibniz(g, one, u).passed);
}

TEST(Leibniz, RandomPairs) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = random_graph(rng);
    const int n = static_cast<int>(g.vertex_count());
    const auto r = check_leibniz(g, testsupport::random_field(rng, n), testsupport::random_field(rng, n));
    EXPECT_TRUE(r.passed) << r.max_violation;
  }
}

TEST(Kato, EqualityCases) {
  std::mt19937_64 rng(3);
  testsupport::GraphSpec spec;
  spec.magnetic = false;
  const auto g = testsupport::to_graph(testsupport::random_raw_graph(rng, spec));
  VertexField u(g.vertex_count());
  for (VertexIndex x = 0; x < g.vertex_count(); ++x) u[x] = testsupport::uniform(rng, 0.0, 1.0);
  const auto r = check_kato(g, u);
  EXPECT_EQ(r.max_violation, 0.0);
  EXPECT_NEAR(*r.detail("min_slack"), 0.0, 1e-12);

  const auto gm = random_graph(rng);
  const auto ind = VertexField::indicator(gm.vertex_count(), 0);
  const auto ri = check_kato(gm, ind);
  EXPECT_EQ(ri.max_violation, 0.0);
}

TEST(Kato, RandomFieldsNeverViolate) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = random_graph(rng);
    const auto r = check_kato(g, testsupport::random_field(rng, static_cast<int>(g.vertex_count())));
    EXPECT_TRUE(r.passed) << r.max_violation;
  }
}

TEST(Kato, CorruptedPhaseIsCaught) {
  // |sigma| = 2 slips past validation only through build_unchecked
  GraphBuilder b;
  b.add_vertex("x", 1.0);
  b.add_vertex("y", 1.0);
  b.add_edge("x", "y", 1.0, {2.0, 0.0});
  const auto g = std::move(b).build_unchecked();
  VertexField u(2);
  u[0] = 1.0;
  u[1] = 1.0;
  EXPECT_FALSE(check_kato(g, u).passed);
  EXPECT_FALSE(check_phase_modulus(g).passed);
}

TEST(Identities, AdjointnessFactorizationSymmetry) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = random_graph(rng);
    const int n = static_cast<int>(g.vertex_count());
    const auto u = testsupport::random_field(rng, n);
    const auto v = testsupport::random_field(rng, n);
    EdgeField y(g.edge_count());
    for (EdgeIndex e = 0; e < g.edge_count(); ++e) y[e] = {testsupport::uniform(rng, -1, 1), testsupport::uniform(rng, -1, 1)};
    EXPECT_TRUE(check_adjointness(g, u, y).passed);
    EXPECT_TRUE(check_factorization(g, u).passed);
    EXPECT_TRUE(check_symmetry(g, u, v).passed);
    EXPECT_TRUE(check_form_nonnegativity(g, u).passed);
  }
}

TEST(Identities, GeneralProductIdentity) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = random_graph(rng);
    const int n = static_cast<int>(g.vertex_count());
    const auto r = check_general_product_identity(g, testsupport::random_field(rng, n), testsupport::random_real(rng, n));
    EXPECT_TRUE(r.passed) << r.max_violation;
  }
  // phi = 1 everywhere: the correction sum vanishes
  const auto g = random_graph(rng);
  const std::vector<double> one(g.vertex_count(), 1.0);
  const auto r = check_general_product_identity(g, testsupport::random_field(rng, static_cast<int>(g.vertex_count())), one);
  EXPECT_TRUE(r.passed);
}

TEST(Identities, PairingConsistency) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = random_graph(rng);
    const int n = static_cast<int>(g.vertex_count());
    EXPECT_TRUE(check_pairing_consistency(g, testsupport::random_field(rng, n), testsupport::random_real(rng, n)).passed);
  }
}

TEST(Harmonic, BoundaryOnly) {
  const auto t = Family(FamilyKind::halfline).truncate(3);
  const auto ext = harmonic_extension(t.graph, {}, {{1, Complex{2.0, 1.0}}});
  EXPECT_EQ(ext.residual, 0.0);
  EXPECT_EQ(ext.solution[1], Complex(2.0, 1.0));
  EXPECT_EQ(ext.solution[0], Complex{});
}

TEST(Harmonic, DiscreteMeanValue) {
  GraphBuilder b;
  b.add_vertex("v0", 1.0);
  b.add_vertex("v1", 1.0);
  b.add_vertex("v2", 1.0);
  b.add_edge("v0", "v1", 1.0);
  b.add_edge("v1", "v2", 1.0);
  const auto g = std::move(b).build();
  const auto ext = harmonic_extension(g, {1}, {{0, 0.0}, {2, 2.0}});
  EXPECT_NEAR(std::abs(ext.solution[1] - Complex(1.0, 0.0)), 0.0, 1e-15);
}

TEST(Harmonic, HalflineRadius30) {
  const auto t = Family(FamilyKind::halfline).truncate(31);
  const Ball inner = ball(t.graph, 0, 29);
  const auto ext = harmonic_extension(t.graph, inner.vertices, {{30, 1.0}});
  EXPECT_LT(ext.residual, 1e-10);
}

TEST(Harmonic, Preconditions) {
  const auto t = Family(FamilyKind::halfline).truncate(5);
  EXPECT_THROW(harmonic_extension(t.graph, {1, 2}, {{0, 1.0}}), PreconditionError);  // 3 uncovered
  EXPECT_THROW(harmonic_extension(t.graph, {1}, {{1, 1.0}, {0, 1.0}, {2, 1.0}}), PreconditionError);
}

TEST(Harmonic, SingularSystemReportsSmallestSingularValue) {
  // single interior vertex with a(e)/w + q = 0
  GraphBuilder b;
  b.add_vertex("a", 1.0);
  b.add_vertex("b", 1.0, -2.0);
  b.add_vertex("c", 1.0);
  b.add_edge("a", "b", 1.0);
  b.add_edge("b", "c", 1.0);
  const auto g = std::move(b).build();
  try {
    harmonic_extension(g, {1}, {{0, 1.0}, {2, 1.0}});
    FAIL() << "expected SingularSystemError";
  } catch (const SingularSystemError& e) {
    EXPECT_NEAR(e.smallest_singular_value(), 0.0, 1e-14);
  }
}

TEST(GroundForm, ZeroCutoffAndRealCase) {
  std::mt19937_64 rng(8);
  auto t = Family(FamilyKind::halfline).truncate(12);
  const Ball inner = ball(t.graph, 0, 10);
  const auto ext = harmonic_extension(t.graph, inner.vertices, {{11, 1.0}});
  const std::vector<double> zero(t.graph.vertex_count(), 0.0);
  const auto r0 = check_ground_form_identity(t.graph, ext, zero);
  EXPECT_EQ(r0.max_violation, 0.0);
  std::vector<double> phi(t.graph.vertex_count(), 0.0);
  for (VertexIndex x : inner.vertices) phi[x] = testsupport::uniform(rng, 0.0, 1.0);
  const auto r = check_ground_form_identity(t.graph, ext, phi);
  EXPECT_TRUE(r.passed) << r.max_violation;
  // sigma = 1, u real: right side is sum a u(t) u(o) (d phi)^2
  double expect = 0.0;
  for (const auto& e : t.graph.edges()) {
    const double d = phi[e.origin] - phi[e.terminus];
    expect += e.weight * ext.solution[e.terminus].real() * ext.solution[e.origin].real() * d * d;
  }
  EXPECT_NEAR(*r.detail("rhs"), expect, 1e-12 * std::abs(expect));
}

TEST(GroundForm, SupportMustStayInside) {
  const auto t = Family(FamilyKind::halfline).truncate(8);
  const Ball inner = ball(t.graph, 0, 5);
  const auto ext = harmonic_extension(t.graph, inner.vertices, {{6, 1.0}});
  std::vector<double> phi(t.graph.vertex_count(), 0.0);
  phi[6] = 1.0;
  EXPECT_THROW(check_ground_form_identity(t.graph, ext, phi), PreconditionError);
}

TEST(GroundForm, RandomFluxedInstances) {
  std::mt19937_64 rng(9);
  testsupport::GraphSpec spec;
  spec.q_lo = 0.0;  // keeps the interior system away from singular
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = testsupport::to_graph(testsupport::random_path_graph(rng, 30, spec));
    const auto ext = harmonic_on_ball(g, 20, rng);
    std::vector<double> phi(g.vertex_count(), 0.0);
    for (VertexIndex x : ext.interior) phi[x] = testsupport::uniform(rng, -1.0, 1.0);
    const auto r = check_ground_form_identity(g, ext, phi);
    EXPECT_TRUE(r.passed) << r.max_violation;
    EXPECT_NEAR(*r.detail("lhs_im"), 0.0, 1e-10 * (1.0 + std::abs(*r.detail("lhs_re"))));
  }
}

TEST(CutoffBound, ZeroSolution) {
  const auto t = Family(FamilyKind::halfline).truncate(12);
  const Ball inner = ball(t.graph, 0, 10);
  const auto ext = harmonic_extension(t.graph, inner.vertices, {{11, 0.0}});
  const auto r = check_cutoff_energy_bound(t.graph, ext, 4, 0);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(*r.detail("energy"), 0.0);
  EXPECT_EQ(*r.detail("global_bound"), 0.0);
}

TEST(CutoffBound, HalflineChainHoldsWithSlack) {
  const auto t = Family(FamilyKind::halfline).truncate(31);
  const Ball inner = ball(t.graph, 0, 29);
  const auto ext = harmonic_extension(t.graph, inner.vertices, {{30, 1.0}});
  const auto r = check_cutoff_energy_bound(t.graph, ext, 4, 0);
  EXPECT_TRUE(r.passed) << r.max_violation << " at " << r.location.value_or("");
  EXPECT_GE(*r.detail("slack_energy_edge_bound"), 0.0);
  EXPECT_GE(*r.detail("slack_edge_bound_ball_bound"), 0.0);
  EXPECT_EQ(*r.detail("m_2n"), 2.0);
  EXPECT_EQ(*r.detail("a_2n"), 81.0);  // (2n + 1)^2
}

TEST(CutoffBound, PsiChainOnRandomPaths) {
  std::mt19937_64 rng(10);
  testsupport::GraphSpec spec;
  spec.q_lo = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = testsupport::to_graph(testsupport::random_path_graph(rng, 40, spec));
    const auto ext = harmonic_on_ball(g, 30, rng);
    const auto d0 = distances_from(g, g.root());
    double outside = std::numeric_limits<double>::infinity();
    for (VertexIndex x = 0; x < g.vertex_count(); ++x) {
      if (std::find(ext.interior.begin(), ext.interior.end(), x) == ext.interior.end()) outside = std::min(outside, d0[x]);
    }
    if (outside <= 1.5) continue;
    const auto r = check_psi_energy_bound(g, ext, 0.5 * (outside - 1.0), g.root());
    EXPECT_TRUE(r.passed) << r.max_violation << " at " << r.location.value_or("");
  }
}

// Harmonic u on the halfline has u(0) = u(1). With R = 0 the annulus is {1},
// but the edge 0-1 also carries |u(0)|^2 (1 - psi(1))^2 from outside it.
TEST(CutoffBound, PsiAnnulusAloneIsTooSmall) {
  const auto t = Family(FamilyKind::halfline).truncate(12);
  const Ball inner = ball(t.graph, 0, 10);
  const auto ext = harmonic_extension(t.graph, inner.vertices, {{11, 1.0}});
  const auto r = check_psi_energy_bound(t.graph, ext, 0.0, 0);
  EXPECT_TRUE(r.passed) << r.max_violation << " at " << r.location.value_or("");
  EXPECT_GE(*r.detail("slack_gradient_bound_shell_length_bound"), 0.0);
  EXPECT_LT(*r.detail("annulus_slack_gradient"), 0.0);
  EXPECT_LT(*r.detail("annulus_slack_energy"), 0.0);
}

TEST(Hermiticity, AssembledOperators) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = random_graph(rng);
    EXPECT_TRUE(check_hermiticity(assemble(g, g.root(), 2, true)).passed);
  }
}

TEST(Suite, ValidGraphPasses) {
  const Family f(FamilyKind::random, {{"n", 60}, {"p", 0.5}, {"bandwidth", 4}, {"q_min", 0}, {"q_max", 3}, {"seed", 1}});
  SuiteOptions opt;
  opt.trials = 20;
  const auto res = run_check_suite(f.truncate(0).graph, opt);
  for (const auto& c : res.checks) EXPECT_TRUE(c.passed) << c.name << " " << c.max_violation;
  EXPECT_TRUE(res.passed());
}

TEST(Suite, CorruptedPhaseFails) {
  GraphBuilder b;
  for (int i = 0; i < 6; ++i) b.add_vertex("v" + std::to_string(i), 1.0);
  for (VertexIndex i = 1; i < 6; ++i) b.add_edge(i - 1, i, 1.0, {1.7, 0.4});
  const auto res = run_check_suite(std::move(b).build_unchecked(), {});
  EXPECT_FALSE(res.passed());
}

TEST(Suite, EmptySupportFieldsPass) {
  const auto t = Family(FamilyKind::cycle, {{"n", 5}}).truncate(0);
  SuiteOptions opt;
  opt.support_fraction = 0.0;
  EXPECT_TRUE(run_check_suite(t.graph, opt).passed());
}
