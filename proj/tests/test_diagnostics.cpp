#include <gtest/gtest.h>

#include <random>

#include "generators.hpp"
#include "magsa/magsa.hpp"
#include "oracles.hpp"

using namespace magsa;

TEST(AssumptionA, MatchesBruteForceOnRandomGraphs) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 30; ++trial) {
    const auto raw = testsupport::random_raw_graph(rng, {});
    const auto g = testsupport::to_graph(raw);
    const auto hops = testsupport::relaxed_hops(raw, 0);
    const int depth = *std::max_element(hops.begin(), hops.end());
    if (depth < 1) continue;
    const auto seq = assumption_a(whole_graph(g), 0, depth);
    ASSERT_EQ(seq.records.size(), static_cast<std::size_t>(depth));
    for (const auto& r : seq.records) {
      const auto [m, a] = testsupport::assumption_a_brute(raw, 0, r.n);
      EXPECT_EQ(r.m, m);
      EXPECT_DOUBLE_EQ(r.a, a);
      EXPECT_DOUBLE_EQ(r.ratio, m * a / (double(r.n) * r.n));
      EXPECT_LE(r.m_internal, r.m);
    }
    EXPECT_TRUE(seq.m_monotone);
    EXPECT_TRUE(seq.a_monotone);
  }
}

TEST(AssumptionA, HalflineClosedFormExact) {
  const auto seq = assumption_a(Family(FamilyKind::halfline), "0", 50);
  for (const auto& r : seq.records) {
    const std::int64_t k = r.n + 1;
    EXPECT_EQ(r.m, 2);
    EXPECT_EQ(*r.a_sq, Rational(k * k * k * k));
    EXPECT_EQ(r.a, double(k * k));
    // the last vertex of B_n has only one neighbor inside the ball
    EXPECT_EQ(r.m_internal, r.n == 1 ? 1 : 2);
  }
}

TEST(AssumptionA, TriangularClosedFormExact) {
  const auto seq = assumption_a(Family(FamilyKind::triangular), "x0", 30);
  for (const auto& r : seq.records) {
    EXPECT_EQ(r.m, 2 * r.n + 2);
    EXPECT_EQ(*r.a_sq, Rational(r.n + 1));
    EXPECT_EQ(r.m_internal, 2 * r.n);  // row n vertices: n - 1 up, n + 1 down
    const auto cf = Family(FamilyKind::triangular).assumption_a_closed_form(r.n);
    EXPECT_EQ(cf->first, r.m);
    EXPECT_EQ(cf->second, *r.a_sq);
  }
}

TEST(AssumptionA, BoundedDegreeUnitWeightsDecay) {
  const auto seq = assumption_a(Family(FamilyKind::cycle, {{"n", 40}}), "c0", 20);
  for (const auto& r : seq.records) EXPECT_LE(r.ratio, 2.0 / (double(r.n) * r.n) + 1e-15);
}

TEST(AssumptionA, TruncationTooSmall) {
  const auto t = Family(FamilyKind::halfline).truncate(10);
  EXPECT_NO_THROW(assumption_a(t, 0, 9));
  EXPECT_THROW(assumption_a(t, 0, 10), TruncationError);
}

TEST(AssumptionA, PowerLawTrend) {
  const auto seq = assumption_a(Family(FamilyKind::triangular), "x0", 100);
  ASSERT_TRUE(seq.trend);
  EXPECT_NEAR(seq.trend->exponent, -0.5, 0.05);
}

TEST(BoundedDegree, Families) {
  EXPECT_EQ(bounded_degree(Family(FamilyKind::halfline)).value, 2);
  EXPECT_EQ(bounded_degree(Family(FamilyKind::cycle, {{"n", 5}})).value, 2);
  EXPECT_EQ(bounded_degree(Family(FamilyKind::triangular)).kind, DegreeBoundKind::unbounded);
  const Family r(FamilyKind::random, {{"n", 30}, {"seed", 2}});
  const auto d = bounded_degree(r);
  EXPECT_EQ(d.kind, DegreeBoundKind::exact);
  EXPECT_EQ(*d.value, static_cast<int>(r.truncate(0).graph.max_degree()));
}

TEST(BoundedDegree, OpaqueTruncationIsLowerBound) {
  auto t = Family(FamilyKind::triangular).truncate(5);
  const auto d = bounded_degree(t, 0, 10);
  EXPECT_EQ(d.kind, DegreeBoundKind::lower_bound_only);
  EXPECT_EQ(*d.value, 10);  // row 4, the last row with all neighbors stored
}

TEST(FormBound, NonnegativeWithoutPotential) {
  std::mt19937_64 rng(52);
  testsupport::GraphSpec spec;
  spec.q_lo = spec.q_hi = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = testsupport::to_graph(testsupport::random_raw_graph(rng, spec));
    const auto est = form_bound(g, 0, {0, 1, 2, 3});
    for (const auto& r : est.records) EXPECT_GE(r.lambda_min, -1e-12);
    EXPECT_TRUE(est.monotone);
    EXPECT_LE(est.c_est, 1e-12);
  }
}

TEST(FormBound, PotentialLowerBoundWithConstantWeight) {
  std::mt19937_64 rng(53);
  testsupport::GraphSpec spec;
  spec.w_lo = spec.w_hi = 1.5;
  spec.q_lo = -3.0;
  spec.q_hi = 2.0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto raw = testsupport::random_raw_graph(rng, spec);
    const auto g = testsupport::to_graph(raw);
    const auto est = form_bound(g, 0, {1, 2, 4});
    for (const auto& r : est.records) EXPECT_GE(r.lambda_min, -3.0 - 1e-12);
    // sup_n lambda_min agrees with the dense oracle at the largest radius
    const auto op = assemble(g, ball(g, 0, 4), true);
    testsupport::CMatrix s(op.dimension(), std::vector<testsupport::Complex>(op.dimension()));
    const DenseMatrix sd(*op.symmetrized);
    for (Eigen::Index i = 0; i < op.dimension(); ++i)
      for (Eigen::Index j = 0; j < op.dimension(); ++j) s[i][j] = sd(i, j);
    EXPECT_NEAR(est.records.back().lambda_min, testsupport::jacobi_eigenvalues(s)[0], 1e-9);
  }
}

TEST(FormBound, SingleVertexHalflineBall) {
  const auto t = Family(FamilyKind::halfline, {{"q", -0.5}}).truncate(3);
  const auto est = form_bound(t, 0, {0});
  EXPECT_DOUBLE_EQ(est.records[0].lambda_min, 0.5);
}

TEST(FormBound, RejectsUnsortedRadiiAndFrontier) {
  const auto t = Family(FamilyKind::halfline).truncate(5);
  EXPECT_THROW(form_bound(t, 0, {2, 1}), PreconditionError);
  EXPECT_THROW(form_bound(t, 0, {5}), TruncationError);
}

TEST(TheoremReport, Halfline) {
  ReportOptions opt;
  opt.max_n = 100;
  const auto rep = theorem_report(Family(FamilyKind::halfline), "0", opt);
  EXPECT_FALSE(rep.theorems[0].applicable);
  EXPECT_FALSE(rep.theorems[1].applicable);
  EXPECT_TRUE(rep.theorems[2].applicable);
  EXPECT_TRUE(*rep.matches_known);
  EXPECT_FALSE(rep.finite);
}

TEST(TheoremReport, Triangular) {
  ReportOptions opt;
  opt.max_n = 40;
  const auto rep = theorem_report(Family(FamilyKind::triangular), "x0", opt);
  EXPECT_FALSE(rep.theorems[0].applicable);
  EXPECT_TRUE(rep.theorems[1].applicable);
  EXPECT_FALSE(rep.theorems[2].applicable);
  EXPECT_TRUE(*rep.matches_known);
}

TEST(TheoremReport, ApplicableOnlyIfEveryHypothesisHolds) {
  ReportOptions opt;
  opt.max_n = 10;
  for (const auto& fam : {Family(FamilyKind::halfline), Family(FamilyKind::triangular),
                          Family(FamilyKind::cycle, {{"n", 8}})}) {
    const auto rep = theorem_report(fam, fam.root_id(), opt);
    for (const auto& th : rep.theorems) {
      bool all = true;
      for (const auto& h : th.hypotheses) all = all && h.status == HypothesisStatus::holds;
      EXPECT_EQ(th.applicable, all);
    }
  }
}

TEST(TheoremReport, FiniteCycleNotice) {
  ReportOptions opt;
  opt.max_n = 10;
  const auto rep = theorem_report(Family(FamilyKind::cycle, {{"n", 6}}), "c0", opt);
  EXPECT_TRUE(rep.finite);
  ASSERT_TRUE(rep.notice);
  for (const auto& th : rep.theorems) {
    EXPECT_TRUE(th.trivially_applicable);
    EXPECT_TRUE(th.applicable);  // w = a = 1, q = 0, degree 2
  }
}

TEST(TheoremReport, OpaqueFileGraphIsUndecidable) {
  const auto t = Family(FamilyKind::cycle, {{"n", 12}}).truncate(0);
  ReportOptions opt;
  opt.max_n = 4;
  const auto rep = theorem_report(t.graph, "c0", false, opt);
  EXPECT_FALSE(rep.finite);
  EXPECT_EQ(rep.theorems[1].hypotheses[0].status, HypothesisStatus::undecidable);
  EXPECT_EQ(rep.theorems[2].hypotheses[0].status, HypothesisStatus::undecidable);
  const auto fin = theorem_report(t.graph, "c0", true, opt);
  EXPECT_TRUE(fin.theorems[0].applicable);
  EXPECT_TRUE(fin.theorems[2].applicable);
}

TEST(TheoremReport, VaryingWeightFailsEvenWhenOpaque) {
  const auto t = Family(FamilyKind::halfline).truncate(8);
  ReportOptions opt;
  opt.max_n = 5;
  const auto rep = theorem_report(t.graph, "0", false, opt);
  EXPECT_EQ(rep.theorems[0].hypotheses[0].status, HypothesisStatus::fails);
}

TEST(TheoremReport, GaugeChangeLeavesReportUnchanged) {
  std::mt19937_64 rng(54);
  testsupport::GraphSpec spec;
  spec.min_n = spec.max_n = 25;
  auto raw = testsupport::random_raw_graph(rng, spec);
  const auto g = testsupport::to_graph(raw);
  std::vector<double> theta(raw.n());
  for (auto& t : theta) t = testsupport::uniform(rng, 0.0, 6.0);
  for (auto& e : raw.edges) e.sigma *= std::polar(1.0, theta[e.t] - theta[e.o]);
  const auto gauged = testsupport::to_graph(raw);
  ReportOptions opt;
  opt.max_n = 3;
  const auto a = to_json(theorem_report(g, "v0", true, opt));
  const auto b = to_json(theorem_report(gauged, "v0", true, opt));
  for (const auto& [num, th] : a["theorems"].items()) {
    const auto& other = b["theorems"][num];
    EXPECT_EQ(th["applicable"], other["applicable"]);
    for (std::size_t i = 0; i < th["hypotheses"].size(); ++i) {
      EXPECT_EQ(th["hypotheses"][i]["status"], other["hypotheses"][i]["status"]);
    }
  }
  const auto& fa = a["form_bound"]["records"];
  const auto& fb = b["form_bound"]["records"];
  ASSERT_EQ(fa.size(), fb.size());
  for (std::size_t i = 0; i < fa.size(); ++i) {
    EXPECT_NEAR(fa[i]["lambda_min"].get<double>(), fb[i]["lambda_min"].get<double>(), 1e-10);
  }
}
