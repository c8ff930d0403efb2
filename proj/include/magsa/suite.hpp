#pragma once

#include <algorithm>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "magsa/assembly.hpp"
#include "magsa/checks.hpp"
#include "magsa/harmonic.hpp"
#include "magsa/metric.hpp"
#include "magsa/spectrum.hpp"

namespace magsa {

struct Tolerances {
  double identity = kIdentityTolerance;
  double solve = kSolveTolerance;
};

struct SuiteOptions {
  std::uint64_t seed = 0;
  int trials = 10;
  Tolerances tol;
  double support_fraction = 0.7;  // chance a vertex is in supp of a random field
  int max_harmonic_radius = 10;
};

struct SuiteResult {
  std::vector<CheckResult> checks;
  std::vector<std::string> notes;  // skipped instances and why
  [[nodiscard]] bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }
};

/// Random fields with entries uniform in the unit square (unit interval for
/// real fields), each vertex kept with probability `fraction`.
inline VertexField random_vertex_field(std::size_t n, std::mt19937_64& rng, double fraction) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  VertexField f(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double re = 2.0 * unit(rng) - 1.0;
    const double im = 2.0 * unit(rng) - 1.0;
    if (unit(rng) < fraction) f[static_cast<VertexIndex>(i)] = {re, im};
  }
  return f;
}

inline std::vector<double> random_real_field(std::size_t n, std::mt19937_64& rng, double fraction) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> f(n, 0.0);
  for (auto& x : f) {
    const double v = unit(rng);
    if (unit(rng) < fraction) x = v;
  }
  return f;
}

inline EdgeField random_edge_field(std::size_t m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  EdgeField y(m);
  for (std::size_t i = 0; i < m; ++i) y[static_cast<EdgeIndex>(i)] = {unit(rng), unit(rng)};
  return y;
}

/// Folds `r` into the entry of `all` with the same name.
inline void merge_into(std::vector<CheckResult>& all, const CheckResult& r) {
  auto it = std::find_if(all.begin(), all.end(), [&](const CheckResult& c) { return c.name == r.name; });
  if (it == all.end()) {
    all.push_back(r);
    return;
  }
  if (r.max_violation > it->max_violation || (!it->location && r.location)) {
    it->max_violation = std::max(it->max_violation, r.max_violation);
    it->location = r.location;
    it->details = r.details;
  }
  it->passed = it->passed && r.passed;
}

/// |sigma(e)| = 1 on every stored edge.
inline CheckResult check_phase_modulus(const MagneticGraph& g, double tolerance = kPhaseModulusTolerance) {
  CheckResult res("phase_modulus", tolerance);
  for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
    const auto& se = g.edge(e);
    res.observe(std::abs(std::abs(se.phase) - 1.0), [&] { return g.id(se.origin) + "->" + g.id(se.terminus); });
  }
  return res;
}

/// Every identity check on random fields, then harmonic-extension instances
/// around the root for the ground-form identity and both cut-off chains.
inline SuiteResult run_check_suite(const MagneticGraph& g, const SuiteOptions& opt) {
  SuiteResult out;
  std::mt19937_64 rng(opt.seed);
  const std::size_t nv = g.vertex_count();
  const double id_tol = opt.tol.identity;
  const double solve_tol = opt.tol.solve;

  merge_into(out.checks, check_phase_modulus(g));
  for (int trial = 0; trial < opt.trials; ++trial) {
    const VertexField u = random_vertex_field(nv, rng, opt.support_fraction);
    const VertexField v = random_vertex_field(nv, rng, opt.support_fraction);
    const EdgeField y = random_edge_field(g.edge_count(), rng);
    const auto phi = random_real_field(nv, rng, opt.support_fraction);
    merge_into(out.checks, check_adjointness(g, u, y, id_tol));
    merge_into(out.checks, check_factorization(g, u, id_tol));
    merge_into(out.checks, check_symmetry(g, u, v, id_tol));
    merge_into(out.checks, check_form_nonnegativity(g, u, id_tol));
    merge_into(out.checks, check_leibniz(g, u, v, id_tol));
    merge_into(out.checks, check_kato(g, u, id_tol));
    merge_into(out.checks, check_general_product_identity(g, u, phi, id_tol));
    merge_into(out.checks, check_pairing_consistency(g, u, phi, id_tol));
  }

  const VertexIndex root = g.root();
  const auto hops = hop_distances(g, root);
  const int ecc = *std::max_element(hops.begin(), hops.end());
  const int k = std::min(ecc - 1, opt.max_harmonic_radius);
  if (k < 1) {
    out.notes.push_back("graph too shallow around the root for harmonic-extension checks");
    return out;
  }
  const Ball interior = ball(g, root, k);
  merge_into(out.checks, check_hermiticity(assemble(g, interior, true), id_tol));
  double lambda_min = 0.0;
  try {
    lambda_min = spectrum(g, interior, 1).eigenvalues[0];
  } catch (const NumericError& e) {
    out.notes.push_back(std::string("interior spectrum unavailable: ") + e.what());
    return out;
  }
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < std::max(1, opt.trials / 5); ++trial) {
    std::vector<std::pair<VertexIndex, Complex>> boundary;
    for (VertexIndex x = 0; x < nv; ++x) {
      if (hops[x] == k + 1) boundary.emplace_back(x, Complex{unit(rng), unit(rng)});
    }
    HarmonicExtension ext;
    try {
      ext = harmonic_extension(g, interior.vertices, boundary);
    } catch (const SingularSystemError& e) {
      out.notes.push_back(std::string("harmonic instance skipped: ") + e.what());
      continue;
    }
    std::vector<double> phi = random_real_field(nv, rng, opt.support_fraction);
    for (VertexIndex x = 0; x < nv; ++x) {
      if (!interior.contains(x)) phi[x] = 0.0;
    }
    merge_into(out.checks, check_ground_form_identity(g, ext, phi, solve_tol));
    const int n = (k + 1) / 2;
    merge_into(out.checks, check_ground_form_identity(g, ext, phi_n(g, root, n).values, solve_tol));
    merge_into(out.checks, check_cutoff_energy_bound(g, ext, n, root, lambda_min, solve_tol));

    const auto d0 = distances_from(g, root);
    double outside = std::numeric_limits<double>::infinity();
    for (VertexIndex x = 0; x < nv; ++x) {
      if (!interior.contains(x)) outside = std::min(outside, d0[x]);
    }
    if (outside > 1.0 + 2.0 * kDistanceSlack) {
      const double radius = 0.5 * (outside - 1.0);
      merge_into(out.checks, check_psi_energy_bound(g, ext, radius, root, std::nullopt, lambda_min, {}, solve_tol));
    } else if (trial == 0) {
      out.notes.push_back("no psi_R fits inside the harmonic interior");
    }
  }
  return out;
}

}  // namespace magsa
