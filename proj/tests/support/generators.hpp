#pragma once

// Hand-rolled generators for property tests. Graphs are produced as raw edge
// lists so oracles can read them without going through the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "magsa/fields.hpp"
#include "magsa/graph.hpp"

namespace testsupport {

using Complex = std::complex<double>;

struct RawEdge {
  int o, t;
  double a;
  Complex sigma;
};

struct RawGraph {
  std::vector<double> w, q;
  std::vector<RawEdge> edges;
  [[nodiscard]] int n() const { return static_cast<int>(w.size()); }
};

struct GraphSpec {
  int min_n = 2, max_n = 30;
  double extra_edge_p = 0.15;
  double w_lo = 0.1, w_hi = 10.0;
  double a_lo = 0.1, a_hi = 10.0;
  double q_lo = -5.0, q_hi = 5.0;
  bool magnetic = true;
};

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Complex unit_phase(std::mt19937_64& rng) { return std::polar(1.0, uniform(rng, 0.0, 2.0 * std::numbers::pi)); }

/// Random spanning tree (each vertex attaches to an earlier one) plus extra
/// edges; stored orientations are flipped at random.
inline RawGraph random_raw_graph(std::mt19937_64& rng, const GraphSpec& s) {
  RawGraph g;
  const int n = std::uniform_int_distribution<int>(s.min_n, s.max_n)(rng);
  for (int i = 0; i < n; ++i) {
    g.w.push_back(uniform(rng, s.w_lo, s.w_hi));
    g.q.push_back(uniform(rng, s.q_lo, s.q_hi));
  }
  std::vector<std::vector<char>> used(n, std::vector<char>(n, 0));
  auto add = [&](int i, int j) {
    used[i][j] = used[j][i] = 1;
    const double a = uniform(rng, s.a_lo, s.a_hi);
    const Complex sigma = s.magnetic ? unit_phase(rng) : Complex{1.0, 0.0};
    if (uniform(rng, 0.0, 1.0) < 0.5) {
      g.edges.push_back({i, j, a, sigma});
    } else {
      g.edges.push_back({j, i, a, sigma});
    }
  };
  for (int v = 1; v < n; ++v) add(std::uniform_int_distribution<int>(0, v - 1)(rng), v);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!used[i][j] && uniform(rng, 0.0, 1.0) < s.extra_edge_p) add(i, j);
    }
  }
  return g;
}

/// Path 0 - 1 - ... - (n-1) with random weights; large diameter.
inline RawGraph random_path_graph(std::mt19937_64& rng, int n, const GraphSpec& s) {
  RawGraph g;
  for (int i = 0; i < n; ++i) {
    g.w.push_back(uniform(rng, s.w_lo, s.w_hi));
    g.q.push_back(uniform(rng, s.q_lo, s.q_hi));
  }
  for (int i = 1; i < n; ++i) {
    const double a = uniform(rng, s.a_lo, s.a_hi);
    g.edges.push_back({i - 1, i, a, s.magnetic ? unit_phase(rng) : Complex{1.0, 0.0}});
  }
  return g;
}

/// Path plus random chords of span at most `band`; hop depth about n / band.
inline RawGraph random_band_graph(std::mt19937_64& rng, int n, int band, double p, const GraphSpec& s) {
  RawGraph g = random_path_graph(rng, n, s);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 2; j <= std::min(n - 1, i + band); ++j) {
      if (uniform(rng, 0.0, 1.0) >= p) continue;
      const double a = uniform(rng, s.a_lo, s.a_hi);
      const Complex sigma = s.magnetic ? unit_phase(rng) : Complex{1.0, 0.0};
      if (uniform(rng, 0.0, 1.0) < 0.5) {
        g.edges.push_back({i, j, a, sigma});
      } else {
        g.edges.push_back({j, i, a, sigma});
      }
    }
  }
  return g;
}

inline magsa::MagneticGraph to_graph(const RawGraph& r) {
  magsa::GraphBuilder b;
  for (int i = 0; i < r.n(); ++i) b.add_vertex("v" + std::to_string(i), r.w[i], r.q[i]);
  for (const auto& e : r.edges) {
    b.add_edge(static_cast<magsa::VertexIndex>(e.o), static_cast<magsa::VertexIndex>(e.t), e.a, e.sigma);
  }
  b.set_root("v0");
  return std::move(b).build();
}

inline magsa::VertexField random_field(std::mt19937_64& rng, int n, double keep = 0.8) {
  magsa::VertexField f(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Complex z{uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)};
    if (uniform(rng, 0.0, 1.0) < keep) f[static_cast<magsa::VertexIndex>(i)] = z;
  }
  return f;
}

inline std::vector<double> random_real(std::mt19937_64& rng, int n, double keep = 0.8) {
  std::vector<double> f(static_cast<std::size_t>(n), 0.0);
  for (auto& x : f) {
    const double v = uniform(rng, -1.0, 1.0);
    if (uniform(rng, 0.0, 1.0) < keep) x = v;
  }
  return f;
}

}  // namespace testsupport
