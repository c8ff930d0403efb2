#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace magsa {

/// Tolerance for exact algebraic identities (relative).
inline constexpr double kIdentityTolerance = 1e-12;

/// Outcome of one verification. `passed` is always max_violation <= tolerance.
struct CheckResult {
  std::string name;
  bool passed = true;
  double max_violation = 0.0;
  std::optional<std::string> location;
  double tolerance = kIdentityTolerance;
  /// Recorded quantities (sides of an inequality, slacks, counts).
  std::vector<std::pair<std::string, double>> details;

  CheckResult() = default;
  CheckResult(std::string n, double tol) : name(std::move(n)), tolerance(tol) {}

  /// Folds one observed violation in, remembering where the worst one was.
  template <class Where>
    requires std::invocable<Where>
  void observe(double violation, Where&& where) {
    if (std::isnan(violation)) violation = std::numeric_limits<double>::infinity();
    if (violation > max_violation || (!location && violation > 0.0)) {
      max_violation = std::max(max_violation, violation);
      location = std::string(where());
    }
    passed = max_violation <= tolerance;
  }
  void observe(double violation, const std::string& where) {
    observe(violation, [&] { return where; });
  }
  void record(std::string key, double value) { details.emplace_back(std::move(key), value); }

  [[nodiscard]] std::optional<double> detail(const std::string& key) const {
    for (const auto& [k, v] : details) {
      if (k == key) return v;
    }
    return std::nullopt;
  }
};

/// |lhs - rhs| scaled by the magnitude of the terms that produced them.
inline double relative_gap(double diff, double scale) {
  return scale > 0.0 ? diff / scale : diff;
}

inline nlohmann::json to_json(const CheckResult& r) {
  nlohmann::json details = nlohmann::json::object();
  for (const auto& [k, v] : r.details) details[k] = v;
  return {{"name", r.name},
          {"passed", r.passed},
          {"max_violation", r.max_violation},
          {"location", r.location ? nlohmann::json(*r.location) : nlohmann::json(nullptr)},
          {"tolerance", r.tolerance},
          {"details", std::move(details)}};
}

}  // namespace magsa
