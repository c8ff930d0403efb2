#pragma once

#include <cstdio>
#include <sstream>
#include <string>

#include <json.hpp>

#include "magsa/check_result.hpp"
#include "magsa/diagnostics.hpp"
#include "magsa/metric.hpp"
#include "magsa/suite.hpp"

namespace magsa {

inline constexpr const char* kVersion = "0.3.0";

inline std::string rational_string(const Rational& r) {
  return r.denominator() == 1 ? std::to_string(r.numerator())
                              : std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline nlohmann::json to_json(const AssumptionASequence& s) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : s.records) {
    nlohmann::json row{{"n", r.n}, {"m", r.m}, {"m_internal", r.m_internal}, {"a", r.a}, {"ratio", r.ratio}};
    if (r.a_sq) row["a_sq_exact"] = rational_string(*r.a_sq);
    if (r.ratio_sq) row["ratio_sq_exact"] = rational_string(*r.ratio_sq);
    rows.push_back(std::move(row));
  }
  nlohmann::json out{{"center", s.center}, {"records", rows}, {"m_monotone", s.m_monotone}, {"a_monotone", s.a_monotone}};
  if (s.trend) {
    out["trend"] = {{"exponent", s.trend->exponent}, {"coefficient", s.trend->coefficient}, {"points", s.trend->points}};
  } else {
    out["trend"] = nullptr;
  }
  return out;
}

inline nlohmann::json to_json(const FormBoundEstimate& f) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : f.records) rows.push_back({{"n", r.n}, {"dimension", r.dimension}, {"lambda_min", r.lambda_min}});
  return {{"center", f.center}, {"records", rows}, {"monotone", f.monotone}, {"C_est", f.c_est}};
}

inline nlohmann::json to_json(const MetricProfile& p) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : p.records) {
    nlohmann::json row{{"n", r.n}, {"min_dist", r.min_dist}, {"max_dist", r.max_dist}, {"margin", r.margin},
                       {"stabilized", r.stabilized}};
    row["closed_form"] = r.closed_form ? nlohmann::json(*r.closed_form) : nlohmann::json(nullptr);
    rows.push_back(std::move(row));
  }
  return {{"center", p.center}, {"margin", p.margin}, {"records", rows}};
}

inline nlohmann::json to_json(const TheoremReport& rep) {
  nlohmann::json theorems = nlohmann::json::object();
  for (const auto& th : rep.theorems) {
    nlohmann::json hyps = nlohmann::json::array();
    for (const auto& h : th.hypotheses) {
      nlohmann::json values = nlohmann::json::object();
      for (const auto& [k, v] : h.values) values[k] = v;
      hyps.push_back({{"name", h.name}, {"status", status_name(h.status)}, {"evidence", h.evidence}, {"values", values}});
    }
    theorems[std::to_string(th.number)] = {{"hypotheses", hyps},
                                           {"applicable", th.applicable},
                                           {"trivially_applicable", th.trivially_applicable}};
  }
  nlohmann::json out{{"subject", rep.subject},
                     {"center", rep.center},
                     {"max_n", rep.max_n},
                     {"finite", rep.finite},
                     {"notice", rep.notice ? nlohmann::json(*rep.notice) : nlohmann::json(nullptr)},
                     {"theorems", theorems},
                     {"assumption_a", to_json(rep.assumption)},
                     {"form_bound", to_json(rep.form)},
                     {"metric_profile", to_json(rep.profile)}};
  std::string kind = "exact";
  if (rep.degree.kind == DegreeBoundKind::unbounded) kind = "unbounded";
  if (rep.degree.kind == DegreeBoundKind::lower_bound_only) kind = "lower_bound_only";
  out["degree_bound"] = {{"kind", kind},
                         {"N", rep.degree.value ? nlohmann::json(*rep.degree.value) : nlohmann::json(nullptr)}};
  if (rep.known_classification) {
    const auto& k = *rep.known_classification;
    out["known_classification"] = {{"1", k[0]}, {"2", k[1]}, {"3", k[2]}};
    out["matches_known"] = *rep.matches_known;
  } else {
    out["known_classification"] = nullptr;
  }
  return out;
}

inline nlohmann::json to_json(const SuiteResult& s) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : s.checks) checks.push_back(to_json(c));
  return {{"checks", checks}, {"notes", s.notes}, {"passed", s.passed()}};
}

inline nlohmann::json to_json(const Tolerances& t) { return {{"identity", t.identity}, {"solve", t.solve}}; }

/// Human-readable rendering of a report document produced by to_json.
inline std::string report_text(const nlohmann::json& doc) {
  std::ostringstream os;
  char buf[256];
  const auto& rep = doc.contains("report") ? doc["report"] : doc;
  os << "subject " << rep["subject"].get<std::string>() << ", center " << rep["center"].get<std::string>()
     << ", max_n " << rep["max_n"].get<int>() << "\n";
  if (!rep["notice"].is_null()) os << "note: " << rep["notice"].get<std::string>() << "\n";
  for (const char* n : {"1", "2", "3"}) {
    const auto& th = rep["theorems"][n];
    os << "Theorem " << n << ": " << (th["applicable"].get<bool>() ? "applicable" : "not applicable");
    if (th["trivially_applicable"].get<bool>()) os << " (finite graph: trivially self-adjoint)";
    os << "\n";
    for (const auto& h : th["hypotheses"]) {
      os << "  " << h["name"].get<std::string>() << ": " << h["status"].get<std::string>();
      const auto ev = h["evidence"].get<std::string>();
      if (!ev.empty()) os << " (" << ev << ")";
      for (const auto& [k, v] : h["values"].items()) {
        std::snprintf(buf, sizeof buf, " %s=%.6g", k.c_str(), v.get<double>());
        os << buf;
      }
      os << "\n";
    }
  }
  if (!rep["known_classification"].is_null()) {
    os << "known classification reproduced: " << (rep["matches_known"].get<bool>() ? "yes" : "NO") << "\n";
  }
  const auto& rows = rep["assumption_a"]["records"];
  if (!rows.empty()) {
    os << "assumption (A):\n      n    m        a_n        ratio\n";
    const std::size_t stride = rows.size() > 20 ? rows.size() / 10 : 1;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i % stride != 0 && i + 1 != rows.size()) continue;
      std::snprintf(buf, sizeof buf, "  %5d %4d %12.6g %12.6g\n", rows[i]["n"].get<int>(), rows[i]["m"].get<int>(),
                    rows[i]["a"].get<double>(), rows[i]["ratio"].get<double>());
      os << buf;
    }
  }
  const auto& fb = rep["form_bound"];
  if (!fb["records"].empty()) {
    os << "form bound: C_est " << fb["C_est"].get<double>() << ", lambda_min monotone "
       << (fb["monotone"].get<bool>() ? "yes" : "no") << "\n";
  }
  const auto& prof = rep["metric_profile"]["records"];
  if (!prof.empty()) {
    const auto& last = prof.back();
    std::snprintf(buf, sizeof buf, "metric profile: dist to sphere %d in [%.6g, %.6g]\n", last["n"].get<int>(),
                  last["min_dist"].get<double>(), last["max_dist"].get<double>());
    os << buf;
  }
  return os.str();
}

inline std::string suite_text(const nlohmann::json& doc) {
  std::ostringstream os;
  char buf[256];
  const auto& s = doc.contains("suite") ? doc["suite"] : doc;
  for (const auto& c : s["checks"]) {
    std::snprintf(buf, sizeof buf, "%-28s %s  max_violation %.3e (tol %.1e)", c["name"].get<std::string>().c_str(),
                  c["passed"].get<bool>() ? "ok  " : "FAIL", c["max_violation"].get<double>(),
                  c["tolerance"].get<double>());
    os << buf;
    if (!c["location"].is_null()) os << " at " << c["location"].get<std::string>();
    os << "\n";
  }
  for (const auto& n : s["notes"]) os << "note: " << n.get<std::string>() << "\n";
  os << (s["passed"].get<bool>() ? "all checks passed\n" : "some checks FAILED\n");
  return os.str();
}

}  // namespace magsa
