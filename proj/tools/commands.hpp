#pragma once

// Command implementations for the magsa binary. Kept in a header so tests can
// drive the same code paths without spawning a process.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "magsa/magsa.hpp"

namespace magsa::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kNumeric = 3 };

/// Reals with an optional "pi" factor: 0.5, pi, -pi/3, 2pi, 3*pi/4.
inline double parse_real(std::string_view text) {
  std::string s(text);
  const auto fail = [&] { return PreconditionError("not a number: '" + std::string(text) + "'"); };
  if (s.empty()) throw fail();
  double sign = 1.0;
  if (s[0] == '-' || s[0] == '+') {
    sign = s[0] == '-' ? -1.0 : 1.0;
    s.erase(0, 1);
  }
  const auto plain = [&](const std::string& t) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size()) throw fail();
    return v;
  };
  const auto pos = s.find("pi");
  if (pos == std::string::npos) return sign * plain(s);
  std::string coeff = s.substr(0, pos);
  std::string rest = s.substr(pos + 2);
  if (!coeff.empty() && coeff.back() == '*') coeff.pop_back();
  double v = (coeff.empty() ? 1.0 : plain(coeff)) * std::numbers::pi;
  if (!rest.empty()) {
    if (rest[0] != '/') throw fail();
    v /= plain(rest.substr(1));
  }
  return sign * v;
}

/// "K=V" pairs into a map; V goes through parse_real.
inline std::map<std::string, double> parse_pairs(const std::vector<std::string>& items, std::string_view what) {
  std::map<std::string, double> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw PreconditionError(std::string(what) + " entry '" + item + "' is not NAME=VALUE");
    }
    out[item.substr(0, eq)] = parse_real(item.substr(eq + 1));
  }
  return out;
}

/// Where the graph comes from plus the knobs shared by most commands.
struct RunConfig {
  std::string command;
  std::string graph_path;
  std::string family;
  std::vector<std::string> params;
  std::vector<std::string> extras;  // "--n 3" style family parameters
  std::optional<int> radius;
  std::optional<int> max_n;
  std::string x0;
  std::uint64_t seed = 0;
  int trials = 10;
  std::string out;
  std::vector<std::string> tol;
  std::string format = "json";
  bool finite = false;
  int k = 1;
  std::string from, to;
};

struct Source {
  std::optional<Family> family;
  Truncation truncation;
  std::string center;
};

inline Family make_family(const RunConfig& cfg) {
  std::string name = cfg.family;
  auto params = parse_pairs(cfg.params, "--params");
  // "cycle3" is shorthand for cycle with n=3
  if (name.rfind("cycle", 0) == 0 && name.size() > 5) {
    params["n"] = parse_real(name.substr(5));
    name = "cycle";
  }
  for (std::size_t i = 0; i < cfg.extras.size(); ++i) {
    std::string key = cfg.extras[i];
    if (key.rfind("--", 0) != 0) throw PreconditionError("unexpected argument '" + key + "'");
    key.erase(0, 2);
    const auto eq = key.find('=');
    if (eq != std::string::npos) {
      params[key.substr(0, eq)] = parse_real(key.substr(eq + 1));
    } else {
      if (i + 1 >= cfg.extras.size()) throw PreconditionError("missing value for --" + key);
      params[key] = parse_real(cfg.extras[++i]);
    }
  }
  return Family(parse_family(name), params);
}

/// Loads --graph or builds the family truncation of the given radius.
inline Source load_source(const RunConfig& cfg, int default_radius) {
  const bool have_graph = !cfg.graph_path.empty();
  const bool have_family = !cfg.family.empty();
  if (have_graph == have_family) throw PreconditionError("give exactly one of --graph PATH or a family name");
  Source src;
  if (have_graph) {
    if (!cfg.extras.empty()) throw PreconditionError("unexpected argument '" + cfg.extras.front() + "'");
    src.truncation = whole_graph(load_graph(cfg.graph_path));
    src.center = cfg.x0.empty() ? src.truncation.graph.id(src.truncation.graph.root()) : cfg.x0;
  } else {
    src.family = make_family(cfg);
    src.center = cfg.x0.empty() ? src.family->root_id() : cfg.x0;
    src.truncation = src.family->truncate(cfg.radius.value_or(default_radius));
  }
  (void)src.truncation.graph.index_of(src.center);  // throws on an unknown center
  return src;
}

inline Tolerances parse_tolerances(const RunConfig& cfg) {
  Tolerances t;
  for (const auto& [k, v] : parse_pairs(cfg.tol, "--tol")) {
    if (!(v > 0.0)) throw PreconditionError("tolerance '" + k + "' must be positive");
    if (k == "identity") {
      t.identity = v;
    } else if (k == "solve") {
      t.solve = v;
    } else {
      throw PreconditionError("unknown tolerance '" + k + "' (known: identity, solve)");
    }
  }
  return t;
}

/// Header shared by every JSON document.
inline nlohmann::json envelope(const RunConfig& cfg, const MagneticGraph& g, const Tolerances& tol) {
  nlohmann::json source;
  if (!cfg.graph_path.empty()) {
    source = {{"graph", std::filesystem::path(cfg.graph_path).filename().string()}};
  } else {
    source = {{"family", cfg.family}, {"params", cfg.params}, {"extra_params", cfg.extras}};
  }
  return {{"tool", "magsa"},
          {"version", kVersion},
          {"command", cfg.command},
          {"source", source},
          {"graph_hash", graph_hash(g)},
          {"seed", cfg.seed},
          {"tolerances", to_json(tol)}};
}

inline void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.out.empty()) {
    out << text;
  } else {
    write_file_atomic(cfg.out, text);
  }
}

inline int cmd_gen(const RunConfig& cfg, std::ostream& out) {
  if (cfg.family.empty()) throw PreconditionError("gen needs a family name");
  const Family fam = make_family(cfg);
  const Truncation t = fam.truncate(cfg.radius.value_or(10));
  const std::string text = graph_to_json(t.graph).dump(2) + "\n";
  emit(cfg, text, out);
  // the written file must load back to the same graph
  if (!cfg.out.empty() && graph_hash(load_graph(cfg.out)) != graph_hash(t.graph)) {
    throw NumericError("written graph does not round-trip");
  }
  return kOk;
}

inline int cmd_check(const RunConfig& cfg, std::ostream& out) {
  const Source src = load_source(cfg, 12);
  MagneticGraph g = src.truncation.graph;
  SuiteOptions opt;
  opt.seed = cfg.seed;
  opt.trials = cfg.trials;
  opt.tol = parse_tolerances(cfg);
  const SuiteResult result = run_check_suite(g, opt);
  nlohmann::json doc = envelope(cfg, g, opt.tol);
  doc["trials"] = cfg.trials;
  doc["suite"] = to_json(result);
  emit(cfg, cfg.format == "text" ? suite_text(doc) : doc.dump(2) + "\n", out);
  return result.passed() ? kOk : kCheckFailed;
}

inline int cmd_report(const RunConfig& cfg, std::ostream& out) {
  ReportOptions opt;
  opt.max_n = cfg.max_n.value_or(cfg.radius.value_or(50));
  if (opt.max_n < 1) throw PreconditionError("--max-n must be at least 1");
  const Tolerances tol = parse_tolerances(cfg);
  TheoremReport rep;
  nlohmann::json doc;
  if (!cfg.graph_path.empty()) {
    const Source src = load_source(cfg, 0);
    rep = theorem_report(src.truncation.graph, src.center, cfg.finite, opt);
    doc = envelope(cfg, src.truncation.graph, tol);
  } else {
    if (cfg.family.empty()) throw PreconditionError("give exactly one of --graph PATH or a family name");
    const Family fam = make_family(cfg);
    const std::string center = cfg.x0.empty() ? fam.root_id() : cfg.x0;
    rep = theorem_report(fam, center, opt);
    doc = envelope(cfg, MagneticGraph{}, tol);
    doc["graph_hash"] = rep.graph_hash;
  }
  doc["report"] = to_json(rep);
  emit(cfg, cfg.format == "text" ? report_text(doc) : doc.dump(2) + "\n", out);
  return kOk;
}

inline int cmd_assemble(const RunConfig& cfg, std::ostream& out) {
  const int radius = cfg.radius.value_or(1);
  RunConfig local = cfg;
  if (!cfg.family.empty()) local.radius = radius + 1;
  const Source src = load_source(local, radius + 1);
  const auto& g = src.truncation.graph;
  const Ball b = ball(g, g.index_of(src.center), radius);
  for (VertexIndex v : b.vertices) {
    if (src.truncation.frontier[v]) throw TruncationError("ball reaches the truncation frontier");
  }
  const TruncatedOperator op = assemble(g, b, true);
  const std::string csv = matrix_csv(g, op, op.matrix);
  emit(cfg, csv, out);
  if (!cfg.out.empty()) write_file_atomic(cfg.out + ".json", matrix_sidecar(g, op).dump(2) + "\n");
  return kOk;
}

inline int cmd_spectrum(const RunConfig& cfg, std::ostream& out) {
  const int radius = cfg.radius.value_or(cfg.family.empty() ? std::numeric_limits<int>::max() / 2 : 10);
  RunConfig local = cfg;
  if (!cfg.family.empty()) local.radius = radius + 1;
  const Source src = load_source(local, radius + 1);
  const auto& g = src.truncation.graph;
  const Ball b = ball(g, g.index_of(src.center), radius);
  for (VertexIndex v : b.vertices) {
    if (src.truncation.frontier[v]) throw TruncationError("ball reaches the truncation frontier");
  }
  const int k = std::min<int>(cfg.k, static_cast<int>(b.size()));
  const SpectrumResult r = spectrum(g, b, k);
  nlohmann::json doc = envelope(cfg, g, parse_tolerances(cfg));
  doc["center"] = src.center;
  doc["radius"] = b.radius;
  doc["dimension"] = b.size();
  doc["method"] = r.method;
  doc["eigenvalues"] = r.eigenvalues;
  doc["residuals"] = r.residuals;
  if (cfg.format == "text") {
    std::string text;
    char buf[64];
    for (double x : r.eigenvalues) {
      std::snprintf(buf, sizeof buf, "%.17g\n", x);
      text += buf;
    }
    emit(cfg, text, out);
  } else {
    emit(cfg, doc.dump(2) + "\n", out);
  }
  return kOk;
}

inline int cmd_metric(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.from.empty() || !cfg.to.empty()) {
    if (cfg.from.empty() || cfg.to.empty()) throw PreconditionError("--from and --to go together");
    Source src;
    if (cfg.family.empty()) {
      src = load_source(cfg, 0);
    } else {
      const Family fam = make_family(cfg);
      // grow the truncation until the distance stops changing
      std::optional<double> last;
      for (int r = 2;; r *= 2) {
        Truncation t = fam.truncate_covering(cfg.from, r);
        if (auto v = t.graph.find(cfg.to)) {
          const double d = dist(t.graph, t.graph.index_of(cfg.from), *v);
          if (fam.finite() || (last && *last == d)) {
            src.truncation = std::move(t);
            break;
          }
          last = d;
        }
        if (r > (1 << 20)) throw TruncationError("distance did not settle; is '" + cfg.to + "' a vertex?");
      }
    }
    const auto& g = src.truncation.graph;
    const double d = dist(g, g.index_of(cfg.from), g.index_of(cfg.to));
    nlohmann::json doc = envelope(cfg, g, parse_tolerances(cfg));
    doc["from"] = cfg.from;
    doc["to"] = cfg.to;
    doc["distance"] = d;
    if (cfg.format == "text") {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g\n", d);
      emit(cfg, buf, out);
    } else {
      emit(cfg, doc.dump(2) + "\n", out);
    }
    return kOk;
  }
  const int max_n = cfg.max_n.value_or(cfg.radius.value_or(10));
  MetricProfile p;
  if (cfg.family.empty()) {
    const Source src = load_source(cfg, 0);
    p = completeness_profile(src.truncation.graph, src.center, max_n);
  } else {
    const Family fam = make_family(cfg);
    const std::string center = cfg.x0.empty() ? fam.root_id() : cfg.x0;
    std::vector<int> radii;
    for (int n = 1; n <= max_n; ++n) radii.push_back(n);
    p = completeness_profile(fam, center, radii, 1);
  }
  emit(cfg, profile_csv(p), out);
  return kOk;
}

inline void add_source_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("family,--family", cfg.family,
                  "built-in family: halfline, triangular, cycle, random (cycleN for n=N)");
  sub->add_option("--graph", cfg.graph_path, "graph JSON file");
  sub->add_option("--params", cfg.params, "family parameters NAME=VALUE")->expected(0, -1);
  sub->add_option("--x0", cfg.x0, "center vertex id (default: the root)");
  sub->add_option("--radius", cfg.radius, "truncation or ball radius");
  sub->add_option("--seed", cfg.seed, "random seed");
  sub->add_option("--out", cfg.out, "output path (default stdout)");
  sub->add_option("--tol", cfg.tol, "tolerance override NAME=FLOAT (identity, solve)")->expected(0, -1);
  sub->add_option("--format", cfg.format, "json or text")->check(CLI::IsMember({"json", "text"}));
  sub->allow_extras();
}

/// Entry point shared by main() and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"magsa: magnetic Schroedinger operators on weighted graphs"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  RunConfig cfg;

  auto* gen = app.add_subcommand("gen", "write a family truncation as a graph file");
  add_source_options(gen, cfg);
  auto* check = app.add_subcommand("check", "run the identity and inequality suite");
  add_source_options(check, cfg);
  check->add_option("--trials", cfg.trials, "random trials per identity")->check(CLI::NonNegativeNumber);
  auto* report = app.add_subcommand("report", "theorem applicability report");
  add_source_options(report, cfg);
  report->add_option("--max-n", cfg.max_n, "largest radius examined");
  report->add_flag("--finite", cfg.finite, "treat --graph as the whole (finite) graph");
  auto* assemble_cmd = app.add_subcommand("assemble", "matrix of H on a ball as CSV");
  add_source_options(assemble_cmd, cfg);
  auto* spectrum_cmd = app.add_subcommand("spectrum", "smallest eigenvalues on a ball");
  add_source_options(spectrum_cmd, cfg);
  spectrum_cmd->add_option("--k", cfg.k, "number of eigenvalues")->check(CLI::PositiveNumber);
  auto* metric = app.add_subcommand("metric", "weighted distances");
  add_source_options(metric, cfg);
  metric->add_option("--max-n", cfg.max_n, "profile radius");
  metric->add_option("--from", cfg.from, "source vertex id");
  metric->add_option("--to", cfg.to, "target vertex id");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  for (auto* sub : app.get_subcommands()) {
    cfg.command = sub->get_name();
    cfg.extras = sub->remaining();
  }
  try {
    if (cfg.command == "gen") return cmd_gen(cfg, out);
    if (cfg.command == "check") return cmd_check(cfg, out);
    if (cfg.command == "report") return cmd_report(cfg, out);
    if (cfg.command == "assemble") return cmd_assemble(cfg, out);
    if (cfg.command == "spectrum") return cmd_spectrum(cfg, out);
    if (cfg.command == "metric") return cmd_metric(cfg, out);
  } catch (const NumericError& e) {
    err << "magsa: numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const Error& e) {
    err << "magsa: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "magsa: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace magsa::cli
