#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "magsa/graph.hpp"

namespace magsa {

using Json = nlohmann::json;

/// Builds a graph from the JSON document layout:
///   {"vertices": [{"id", "w", "q"}], "edges": [{"from", "to", "a", "sigma": {"re", "im"}}],
///    "root": id}
/// "q" defaults to 0, "sigma" to 1 and "root" to the first vertex.
inline MagneticGraph graph_from_json(const Json& doc) {
  try {
    if (!doc.is_object()) throw ParseError("graph document must be a JSON object");
    if (!doc.contains("vertices") || !doc["vertices"].is_array()) {
      throw ParseError("graph document needs a \"vertices\" array");
    }
    GraphBuilder builder;
    for (const auto& v : doc["vertices"]) {
      if (!v.contains("id") || !v["id"].is_string()) throw ParseError("vertex entry without string \"id\"");
      if (!v.contains("w") || !v["w"].is_number()) {
        throw ParseError("vertex '" + v["id"].get<std::string>() + "' without numeric \"w\"");
      }
      const double q = v.contains("q") ? v["q"].get<double>() : 0.0;
      builder.add_vertex(v["id"].get<std::string>(), v["w"].get<double>(), q);
    }
    if (doc.contains("edges")) {
      if (!doc["edges"].is_array()) throw ParseError("\"edges\" must be an array");
      for (const auto& e : doc["edges"]) {
        if (!e.contains("from") || !e.contains("to") || !e.contains("a")) {
          throw ParseError("edge entry needs \"from\", \"to\" and \"a\"");
        }
        Complex sigma{1.0, 0.0};
        if (e.contains("sigma")) {
          const auto& s = e["sigma"];
          sigma = {s.value("re", 0.0), s.value("im", 0.0)};
        }
        builder.add_edge(e["from"].get<std::string>(), e["to"].get<std::string>(),
                         e["a"].get<double>(), sigma);
      }
    }
    if (doc.contains("root")) builder.set_root(doc["root"].get<std::string>());
    return std::move(builder).build();
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("malformed graph document: ") + ex.what());
  }
}

inline MagneticGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open graph file '" + path.string() + "'");
  Json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& ex) {
    throw ParseError("'" + path.string() + "': " + ex.what());
  }
  return graph_from_json(doc);
}

inline Json graph_to_json(const MagneticGraph& g) {
  Json vertices = Json::array();
  for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
    vertices.push_back({{"id", g.id(v)}, {"w", g.weight(v)}, {"q", g.potential(v)}});
  }
  Json edges = Json::array();
  for (const auto& e : g.edges()) {
    edges.push_back({{"from", g.id(e.origin)},
                     {"to", g.id(e.terminus)},
                     {"a", e.weight},
                     {"sigma", {{"re", e.phase.real()}, {"im", e.phase.imag()}}}});
  }
  return {{"vertices", std::move(vertices)}, {"edges", std::move(edges)}, {"root", g.id(g.root())}};
}

/// Writes `contents` to `path` through a temporary file and a rename so a
/// reader never observes a partial file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << contents;
    if (!out) throw Error("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

inline void save_graph(const MagneticGraph& g, const std::filesystem::path& path) {
  write_file_atomic(path, graph_to_json(g).dump(2) + "\n");
}

/// 64-bit FNV-1a over ids, weights, potentials and edges (doubles hashed by
/// their bit patterns, least significant byte first).
class Fnv1a {
 public:
  void bytes(std::string_view s) {
    for (unsigned char c : s) mix(c);
    mix(0);
  }
  void u64(std::uint64_t x) {
    for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>(x >> (8 * i)));
  }
  void real(double x) { u64(std::bit_cast<std::uint64_t>(x)); }
  [[nodiscard]] std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
    return buf;
  }

 private:
  void mix(unsigned char c) {
    h_ ^= c;
    h_ *= 0x100000001b3ULL;
  }
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

inline std::string graph_hash(const MagneticGraph& g) {
  Fnv1a h;
  h.u64(g.vertex_count());
  for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
    h.bytes(g.id(v));
    h.real(g.weight(v));
    h.real(g.potential(v));
  }
  h.u64(g.edge_count());
  for (const auto& e : g.edges()) {
    h.u64(e.origin);
    h.u64(e.terminus);
    h.real(e.weight);
    h.real(e.phase.real());
    h.real(e.phase.imag());
  }
  h.u64(g.root());
  return h.hex();
}

}  // namespace magsa
