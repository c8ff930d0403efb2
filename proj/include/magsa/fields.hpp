#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "magsa/graph.hpp"

namespace magsa {

/// Complex function on the vertices of a stored graph. Entries equal to zero
/// are outside the support; every field over a finite graph is finitely
/// supported.
class VertexField {
 public:
  VertexField() = default;
  explicit VertexField(std::size_t n) : values_(n) {}
  explicit VertexField(std::vector<Complex> values) : values_(std::move(values)) {}

  static VertexField indicator(std::size_t n, VertexIndex x) {
    VertexField f(n);
    f[x] = 1.0;
    return f;
  }
  static VertexField constant(std::size_t n, Complex c) {
    return VertexField(std::vector<Complex>(n, c));
  }
  static VertexField from_real(std::span<const double> values) {
    VertexField f(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) f[static_cast<VertexIndex>(i)] = values[i];
    return f;
  }

  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  Complex& operator[](VertexIndex x) { return values_[x]; }
  const Complex& operator[](VertexIndex x) const { return values_[x]; }
  [[nodiscard]] std::span<const Complex> values() const noexcept { return values_; }

  [[nodiscard]] std::vector<VertexIndex> support() const {
    std::vector<VertexIndex> s;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (values_[i] != Complex{}) s.push_back(static_cast<VertexIndex>(i));
    }
    return s;
  }

  /// Pointwise product with a real function.
  [[nodiscard]] VertexField times(std::span<const double> phi) const {
    VertexField out(size());
    for (std::size_t i = 0; i < size(); ++i) out.values_[i] = values_[i] * phi[i];
    return out;
  }
  /// Pointwise product with another vertex field.
  [[nodiscard]] VertexField times(const VertexField& other) const {
    VertexField out(size());
    for (std::size_t i = 0; i < size(); ++i) out.values_[i] = values_[i] * other.values_[i];
    return out;
  }
  /// Pointwise modulus |u|.
  [[nodiscard]] VertexField modulus() const {
    VertexField out(size());
    for (std::size_t i = 0; i < size(); ++i) out.values_[i] = std::abs(values_[i]);
    return out;
  }

 private:
  std::vector<Complex> values_;
};

/// Function on oriented edges with Y(reverse e) = -Y(e). Values are stored for
/// the stored orientation only; `at` derives the reverse.
class EdgeField {
 public:
  EdgeField() = default;
  explicit EdgeField(std::size_t edge_count) : values_(edge_count) {}

  static EdgeField indicator(std::size_t edge_count, EdgeIndex e) {
    EdgeField f(edge_count);
    f[e] = 1.0;
    return f;
  }

  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  /// Value on the stored orientation of edge `e`.
  Complex& operator[](EdgeIndex e) { return values_[e]; }
  const Complex& operator[](EdgeIndex e) const { return values_[e]; }
  [[nodiscard]] Complex at(const OrientedEdge& e) const {
    return e.reversed ? -values_[e.stored] : values_[e.stored];
  }
  [[nodiscard]] std::span<const Complex> values() const noexcept { return values_; }

 private:
  std::vector<Complex> values_;
};

}  // namespace magsa
