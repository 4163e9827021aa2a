#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace wlab {

// A point of the ground space. For table-backed spaces the single
// coordinate is the row index of the point in the distance table.
struct Point {
  std::vector<double> coords;

  Point() = default;
  Point(std::initializer_list<double> c) : coords(c) {}
  explicit Point(std::vector<double> c) : coords(std::move(c)) {}

  static Point zero(std::size_t dim) { return Point(std::vector<double>(dim, 0.0)); }

  std::size_t dim() const { return coords.size(); }
  double operator[](std::size_t i) const { return coords[i]; }
  double& operator[](std::size_t i) { return coords[i]; }

  bool operator==(const Point& other) const { return coords == other.coords; }
  bool operator!=(const Point& other) const { return !(*this == other); }
};

// Lexicographic order used for canonical atom ordering.
inline bool lex_less(const Point& a, const Point& b) {
  return a.coords < b.coords;
}

inline Point operator+(const Point& a, const Point& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("point dimension mismatch");
  Point r = a;
  for (std::size_t i = 0; i < r.dim(); ++i) r[i] += b[i];
  return r;
}

inline Point operator-(const Point& a, const Point& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("point dimension mismatch");
  Point r = a;
  for (std::size_t i = 0; i < r.dim(); ++i) r[i] -= b[i];
  return r;
}

inline Point operator*(double s, const Point& a) {
  Point r = a;
  for (std::size_t i = 0; i < r.dim(); ++i) r[i] *= s;
  return r;
}

inline double dot(const Point& a, const Point& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("point dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

inline double squared_norm(const Point& a) { return dot(a, a); }
inline double norm(const Point& a) { return std::sqrt(squared_norm(a)); }

inline bool all_finite(const Point& a) {
  for (double c : a.coords)
    if (!std::isfinite(c)) return false;
  return true;
}

}  // namespace wlab
