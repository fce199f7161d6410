#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "alcc/errors.hpp"

namespace alcc {

using Vector = std::vector<double>;

inline void check_same_dim(const Vector& a, const Vector& b, const char* where) {
  if (a.size() != b.size())
    throw DimensionError(std::string(where) + ": dimension mismatch (" +
                         std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
}

inline bool all_finite(const Vector& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline void require_finite(const Vector& v, const char* where) {
  if (!all_finite(v)) throw NumericError(std::string(where) + ": non-finite value");
}

inline double dot(const Vector& a, const Vector& b) {
  check_same_dim(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vector& v) { return std::sqrt(dot(v, v)); }

inline double norm_inf(const Vector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double norm1(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

inline Vector add(const Vector& a, const Vector& b) {
  check_same_dim(a, b, "add");
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vector sub(const Vector& a, const Vector& b) {
  check_same_dim(a, b, "sub");
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vector scaled(const Vector& a, double s) {
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

/// y += alpha * x
inline void axpy(double alpha, const Vector& x, Vector& y) {
  check_same_dim(x, y, "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline Vector zeros(std::size_t n) { return Vector(n, 0.0); }

/// Deterministic RNG; every random draw in the library flows through one of these.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }
  double gaussian() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }
  std::uint64_t next_u64() { return gen_(); }

  Vector gaussian_vector(std::size_t n) {
    Vector v(n);
    for (auto& x : v) x = gaussian();
    return v;
  }
  Vector uniform_vector(std::size_t n, double lo, double hi) {
    Vector v(n);
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace alcc
