#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace edmrepair {

enum class Backend { floating, exact };

struct ToleranceConfig {
  double eps_sign = 1e-8;  // relative zero threshold for sign tests
  double eps_dist = 1e-6;  // relative tolerance for distance round trips
  bool normalize = true;   // rescale by the max squared distance before predicates

  void check() const {
    if (!(eps_sign > 0.0) || !(eps_dist > 0.0)) throw std::invalid_argument("tolerances must be positive");
  }
};

struct Config {
  Backend backend = Backend::floating;
  ToleranceConfig tol;
  unsigned threads = 1;

  static Config exact() {
    Config c;
    c.backend = Backend::exact;
    return c;
  }
};

using Rational = mpq_class;

template <class T>
struct scalar_traits;

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static double from_double(double v) { return v; }
  static double to_double(double v) { return v; }
  static double abs(double v) { return std::fabs(v); }
};

template <>
struct scalar_traits<Rational> {
  static constexpr bool exact = true;
  static Rational from_double(double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite value has no rational form");
    return Rational(v);
  }
  static double to_double(const Rational& v) { return v.get_d(); }
  static Rational abs(const Rational& v) { return ::abs(v); }
};

inline int sign_of(const Rational& v) { return sgn(v); }
inline int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Determinant of a dense row-major square matrix. Partial pivoting for
// doubles, first-nonzero pivoting for rationals (exact).
template <class T>
T determinant(std::vector<T> a, std::size_t n) {
  if (a.size() != n * n) throw std::invalid_argument("determinant: matrix must be n x n");
  T det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    if constexpr (scalar_traits<T>::exact) {
      while (piv < n && a[piv * n + c] == 0) ++piv;
      if (piv == n) return T(0);
    } else {
      for (std::size_t r = c + 1; r < n; ++r)
        if (std::fabs(a[r * n + c]) > std::fabs(a[piv * n + c])) piv = r;
      if (a[piv * n + c] == 0.0) return 0.0;
    }
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
      det = -det;
    }
    const T p = a[c * n + c];
    det *= p;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (a[r * n + c] == 0) continue;
      const T f = a[r * n + c] / p;
      for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
    }
  }
  return det;
}

}  // namespace edmrepair
