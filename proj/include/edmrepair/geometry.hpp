#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "core.hpp"
#include "scalar.hpp"

namespace edmrepair {

namespace detail {

inline void require_distinct(std::span<const PointId> pts, std::size_t n) {
  for (std::size_t x = 0; x < pts.size(); ++x) {
    if (pts[x] >= n) throw std::out_of_range("point index out of range");
    for (std::size_t y = x + 1; y < pts.size(); ++y)
      if (pts[x] == pts[y]) throw std::invalid_argument("duplicate point index");
  }
}

inline double lookup(const DistanceSpace& s, PointId i, PointId j, const Modifications* ov) {
  if (i == j) return 0.0;
  if (ov) {
    auto it = ov->find(Pair(i, j));
    if (it != ov->end()) return it->second;
  }
  return s(i, j);
}

inline void check_overrides(std::span<const PointId> pts, const Modifications& ov) {
  for (const auto& [p, v] : ov) {
    if (!(v >= 0.0)) throw std::invalid_argument("negative override value");
    if (p.a == p.b) throw std::invalid_argument("override on a diagonal entry");
    const bool ina = std::find(pts.begin(), pts.end(), p.a) != pts.end();
    const bool inb = std::find(pts.begin(), pts.end(), p.b) != pts.end();
    if (!ina || !inb) throw std::invalid_argument("override pair not among the points");
  }
}

// Local m x m squared-distance block for the listed points.
inline std::vector<double> local_block(const DistanceSpace& s, std::span<const PointId> pts,
                                       const Modifications* ov) {
  const std::size_t m = pts.size();
  std::vector<double> d(m * m, 0.0);
  for (std::size_t x = 0; x < m; ++x)
    for (std::size_t y = x + 1; y < m; ++y) d[x * m + y] = d[y * m + x] = lookup(s, pts[x], pts[y], ov);
  return d;
}

template <class T>
T bordered_det(const std::vector<double>& block, std::size_t m) {
  const std::size_t k = m + 1;
  std::vector<T> a(k * k, T(0));
  for (std::size_t i = 1; i < k; ++i) {
    a[i] = T(1);
    a[i * k] = T(1);
  }
  for (std::size_t x = 0; x < m; ++x)
    for (std::size_t y = 0; y < m; ++y) a[(x + 1) * k + (y + 1)] = scalar_traits<T>::from_double(block[x * m + y]);
  return determinant<T>(std::move(a), k);
}

}  // namespace detail

// Cayley-Menger determinant of the bordered (r+2)x(r+2) matrix.
template <class T = double>
T cm_det(const DistanceSpace& s, std::span<const PointId> pts) {
  if (pts.empty()) throw std::invalid_argument("cm_det needs at least one point");
  detail::require_distinct(pts, s.size());
  return detail::bordered_det<T>(detail::local_block(s, pts, nullptr), pts.size());
}

template <class T = double>
T cm_det_with_overrides(const DistanceSpace& s, std::span<const PointId> pts, const Modifications& overrides) {
  if (pts.empty()) throw std::invalid_argument("cm_det needs at least one point");
  detail::require_distinct(pts, s.size());
  detail::check_overrides(pts, overrides);
  return detail::bordered_det<T>(detail::local_block(s, pts, &overrides), pts.size());
}

// Sign of the CM determinant; zero when |CM| <= eps_sign * m^(r+2) on the
// (optionally normalized) values, m = max(1, largest squared distance).
inline int cm_sign(const DistanceSpace& s, std::span<const PointId> pts, const Config& cfg = {},
                   const Modifications& overrides = {}) {
  if (pts.empty()) throw std::invalid_argument("cm_sign needs at least one point");
  detail::require_distinct(pts, s.size());
  detail::check_overrides(pts, overrides);
  std::vector<double> block = detail::local_block(s, pts, &overrides);
  const std::size_t m = pts.size();
  if (cfg.backend == Backend::exact) return sign_of(detail::bordered_det<Rational>(block, m));
  double mx = 0.0;
  for (double v : block) mx = std::max(mx, v);
  if (cfg.tol.normalize && mx > 0.0) {
    for (double& v : block) v /= mx;
    mx = 1.0;
  }
  const double scale = std::max(1.0, mx);
  const double det = detail::bordered_det<double>(block, m);
  const double thresh = cfg.tol.eps_sign * std::pow(scale, static_cast<double>(m + 1));
  if (std::fabs(det) <= thresh) return 0;
  return det > 0 ? 1 : -1;
}

// ---------------------------------------------------------------------------
// Gram pivoting
//
// The Gram matrix relative to the first point is eliminated with the
// lowest-index pivot whose residual diagonal is positive. That residual is
// the squared height of the point over the current basis, which equals
// -CM(B+z) / (2 CM(B)). The float backend compares it against eps_sign * m.

struct EmbeddingReport {
  bool embeddable = false;
  int dimension = -1;           // affine rank of the realization when embeddable
  PointSet basis;               // greedy lowest-index independent set
  std::optional<Realization> realization;  // in `dimension` coordinates
};

namespace detail {

struct FloatFactor {
  std::vector<std::size_t> pivots;  // local indices of basis points after the first
  bool negative = false;
};

inline FloatFactor factor_float(const std::vector<double>& d, std::size_t m, double tol) {
  FloatFactor f;
  if (m <= 1) return f;
  const std::size_t g = m - 1;
  std::vector<double> S(g * g);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j) S[i * g + j] = 0.5 * (d[i + 1] + d[j + 1] - d[(i + 1) * m + (j + 1)]);
  std::vector<char> used(g, 0);
  for (;;) {
    std::size_t piv = g;
    for (std::size_t i = 0; i < g; ++i)
      if (!used[i] && S[i * g + i] > tol) {
        piv = i;
        break;
      }
    if (piv == g) break;
    used[piv] = 1;
    f.pivots.push_back(piv + 1);
    const double root = std::sqrt(S[piv * g + piv]);
    std::vector<double> col(g);
    for (std::size_t i = 0; i < g; ++i) col[i] = S[i * g + piv] / root;
    for (std::size_t i = 0; i < g; ++i)
      for (std::size_t j = 0; j < g; ++j) S[i * g + j] -= col[i] * col[j];
  }
  for (std::size_t i = 0; i < g; ++i)
    if (!used[i] && S[i * g + i] < -tol) f.negative = true;
  return f;
}

struct ExactFactor {
  std::vector<std::size_t> pivots;
  bool negative = false;
  bool residual_zero = true;
};

inline ExactFactor factor_exact(const std::vector<double>& d, std::size_t m) {
  ExactFactor f;
  if (m <= 1) return f;
  const std::size_t g = m - 1;
  std::vector<Rational> S(g * g);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j) {
      Rational v = Rational(d[i + 1]) + Rational(d[j + 1]) - Rational(d[(i + 1) * m + (j + 1)]);
      v /= 2;
      S[i * g + j] = v;
    }
  std::vector<char> used(g, 0);
  for (;;) {
    std::size_t piv = g;
    for (std::size_t i = 0; i < g; ++i) {
      if (used[i]) continue;
      const int sg = sgn(S[i * g + i]);
      if (sg < 0) {
        f.negative = true;
        return f;
      }
      if (sg > 0) {
        piv = i;
        break;
      }
    }
    if (piv == g) break;
    used[piv] = 1;
    f.pivots.push_back(piv + 1);
    const Rational p = S[piv * g + piv];
    std::vector<Rational> row(g);
    for (std::size_t j = 0; j < g; ++j) row[j] = S[piv * g + j] / p;
    for (std::size_t i = 0; i < g; ++i) {
      if (S[i * g + piv] == 0) continue;
      const Rational c = S[i * g + piv];
      for (std::size_t j = 0; j < g; ++j) S[i * g + j] -= c * row[j];
    }
  }
  for (std::size_t i = 0; i < g && f.residual_zero; ++i)
    for (std::size_t j = 0; j < g; ++j)
      if (!used[i] && !used[j] && S[i * g + j] != 0) {
        f.residual_zero = false;
        break;
      }
  return f;
}

// Coordinates from a float factorization with a fixed pivot order.
inline std::vector<std::vector<double>> coords_for_pivots(const std::vector<double>& d, std::size_t m,
                                                          const std::vector<std::size_t>& pivots) {
  const std::size_t r = pivots.size();
  std::vector<std::vector<double>> c(m, std::vector<double>(r, 0.0));
  auto gram = [&](std::size_t i, std::size_t j) { return 0.5 * (d[i] + d[j] - d[i * m + j]); };
  for (std::size_t k = 0; k < r; ++k) {
    const std::size_t b = pivots[k];
    double lead = gram(b, b);
    for (std::size_t l = 0; l < k; ++l) lead -= c[b][l] * c[b][l];
    lead = std::sqrt(std::max(lead, 0.0));
    for (std::size_t i = 1; i < m; ++i) {
      if (i == b) {
        c[i][k] = lead;
        continue;
      }
      double v = gram(i, b);
      for (std::size_t l = 0; l < k; ++l) v -= c[i][l] * c[b][l];
      c[i][k] = lead > 0.0 ? v / lead : 0.0;
    }
  }
  return c;
}

inline double sq(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t t = 0; t < p.size(); ++t) s += (p[t] - q[t]) * (p[t] - q[t]);
  return s;
}

}  // namespace detail

// Decide embeddability of the sorted subset and, when embeddable, build the
// canonical realization in the minimal dimension.
inline EmbeddingReport analyze(const DistanceSpace& s, const PointSet& subset, const Config& cfg = {},
                               const Modifications* overrides = nullptr) {
  EmbeddingReport rep;
  const std::size_t m = subset.size();
  if (m == 0) {
    rep.embeddable = true;
    rep.dimension = 0;
    rep.realization = Realization{0, {}};
    return rep;
  }
  detail::require_distinct(subset, s.size());
  std::vector<double> d = detail::local_block(s, subset, overrides);
  double mx = 0.0;
  for (double v : d) mx = std::max(mx, v);

  std::vector<std::size_t> pivots;
  if (cfg.backend == Backend::exact) {
    detail::ExactFactor f = detail::factor_exact(d, m);
    if (f.negative || !f.residual_zero) return rep;
    pivots = f.pivots;
  }

  const double unit = (cfg.tol.normalize && mx > 0.0) ? mx : 1.0;
  std::vector<double> dn = d;
  for (double& v : dn) v /= unit;
  const double m_scale = std::max(1.0, mx / unit);

  if (cfg.backend == Backend::floating) {
    detail::FloatFactor f = detail::factor_float(dn, m, cfg.tol.eps_sign * m_scale);
    if (f.negative) return rep;
    pivots = f.pivots;
  }

  auto c = detail::coords_for_pivots(dn, m, pivots);
  if (cfg.backend == Backend::floating) {
    const double tol = cfg.tol.eps_dist * m_scale;
    for (std::size_t x = 0; x < m; ++x)
      for (std::size_t y = x + 1; y < m; ++y)
        if (std::fabs(detail::sq(c[x], c[y]) - dn[x * m + y]) > tol) return rep;
  }

  rep.embeddable = true;
  rep.dimension = static_cast<int>(pivots.size());
  rep.basis.push_back(subset[0]);
  for (std::size_t p : pivots) rep.basis.push_back(subset[p]);
  std::sort(rep.basis.begin(), rep.basis.end());
  Realization real;
  real.dim = rep.dimension;
  const double back = std::sqrt(unit);
  for (std::size_t x = 0; x < m; ++x) {
    for (double& v : c[x]) v *= back;
    real.coords.emplace(subset[x], std::move(c[x]));
  }
  rep.realization = std::move(real);
  return rep;
}

// Minimal embedding dimension, or nullopt when no Euclidean embedding exists.
inline std::optional<int> embedding_dimension(const DistanceSpace& s, const PointSet& subset, const Config& cfg = {}) {
  EmbeddingReport rep = analyze(s, subset, cfg);
  if (!rep.embeddable) return std::nullopt;
  return rep.dimension;
}

// Empty sets embed in every dimension (including -1); nonempty sets never
// embed for r < 0.
inline bool is_embeddable(const DistanceSpace& s, const PointSet& subset, int r, const Config& cfg = {}) {
  if (subset.empty()) return true;
  if (r < 0) return false;
  if (subset.size() == 1) return true;
  EmbeddingReport rep = analyze(s, subset, cfg);
  return rep.embeddable && rep.dimension <= r;
}

inline bool is_embeddable(const DistanceSpace& s, int r, const Config& cfg = {}) {
  return is_embeddable(s, s.points(), r, cfg);
}

inline bool is_strongly_embeddable(const DistanceSpace& s, const PointSet& subset, int r, const Config& cfg = {}) {
  return is_embeddable(s, subset, r, cfg) && !is_embeddable(s, subset, r - 1, cfg);
}

// Canonical realization padded to d coordinates, or nullopt.
inline std::optional<Realization> realize(const DistanceSpace& s, const PointSet& subset, int d,
                                          const Config& cfg = {}, const Modifications* overrides = nullptr) {
  if (d < 0) return std::nullopt;
  EmbeddingReport rep = analyze(s, subset, cfg, overrides);
  if (!rep.embeddable || rep.dimension > d) return std::nullopt;
  Realization r = std::move(*rep.realization);
  r.dim = d;
  for (auto& [p, c] : r.coords) c.resize(static_cast<std::size_t>(d), 0.0);
  return r;
}

inline std::optional<Realization> realize(const DistanceSpace& s, int d, const Config& cfg = {}) {
  return realize(s, s.points(), d, cfg);
}

// A nonempty set of r+1 points is independent when it is strongly r-embeddable.
inline bool is_independent(const DistanceSpace& s, const PointSet& subset, const Config& cfg = {}) {
  if (subset.empty()) throw std::invalid_argument("independence is defined for nonempty sets");
  if (subset.size() == 1) return true;
  EmbeddingReport rep = analyze(s, subset, cfg);
  return rep.embeddable && rep.dimension == static_cast<int>(subset.size()) - 1;
}

// Grow seed by smallest index while independence holds. One ascending pass is
// enough because independence is closed under subsets.
inline PointSet extend_to_max_independent(const DistanceSpace& s, const PointSet& ground, const PointSet& seed,
                                          const Config& cfg = {}) {
  PointSet cur = make_point_set(seed);
  if (!cur.empty() && !is_independent(s, cur, cfg)) throw std::invalid_argument("seed is not independent");
  for (PointId z : make_point_set(ground)) {
    if (contains(cur, z)) continue;
    PointSet next = with_point(cur, z);
    if (is_independent(s, next, cfg)) cur = std::move(next);
  }
  return cur;
}

}  // namespace edmrepair
