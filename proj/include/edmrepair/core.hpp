#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace edmrepair {

using PointId = std::size_t;
// Sorted, duplicate-free list of point indices.
using PointSet = std::vector<PointId>;
using Weight = std::int64_t;

// Unordered pair of point indices, stored with a <= b.
struct Pair {
  PointId a = 0;
  PointId b = 0;

  Pair() = default;
  Pair(PointId x, PointId y) : a(std::min(x, y)), b(std::max(x, y)) {}

  auto operator<=>(const Pair&) const = default;
  bool operator==(const Pair&) const = default;
};

using Modifications = std::map<Pair, double>;

// ---------------------------------------------------------------------------
// point-set helpers

inline PointSet make_point_set(std::vector<PointId> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

inline PointSet iota_points(std::size_t n) {
  PointSet s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = i;
  return s;
}

inline bool contains(const PointSet& s, PointId p) {
  return std::binary_search(s.begin(), s.end(), p);
}

inline PointSet with_point(PointSet s, PointId p) {
  auto it = std::lower_bound(s.begin(), s.end(), p);
  if (it == s.end() || *it != p) s.insert(it, p);
  return s;
}

inline PointSet without_point(PointSet s, PointId p) {
  auto it = std::lower_bound(s.begin(), s.end(), p);
  if (it != s.end() && *it == p) s.erase(it);
  return s;
}

inline PointSet set_union(const PointSet& x, const PointSet& y) {
  PointSet out;
  out.reserve(x.size() + y.size());
  std::set_union(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
  return out;
}

inline PointSet set_minus(const PointSet& x, const PointSet& y) {
  PointSet out;
  out.reserve(x.size());
  std::set_difference(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
  return out;
}

inline bool disjoint(const PointSet& x, const PointSet& y) {
  auto i = x.begin();
  auto j = y.begin();
  while (i != x.end() && j != y.end()) {
    if (*i == *j) return false;
    if (*i < *j) ++i; else ++j;
  }
  return true;
}

// Simple undirected graph on vertices 0..n-1.
struct Graph {
  std::size_t n = 0;
  std::vector<Pair> edges;

  Graph() = default;
  Graph(std::size_t vertices, std::vector<Pair> e) : n(vertices), edges(std::move(e)) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    check();
  }

  void check() const {
    for (const Pair& e : edges) {
      if (e.a == e.b) throw std::invalid_argument("graph has a loop");
      if (e.b >= n) throw std::out_of_range("edge endpoint out of range");
    }
  }

  bool has_edge(std::size_t u, std::size_t v) const {
    return std::binary_search(edges.begin(), edges.end(), Pair(u, v));
  }

  bool operator==(const Graph&) const = default;
};

// ---------------------------------------------------------------------------
// DistanceSpace

// n labelled points with a matrix of squared distances. Construction only
// checks the shape; use validate() for the metric-space invariants.
class DistanceSpace {
 public:
  DistanceSpace() = default;

  DistanceSpace(std::size_t n, std::vector<double> flat, std::vector<std::string> labels = {})
      : n_(n), d_(std::move(flat)), labels_(std::move(labels)) {
    if (d_.size() != n_ * n_) throw std::invalid_argument("distance matrix must be n x n");
    fill_labels();
  }

  explicit DistanceSpace(const std::vector<std::vector<double>>& rows,
                         std::vector<std::string> labels = {})
      : n_(rows.size()), labels_(std::move(labels)) {
    d_.reserve(n_ * n_);
    for (const auto& row : rows) {
      if (row.size() != n_) throw std::invalid_argument("distance matrix must be square");
      d_.insert(d_.end(), row.begin(), row.end());
    }
    fill_labels();
  }

  std::size_t size() const { return n_; }
  bool empty() const { return n_ == 0; }

  double operator()(PointId i, PointId j) const { return d_[i * n_ + j]; }
  double at(PointId i, PointId j) const {
    if (i >= n_ || j >= n_) throw std::out_of_range("point index out of range");
    return d_[i * n_ + j];
  }

  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(PointId i) const { return labels_.at(i); }
  const std::vector<double>& flat() const { return d_; }

  PointSet points() const { return iota_points(n_); }

  double max_sqdist(std::span<const PointId> pts) const {
    double m = 0.0;
    for (std::size_t x = 0; x < pts.size(); ++x)
      for (std::size_t y = x + 1; y < pts.size(); ++y) m = std::max(m, (*this)(pts[x], pts[y]));
    return m;
  }

  double max_sqdist() const {
    double m = 0.0;
    for (double v : d_) m = std::max(m, v);
    return m;
  }

  bool operator==(const DistanceSpace&) const = default;

 private:
  void fill_labels() {
    if (labels_.empty()) {
      labels_.reserve(n_);
      for (std::size_t i = 0; i < n_; ++i) labels_.push_back(std::to_string(i));
    }
    if (labels_.size() != n_) throw std::invalid_argument("label count must equal point count");
  }

  std::size_t n_ = 0;
  std::vector<double> d_;
  std::vector<std::string> labels_;
};

struct Violation {
  enum class Kind { nonzero_diagonal, negative_entry, asymmetric, not_finite };
  Kind kind;
  PointId i = 0;
  PointId j = 0;

  std::string message() const {
    switch (kind) {
      case Kind::nonzero_diagonal: return "nonzero diagonal at " + std::to_string(i);
      case Kind::negative_entry:
        return "negative entry at (" + std::to_string(i) + "," + std::to_string(j) + ")";
      case Kind::asymmetric:
        return "asymmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")";
      case Kind::not_finite:
        return "non-finite entry at (" + std::to_string(i) + "," + std::to_string(j) + ")";
    }
    return "unknown violation";
  }
};

// First violated invariant in row-major order, or nullopt.
inline std::optional<Violation> validate(const DistanceSpace& s) {
  const std::size_t n = s.size();
  for (PointId i = 0; i < n; ++i) {
    for (PointId j = 0; j < n; ++j) {
      const double v = s(i, j);
      if (!std::isfinite(v)) return Violation{Violation::Kind::not_finite, i, j};
      if (i == j && v != 0.0) return Violation{Violation::Kind::nonzero_diagonal, i, i};
      if (v < 0.0) return Violation{Violation::Kind::negative_entry, i, j};
      if (j > i && v != s(j, i)) return Violation{Violation::Kind::asymmetric, i, j};
    }
  }
  return std::nullopt;
}

// Induced subspace on the listed points (in the given order), labels kept.
inline DistanceSpace induced(const DistanceSpace& s, std::span<const PointId> keep) {
  const std::size_t m = keep.size();
  std::vector<double> flat(m * m);
  std::vector<std::string> labels;
  labels.reserve(m);
  for (std::size_t x = 0; x < m; ++x) {
    if (keep[x] >= s.size()) throw std::out_of_range("unknown point " + std::to_string(keep[x]));
    labels.push_back(s.label(keep[x]));
    for (std::size_t y = 0; y < m; ++y) flat[x * m + y] = s(keep[x], keep[y]);
  }
  return DistanceSpace(m, std::move(flat), std::move(labels));
}

inline DistanceSpace restrict(const DistanceSpace& s, const PointSet& deleted) {
  for (PointId p : deleted)
    if (p >= s.size()) throw std::out_of_range("unknown point " + std::to_string(p));
  const PointSet keep = set_minus(s.points(), make_point_set(deleted));
  return induced(s, keep);
}

inline DistanceSpace apply_modifications(const DistanceSpace& s, const Modifications& mods) {
  std::vector<double> flat = s.flat();
  const std::size_t n = s.size();
  for (const auto& [pair, value] : mods) {
    if (pair.a == pair.b) throw std::invalid_argument("modification of a diagonal entry");
    if (pair.b >= n) throw std::out_of_range("unknown point in modification");
    if (!(value >= 0.0)) throw std::invalid_argument("negative replacement distance");
    flat[pair.a * n + pair.b] = value;
    flat[pair.b * n + pair.a] = value;
  }
  return DistanceSpace(n, std::move(flat), s.labels());
}

// ---------------------------------------------------------------------------
// weights and instances

// Symmetric per-pair weights, default 1.
class PairWeights {
 public:
  PairWeights() = default;
  explicit PairWeights(std::size_t n, Weight fill = 1) : n_(n), w_(n * n, fill) {}

  Weight operator()(PointId i, PointId j) const { return w_[i * n_ + j]; }
  Weight operator()(const Pair& p) const { return (*this)(p.a, p.b); }
  void set(PointId i, PointId j, Weight w) {
    w_[i * n_ + j] = w;
    w_[j * n_ + i] = w;
  }
  std::size_t size() const { return n_; }

  bool operator==(const PairWeights&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<Weight> w_;
};

struct WeightedInstance {
  DistanceSpace space;
  int d = 1;
  int k_out = 0;
  int k_mod = 0;
  Weight W = 0;
  std::vector<Weight> w_out;
  PairWeights w_mod;

  std::size_t size() const { return space.size(); }

  // Unit weights; W defaults to the total weight (no budget constraint).
  static WeightedInstance unit(DistanceSpace s, int d, int k_out, int k_mod,
                               std::optional<Weight> W = std::nullopt) {
    WeightedInstance inst;
    const std::size_t n = s.size();
    inst.space = std::move(s);
    inst.d = d;
    inst.k_out = k_out;
    inst.k_mod = k_mod;
    inst.w_out.assign(n, 1);
    inst.w_mod = PairWeights(n, 1);
    inst.W = W ? *W : inst.total_weight();
    return inst;
  }

  Weight total_weight() const {
    Weight t = 0;
    for (Weight w : w_out) t += w;
    for (PointId i = 0; i < size(); ++i)
      for (PointId j = i + 1; j < size(); ++j) t += w_mod(i, j);
    return t;
  }

  bool unit_weights() const {
    for (Weight w : w_out)
      if (w != 1) return false;
    for (PointId i = 0; i < size(); ++i)
      for (PointId j = i + 1; j < size(); ++j)
        if (w_mod(i, j) != 1) return false;
    return true;
  }

  void check() const {
    if (d < 1) throw std::invalid_argument("target dimension must be >= 1");
    if (k_out < 0 || k_mod < 0 || W < 0) throw std::invalid_argument("budgets must be nonnegative");
    if (w_out.size() != size()) throw std::invalid_argument("w_out needs one entry per point");
    if (w_mod.size() != size()) throw std::invalid_argument("w_mod must cover every pair");
    for (Weight w : w_out)
      if (w < 0) throw std::invalid_argument("negative point weight");
    for (PointId i = 0; i < size(); ++i)
      for (PointId j = i + 1; j < size(); ++j)
        if (w_mod(i, j) < 0) throw std::invalid_argument("negative pair weight");
    if (auto v = validate(space)) throw std::invalid_argument("invalid distance space: " + v->message());
  }

  bool operator==(const WeightedInstance&) const = default;
};

// Sub-instance on `keep` (sorted original indices); weights follow the points.
inline WeightedInstance induced_instance(const WeightedInstance& inst, const PointSet& keep) {
  WeightedInstance out;
  out.space = induced(inst.space, keep);
  out.d = inst.d;
  out.k_out = inst.k_out;
  out.k_mod = inst.k_mod;
  out.W = inst.W;
  out.w_out.reserve(keep.size());
  for (PointId p : keep) out.w_out.push_back(inst.w_out.at(p));
  out.w_mod = PairWeights(keep.size());
  for (std::size_t x = 0; x < keep.size(); ++x)
    for (std::size_t y = x + 1; y < keep.size(); ++y) out.w_mod.set(x, y, inst.w_mod(keep[x], keep[y]));
  return out;
}

// ---------------------------------------------------------------------------
// realizations and solutions

struct Realization {
  int dim = 0;
  std::map<PointId, std::vector<double>> coords;

  double sqdist(PointId i, PointId j) const {
    const auto& p = coords.at(i);
    const auto& q = coords.at(j);
    double s = 0.0;
    for (std::size_t t = 0; t < p.size(); ++t) s += (p[t] - q[t]) * (p[t] - q[t]);
    return s;
  }
};

struct Solution {
  PointSet outliers;
  Modifications modifications;
  std::optional<Realization> realization;
  Weight cost = 0;
};

inline Weight solution_cost(const WeightedInstance& inst, const Solution& sol) {
  Weight c = 0;
  for (PointId p : sol.outliers) c += inst.w_out.at(p);
  for (const auto& [pair, value] : sol.modifications) {
    if (pair.b >= inst.size()) throw std::out_of_range("unknown point in modification");
    c += inst.w_mod(pair);
  }
  return c;
}

// Space with the solution's modifications applied; outliers are not removed.
inline DistanceSpace repaired_space(const DistanceSpace& s, const Solution& sol) {
  return apply_modifications(s, sol.modifications);
}

// Largest |realized - expected| squared distance over the realized pairs,
// divided by the largest expected squared distance (absolute if all are 0).
inline double max_relative_error(const DistanceSpace& s, const Realization& r) {
  double worst = 0.0;
  double scale = 0.0;
  std::vector<PointId> ids;
  for (const auto& [p, c] : r.coords) ids.push_back(p);
  for (std::size_t x = 0; x < ids.size(); ++x)
    for (std::size_t y = x + 1; y < ids.size(); ++y) {
      const double expected = s(ids[x], ids[y]);
      scale = std::max(scale, expected);
      worst = std::max(worst, std::fabs(r.sqdist(ids[x], ids[y]) - expected));
    }
  return scale > 0.0 ? worst / scale : worst;
}

}  // namespace edmrepair
