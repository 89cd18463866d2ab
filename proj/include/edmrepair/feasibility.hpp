#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <tuple>
#include <stdexcept>
#include <vector>

#include "core.hpp"
#include "geometry.hpp"
#include "parallel.hpp"

namespace edmrepair {

struct PartialRealizationProblem {
  DistanceSpace space;
  std::vector<Pair> free_pairs;
  int dim = 1;
  int restarts = 20;
  int max_iters = 500;
  double residual_tol = 1e-7;
  std::uint64_t seed = 0;
  Config cfg;
  std::size_t node_cap = 200000;  // trilateration search budget
};

struct FreePairWitness {
  Realization realization;
  Modifications free_values;  // realized squared distances of the free pairs
};

enum class FeasibilityRoute { trivial, direct, trilateration, numeric };

struct FeasibilityOutcome {
  std::optional<FreePairWitness> witness;
  FeasibilityRoute route = FeasibilityRoute::trivial;
  bool certified_infeasible = false;  // infeasible by an exact argument, not by search exhaustion
};

// Predicate "kept points embed in R^dim", swappable for a memoized version.
using EmbedPredicate = std::function<bool(const PointSet& kept)>;

namespace detail {

inline std::vector<Pair> normalized_pairs(const std::vector<Pair>& in, std::size_t n) {
  std::vector<Pair> out;
  for (const Pair& p : in) {
    if (p.a == p.b) throw std::invalid_argument("free pair on the diagonal");
    if (p.b >= n) throw std::out_of_range("free pair out of range");
    out.emplace_back(p.a, p.b);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

class FreeMask {
 public:
  FreeMask(std::size_t n, const std::vector<Pair>& pairs) : n_(n), m_(n * n, 0) {
    for (const Pair& p : pairs) m_[p.a * n + p.b] = m_[p.b * n + p.a] = 1;
  }
  bool operator()(PointId i, PointId j) const { return m_[i * n_ + j] != 0; }

 private:
  std::size_t n_;
  std::vector<char> m_;
};

inline Modifications realized_values(const Realization& r, const std::vector<Pair>& pairs) {
  Modifications out;
  for (const Pair& p : pairs) out[p] = r.sqdist(p.a, p.b);
  return out;
}

// Every subset of endpoints containing no free pair lies in some maximal one;
// each maximal one together with the non-endpoints must embed.
inline bool free_pair_precheck(std::size_t n, const std::vector<Pair>& pairs, const EmbedPredicate& embeds) {
  PointSet ends;
  for (const Pair& p : pairs) {
    ends.push_back(p.a);
    ends.push_back(p.b);
  }
  ends = make_point_set(ends);
  if (ends.size() > 16) return true;
  const std::size_t e = ends.size();
  auto local = [&](PointId p) { return static_cast<std::size_t>(std::lower_bound(ends.begin(), ends.end(), p) - ends.begin()); };
  std::vector<std::uint32_t> conflict(e, 0);
  for (const Pair& p : pairs) {
    conflict[local(p.a)] |= 1u << local(p.b);
    conflict[local(p.b)] |= 1u << local(p.a);
  }
  const PointSet core = set_minus(iota_points(n), ends);
  for (std::uint32_t mask = 0; mask < (1u << e); ++mask) {
    bool independent = true;
    for (std::size_t i = 0; i < e && independent; ++i)
      if ((mask >> i & 1u) && (conflict[i] & mask)) independent = false;
    if (!independent) continue;
    bool maximal = true;
    for (std::size_t i = 0; i < e && maximal; ++i)
      if (!(mask >> i & 1u) && !(conflict[i] & mask)) maximal = false;
    if (!maximal) continue;
    PointSet kept = core;
    for (std::size_t i = 0; i < e; ++i)
      if (mask >> i & 1u) kept.push_back(ends[i]);
    if (!embeds(make_point_set(kept))) return false;
  }
  return true;
}

// Incremental trilateration over reflection choices on normalized distances.
class Trilateration {
 public:
  enum class Status { found, infeasible, unknown };

  Trilateration(const std::vector<double>& d, std::size_t n, const FreeMask& free, int dim, double tol_sign,
                double tol_dist, std::size_t node_cap)
      : d_(d), n_(n), free_(free), dim_(dim), tol_sign_(tol_sign), tol_dist_(tol_dist), cap_(node_cap) {}

  Status run(std::vector<std::vector<double>>& coords) {
    coords.assign(n_, std::vector<double>(static_cast<std::size_t>(dim_), 0.0));
    placed_.assign(n_, 0);
    std::vector<char> seen(n_, 0);
    for (PointId root = 0; root < n_; ++root) {
      if (seen[root]) continue;
      std::vector<PointId> comp;
      std::vector<PointId> stack{root};
      seen[root] = 1;
      while (!stack.empty()) {
        PointId u = stack.back();
        stack.pop_back();
        comp.push_back(u);
        for (PointId v = 0; v < n_; ++v)
          if (!seen[v] && v != u && !free_(u, v)) {
            seen[v] = 1;
            stack.push_back(v);
          }
      }
      std::sort(comp.begin(), comp.end());
      comp_ = comp;
      order_.clear();
      coords_ = &coords;
      placed_[comp.front()] = 1;
      order_.push_back(comp.front());
      hit_unknown_ = false;
      if (!search(0)) return hit_unknown_ ? Status::unknown : Status::infeasible;
    }
    return Status::found;
  }

 private:
  double D(PointId i, PointId j) const { return d_[i * n_ + j]; }

  static double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) s += a[t] * b[t];
    return s;
  }

  // Orthonormal basis of span{p - p0 : p in pts} by Gram-Schmidt.
  std::vector<std::vector<double>> span_basis(const std::vector<PointId>& pts) const {
    std::vector<std::vector<double>> basis;
    const auto& C = *coords_;
    for (std::size_t k = 1; k < pts.size(); ++k) {
      std::vector<double> v(static_cast<std::size_t>(dim_));
      for (int t = 0; t < dim_; ++t) v[t] = C[pts[k]][t] - C[pts[0]][t];
      for (const auto& e : basis) {
        const double c = dot(v, e);
        for (int t = 0; t < dim_; ++t) v[t] -= c * e[t];
      }
      const double nv = std::sqrt(dot(v, v));
      if (nv > std::sqrt(tol_sign_)) {
        for (double& x : v) x /= nv;
        basis.push_back(std::move(v));
      }
    }
    return basis;
  }

  std::vector<PointId> constraints(PointId x) const {
    std::vector<PointId> N;
    for (PointId p : order_)
      if (!free_(x, p)) N.push_back(p);
    return N;
  }

  bool constrains_future(PointId x) const {
    for (PointId v : comp_)
      if (!placed_[v] && v != x && !free_(x, v)) return true;
    return false;
  }

  // Axes spanned so far: placed points live in the first `hull_` coordinates.
  bool search(int hull) {
    if (++nodes_ > cap_) {
      hit_unknown_ = true;
      return false;
    }
    // most determined point first: widest constraint span, then no free
    // pair to a placed point, then most constraints
    PointId best = n_;
    std::tuple<std::size_t, bool, std::size_t> best_key{};
    for (PointId v : comp_) {
      if (placed_[v]) continue;
      std::vector<PointId> N = constraints(v);
      if (N.empty()) continue;
      const std::tuple<std::size_t, bool, std::size_t> key{span_basis(N).size(), N.size() == order_.size(), N.size()};
      if (best == n_ || key > best_key) {
        best = v;
        best_key = key;
      }
    }
    if (best == n_) return true;  // component fully placed
    const PointId x = best;
    const std::vector<PointId> N = constraints(x);
    const auto E = span_basis(N);
    auto& C = *coords_;
    const std::vector<double>& p0 = C[N[0]];
    const std::size_t m = E.size();

    // projection coefficients in the basis E
    std::vector<double> c(m, 0.0);
    if (m > 0) {
      Eigen::MatrixXd A(static_cast<Eigen::Index>(N.size() - 1), static_cast<Eigen::Index>(m));
      Eigen::VectorXd b(static_cast<Eigen::Index>(N.size() - 1));
      for (std::size_t k = 1; k < N.size(); ++k) {
        std::vector<double> diff(static_cast<std::size_t>(dim_));
        for (int t = 0; t < dim_; ++t) diff[t] = C[N[k]][t] - p0[t];
        for (std::size_t q = 0; q < m; ++q) A(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(q)) = dot(diff, E[q]);
        b(static_cast<Eigen::Index>(k - 1)) = 0.5 * (D(x, N[0]) - D(x, N[k]) + dot(diff, diff));
      }
      Eigen::VectorXd sol = A.colPivHouseholderQr().solve(b);
      for (std::size_t q = 0; q < m; ++q) c[q] = sol(static_cast<Eigen::Index>(q));
    }
    std::vector<double> base = p0;
    double cc = 0.0;
    for (std::size_t q = 0; q < m; ++q) {
      cc += c[q] * c[q];
      for (int t = 0; t < dim_; ++t) base[t] += c[q] * E[q][t];
    }
    const double s2 = D(x, N[0]) - cc;

    std::vector<std::pair<std::vector<double>, int>> candidates;  // position, new hull
    if (s2 < -tol_sign_) return false;
    if (s2 <= tol_sign_) {
      candidates.emplace_back(base, hull);
    } else {
      const double s = std::sqrt(s2);
      // orthonormal directions of the hull axes orthogonal to E
      std::vector<std::vector<double>> V;
      for (int a = 0; a < hull; ++a) {
        std::vector<double> v(static_cast<std::size_t>(dim_), 0.0);
        v[a] = 1.0;
        for (const auto& e : E) {
          const double cf = dot(v, e);
          for (int t = 0; t < dim_; ++t) v[t] -= cf * e[t];
        }
        for (const auto& w : V) {
          const double cf = dot(v, w);
          for (int t = 0; t < dim_; ++t) v[t] -= cf * w[t];
        }
        const double nv = std::sqrt(dot(v, v));
        if (nv > 1e-9) {
          for (double& z : v) z /= nv;
          V.push_back(std::move(v));
        }
      }
      const int spare = dim_ - hull;
      if (V.empty() && spare == 0) return false;
      if (V.empty()) {
        auto q = base;
        q[static_cast<std::size_t>(hull)] += s;
        candidates.emplace_back(q, hull + 1);
      } else if (V.size() == 1 && spare == 0) {
        for (double sg : {1.0, -1.0}) {
          auto q = base;
          for (int t = 0; t < dim_; ++t) q[t] += sg * s * V[0][t];
          candidates.emplace_back(q, hull);
        }
      } else if (!constrains_future(x)) {
        auto q = base;
        for (int t = 0; t < dim_; ++t) q[t] += s * V[0][t];
        candidates.emplace_back(q, hull);
      } else {
        hit_unknown_ = true;
        return false;
      }
    }

    for (auto& [pos, new_hull] : candidates) {
      bool ok = true;
      for (PointId p : N) {
        double dd = 0.0;
        for (int t = 0; t < dim_; ++t) dd += (pos[t] - C[p][t]) * (pos[t] - C[p][t]);
        if (std::fabs(dd - D(x, p)) > tol_dist_) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      C[x] = pos;
      placed_[x] = 1;
      order_.push_back(x);
      if (search(new_hull)) return true;
      order_.pop_back();
      placed_[x] = 0;
      if (nodes_ > cap_) return false;
    }
    return false;
  }

  const std::vector<double>& d_;
  std::size_t n_;
  const FreeMask& free_;
  int dim_;
  double tol_sign_;
  double tol_dist_;
  std::size_t cap_;
  std::size_t nodes_ = 0;
  bool hit_unknown_ = false;
  std::vector<char> placed_;
  std::vector<PointId> comp_;
  std::vector<PointId> order_;
  std::vector<std::vector<double>>* coords_ = nullptr;
};

// Levenberg-Marquardt on the non-free squared-distance residuals.
inline std::optional<std::vector<std::vector<double>>> numeric_search(const std::vector<double>& d, std::size_t n,
                                                                      const std::vector<Pair>& fixed, int dim,
                                                                      const std::vector<std::vector<double>>& start,
                                                                      int max_iters, double residual_tol) {
  const Eigen::Index nv = static_cast<Eigen::Index>(n) * dim;
  const Eigen::Index nr = static_cast<Eigen::Index>(fixed.size());
  Eigen::VectorXd x(nv);
  for (std::size_t i = 0; i < n; ++i)
    for (int t = 0; t < dim; ++t) x(static_cast<Eigen::Index>(i) * dim + t) = start[i][static_cast<std::size_t>(t)];

  auto residuals = [&](const Eigen::VectorXd& v, Eigen::VectorXd& r) {
    r.resize(nr);
    for (Eigen::Index k = 0; k < nr; ++k) {
      const Pair& p = fixed[static_cast<std::size_t>(k)];
      double s = 0.0;
      for (int t = 0; t < dim; ++t) {
        const double df = v(static_cast<Eigen::Index>(p.a) * dim + t) - v(static_cast<Eigen::Index>(p.b) * dim + t);
        s += df * df;
      }
      r(k) = s - d[p.a * n + p.b];
    }
  };

  Eigen::VectorXd r;
  residuals(x, r);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  Eigen::MatrixXd J(nr, nv);
  for (int it = 0; it < max_iters; ++it) {
    if (r.size() == 0 || r.cwiseAbs().maxCoeff() <= residual_tol * 1e-3) break;
    J.setZero();
    for (Eigen::Index k = 0; k < nr; ++k) {
      const Pair& p = fixed[static_cast<std::size_t>(k)];
      for (int t = 0; t < dim; ++t) {
        const double df = x(static_cast<Eigen::Index>(p.a) * dim + t) - x(static_cast<Eigen::Index>(p.b) * dim + t);
        J(k, static_cast<Eigen::Index>(p.a) * dim + t) = 2.0 * df;
        J(k, static_cast<Eigen::Index>(p.b) * dim + t) = -2.0 * df;
      }
    }
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    bool improved = false;
    for (int tries = 0; tries < 12; ++tries) {
      Eigen::MatrixXd H = JtJ;
      for (Eigen::Index q = 0; q < nv; ++q) H(q, q) += lambda * (1.0 + JtJ(q, q));
      const Eigen::VectorXd step = H.ldlt().solve(-g);
      const Eigen::VectorXd cand = x + step;
      Eigen::VectorXd rc;
      residuals(cand, rc);
      const double cc = rc.squaredNorm();
      if (cc < cost) {
        x = cand;
        r = rc;
        cost = cc;
        lambda = std::max(lambda * 0.3, 1e-12);
        improved = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) break;
  }
  if (r.size() > 0 && r.cwiseAbs().maxCoeff() > residual_tol) return std::nullopt;
  std::vector<std::vector<double>> out(n, std::vector<double>(static_cast<std::size_t>(dim)));
  for (std::size_t i = 0; i < n; ++i)
    for (int t = 0; t < dim; ++t) out[i][static_cast<std::size_t>(t)] = x(static_cast<Eigen::Index>(i) * dim + t);
  return out;
}

}  // namespace detail

// Checks a witness: (a) non-free pairs reproduced, (b) on the repaired values
// the CM sign atoms hold along a greedy basis and the determinants extending
// the basis by one or two points vanish, (c) free values are nonnegative.
inline bool verify_witness(const DistanceSpace& s, const std::vector<Pair>& free_pairs, int r,
                           const Realization& real, const Config& cfg = {}) {
  const std::size_t n = s.size();
  if (real.dim > r || real.dim < 0) return false;
  if (real.coords.size() != n) return false;
  for (const auto& [p, c] : real.coords)
    if (p >= n || c.size() != static_cast<std::size_t>(real.dim)) return false;
  const std::vector<Pair> pairs = detail::normalized_pairs(free_pairs, n);
  const detail::FreeMask free(n, pairs);
  const double mx = s.max_sqdist();
  const double unit = mx > 0.0 ? mx : 1.0;
  for (PointId i = 0; i < n; ++i)
    for (PointId j = i + 1; j < n; ++j)
      if (!free(i, j) && std::fabs(real.sqdist(i, j) - s(i, j)) > cfg.tol.eps_dist * unit) return false;

  Modifications values = detail::realized_values(real, pairs);
  for (const auto& [p, v] : values)
    if (!(v >= 0.0)) return false;

  // repaired and normalized copy
  DistanceSpace rep = apply_modifications(s, values);
  const double rmx = std::max(rep.max_sqdist(), 0.0);
  std::vector<double> flat = rep.flat();
  if (rmx > 0.0)
    for (double& v : flat) v /= rmx;
  DistanceSpace norm(n, std::move(flat));
  if (n <= 1) return true;

  Config fcfg = cfg;
  fcfg.backend = Backend::floating;
  EmbeddingReport er = analyze(norm, norm.points(), fcfg);
  if (!er.embeddable || er.dimension > r) return false;
  const PointSet& B = er.basis;
  const double eps = cfg.tol.eps_dist;
  const double sign_eps = cfg.tol.eps_sign;
  std::vector<PointId> prefix{B[0]};
  double prev = -1.0;  // CM of a single point
  for (std::size_t j = 1; j < B.size(); ++j) {
    prefix.push_back(B[j]);
    const double cm = cm_det_with_overrides(norm, prefix, {});
    const double sign = (j % 2 == 1) ? 1.0 : -1.0;  // (-1)^(j+1)
    if (!(sign * cm > 0.0)) return false;
    if (-cm / (2.0 * prev) <= sign_eps) return false;  // squared height over the previous prefix
    prev = cm;
  }
  const PointSet rest = set_minus(norm.points(), B);
  std::vector<PointId> base(B.begin(), B.end());
  for (PointId x : rest) {
    auto bx = base;
    bx.push_back(x);
    const double cm = cm_det_with_overrides(norm, bx, {});
    if (std::fabs(cm / (2.0 * prev)) > eps) return false;
  }
  for (std::size_t a = 0; a < rest.size(); ++a)
    for (std::size_t b = a + 1; b < rest.size(); ++b) {
      auto bxy = base;
      bxy.push_back(rest[a]);
      bxy.push_back(rest[b]);
      const double cm = cm_det_with_overrides(norm, bxy, {});
      if (std::fabs(cm / (4.0 * prev)) > eps * eps) return false;
    }
  return true;
}

inline FeasibilityOutcome feasible_with_free_pairs_detailed(const PartialRealizationProblem& prob,
                                                            const EmbedPredicate& embeds_in = {}) {
  const DistanceSpace& s = prob.space;
  const std::size_t n = s.size();
  const int dim = prob.dim;
  if (dim < 0) throw std::invalid_argument("dimension must be nonnegative");
  const std::vector<Pair> pairs = detail::normalized_pairs(prob.free_pairs, n);
  const detail::FreeMask free(n, pairs);
  FeasibilityOutcome out;

  auto finish = [&](Realization real, FeasibilityRoute route) {
    if (!verify_witness(s, pairs, dim, real, prob.cfg)) return false;
    out.witness = FreePairWitness{real, detail::realized_values(real, pairs)};
    out.route = route;
    return true;
  };

  if (n == 0) {
    out.witness = FreePairWitness{Realization{dim, {}}, {}};
    return out;
  }
  const double mx = s.max_sqdist();
  const double unit = mx > 0.0 ? mx : 1.0;

  if (dim == 0) {
    for (PointId i = 0; i < n; ++i)
      for (PointId j = i + 1; j < n; ++j)
        if (!free(i, j) && s(i, j) > prob.cfg.tol.eps_dist * unit) {
          out.certified_infeasible = true;
          return out;
        }
    Realization real{0, {}};
    for (PointId i = 0; i < n; ++i) real.coords[i] = {};
    finish(std::move(real), FeasibilityRoute::trivial);
    return out;
  }

  EmbedPredicate embeds = embeds_in;
  if (!embeds) embeds = [&](const PointSet& kept) { return is_embeddable(s, kept, dim, prob.cfg); };

  if (pairs.empty()) {
    if (!embeds(s.points())) {
      out.certified_infeasible = true;
      return out;
    }
    if (auto real = realize(s, s.points(), dim, prob.cfg)) finish(std::move(*real), FeasibilityRoute::direct);
    return out;
  }

  if (!detail::free_pair_precheck(n, pairs, embeds)) {
    out.certified_infeasible = true;
    return out;
  }

  std::vector<double> dn = s.flat();
  for (double& v : dn) v /= unit;
  const double back = std::sqrt(unit);
  auto to_realization = [&](const std::vector<std::vector<double>>& c) {
    Realization real{dim, {}};
    for (PointId i = 0; i < n; ++i) {
      std::vector<double> q = c[i];
      for (double& v : q) v *= back;
      real.coords[i] = std::move(q);
    }
    return real;
  };

  std::vector<std::vector<double>> coords;
  detail::Trilateration tri(dn, n, free, dim, prob.cfg.tol.eps_sign, prob.cfg.tol.eps_dist * 0.1, prob.node_cap);
  const auto status = tri.run(coords);
  if (status == detail::Trilateration::Status::found) {
    if (finish(to_realization(coords), FeasibilityRoute::trilateration)) return out;
  } else if (status == detail::Trilateration::Status::infeasible) {
    out.certified_infeasible = true;
    return out;
  }

  // numeric fallback
  std::vector<Pair> fixed;
  for (PointId i = 0; i < n; ++i)
    for (PointId j = i + 1; j < n; ++j)
      if (!free(i, j)) fixed.emplace_back(i, j);
  PointSet ends;
  for (const Pair& p : pairs) {
    ends.push_back(p.a);
    ends.push_back(p.b);
  }
  const PointSet core = set_minus(s.points(), make_point_set(ends));
  for (int k = 0; k < std::max(prob.restarts, 1); ++k) {
    std::mt19937_64 rng(derive_seed(prob.seed, static_cast<std::uint64_t>(k)));
    std::uniform_real_distribution<double> box(-1.0, 1.0);
    std::vector<std::vector<double>> start(n, std::vector<double>(static_cast<std::size_t>(dim)));
    for (auto& q : start)
      for (double& v : q) v = box(rng);
    if (k == 0) {
      // warm start: realization of the points that carry no free pair
      DistanceSpace core_space = induced(DistanceSpace(n, dn), core);
      Config fcfg = prob.cfg;
      fcfg.backend = Backend::floating;
      if (auto real = realize(core_space, core_space.points(), dim, fcfg))
        for (std::size_t i = 0; i < core.size(); ++i) start[core[i]] = real->coords.at(i);
    }
    auto sol = detail::numeric_search(dn, n, fixed, dim, start, prob.max_iters, prob.residual_tol);
    if (sol && finish(to_realization(*sol), FeasibilityRoute::numeric)) return out;
  }
  return out;
}

inline std::optional<FreePairWitness> feasible_with_free_pairs(const PartialRealizationProblem& prob,
                                                               const EmbedPredicate& embeds = {}) {
  return feasible_with_free_pairs_detailed(prob, embeds).witness;
}

}  // namespace edmrepair
