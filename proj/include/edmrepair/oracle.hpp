#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "core.hpp"
#include "feasibility.hpp"
#include "geometry.hpp"

namespace edmrepair {

struct OracleBudget {
  std::size_t max_points = 12;
  std::size_t max_subsets = 10'000'000;
};

class OracleBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Integer entries are handled exactly; anything else uses the floating backend.
inline bool has_integer_entries(const DistanceSpace& s) {
  for (double v : s.flat())
    if (v != std::floor(v) || std::fabs(v) > 9.0e15) return false;
  return true;
}

inline Config oracle_config(const DistanceSpace& s, const Config& base = {}) {
  Config c = base;
  c.backend = has_integer_entries(s) ? Backend::exact : Backend::floating;
  return c;
}

namespace detail {

inline void check_budget_points(std::size_t n, const OracleBudget& b) {
  if (n > b.max_points)
    throw OracleBudgetExceeded("instance too large for brute force: " + std::to_string(n) + " points");
}

template <class T>
std::vector<std::vector<T>> all_subsets_upto(const std::vector<T>& items, std::size_t k, std::size_t cap) {
  std::vector<std::vector<T>> out;
  std::vector<T> cur;
  // lexicographic DFS
  std::function<void(std::size_t)> go = [&](std::size_t start) {
    if (out.size() >= cap) throw OracleBudgetExceeded("too many subsets for brute force");
    out.push_back(cur);
    if (cur.size() == k) return;
    for (std::size_t i = start; i < items.size(); ++i) {
      cur.push_back(items[i]);
      go(i + 1);
      cur.pop_back();
    }
  };
  go(0);
  return out;
}

}  // namespace detail

// Cheapest outlier set by (cost, size, lexicographic).
inline std::optional<Solution> brute_force_eeo(const WeightedInstance& inst, const OracleBudget& budget = {},
                                               const Config& base = {}) {
  inst.check();
  detail::check_budget_points(inst.size(), budget);
  const Config cfg = oracle_config(inst.space, base);
  const PointSet pts = inst.space.points();
  auto subsets = detail::all_subsets_upto(pts, static_cast<std::size_t>(inst.k_out), budget.max_subsets);
  std::vector<std::pair<Weight, std::size_t>> order;
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    Weight c = 0;
    for (PointId p : subsets[i]) c += inst.w_out[p];
    if (c <= inst.W) order.emplace_back(c, i);
  }
  std::sort(order.begin(), order.end(), [&](const auto& x, const auto& y) {
    return std::make_tuple(x.first, subsets[x.second].size(), subsets[x.second]) <
           std::make_tuple(y.first, subsets[y.second].size(), subsets[y.second]);
  });
  for (const auto& [c, i] : order) {
    const PointSet keep = set_minus(pts, subsets[i]);
    if (!is_embeddable(inst.space, keep, inst.d, cfg)) continue;
    Solution sol;
    sol.outliers = subsets[i];
    sol.cost = c;
    sol.realization = realize(inst.space, keep, inst.d, cfg);
    return sol;
  }
  return std::nullopt;
}

// Cheapest (outliers, modified pairs) combination by (cost, size, lexicographic).
inline std::optional<Solution> brute_force_weeo(const WeightedInstance& inst, const OracleBudget& budget = {},
                                                int restarts = 100, std::uint64_t seed = 0, const Config& base = {}) {
  inst.check();
  detail::check_budget_points(inst.size(), budget);
  const Config cfg = oracle_config(inst.space, base);
  const std::size_t n = inst.size();
  const PointSet pts = inst.space.points();
  std::vector<Pair> pairs;
  for (PointId i = 0; i < n; ++i)
    for (PointId j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  auto zo = detail::all_subsets_upto(pts, static_cast<std::size_t>(inst.k_out), budget.max_subsets);
  auto zm = detail::all_subsets_upto(pairs, static_cast<std::size_t>(inst.k_mod), budget.max_subsets);
  if (static_cast<double>(zo.size()) * static_cast<double>(zm.size()) > static_cast<double>(budget.max_subsets))
    throw OracleBudgetExceeded("too many outlier/pair combinations for brute force");

  std::vector<Weight> co(zo.size(), 0), cm(zm.size(), 0);
  for (std::size_t i = 0; i < zo.size(); ++i)
    for (PointId p : zo[i]) co[i] += inst.w_out[p];
  for (std::size_t j = 0; j < zm.size(); ++j)
    for (const Pair& p : zm[j]) cm[j] += inst.w_mod(p);

  struct Item {
    Weight cost;
    std::size_t size;
    std::uint32_t i, j;
  };
  std::vector<Item> items;
  for (std::size_t i = 0; i < zo.size(); ++i)
    for (std::size_t j = 0; j < zm.size(); ++j) {
      if (co[i] + cm[j] > inst.W) continue;
      bool touches = false;
      for (const Pair& p : zm[j])
        if (contains(zo[i], p.a) || contains(zo[i], p.b)) touches = true;
      if (touches) continue;
      items.push_back({co[i] + cm[j], zo[i].size() + zm[j].size(), static_cast<std::uint32_t>(i),
                       static_cast<std::uint32_t>(j)});
    }
  std::sort(items.begin(), items.end(), [&](const Item& x, const Item& y) {
    if (x.cost != y.cost) return x.cost < y.cost;
    if (x.size != y.size) return x.size < y.size;
    if (zo[x.i] != zo[y.i]) return zo[x.i] < zo[y.i];
    return zm[x.j] < zm[y.j];
  });

  std::map<PointSet, bool> memo;
  auto embeds = [&](const PointSet& keep) {
    auto it = memo.find(keep);
    if (it != memo.end()) return it->second;
    const bool v = is_embeddable(inst.space, keep, inst.d, cfg);
    memo.emplace(keep, v);
    return v;
  };

  for (const Item& it : items) {
    const PointSet keep = set_minus(pts, zo[it.i]);
    const std::vector<Pair>& Z = zm[it.j];
    Solution sol;
    sol.outliers = zo[it.i];
    sol.cost = it.cost;
    if (Z.empty()) {
      if (!embeds(keep)) continue;
      sol.realization = realize(inst.space, keep, inst.d, cfg);
      return sol;
    }
    // dropping one endpoint of every free pair must leave an embeddable set
    PointSet cut = keep;
    for (const Pair& p : Z) cut = without_point(cut, p.a);
    if (!embeds(cut)) continue;

    auto local = [&](PointId p) {
      return static_cast<PointId>(std::lower_bound(keep.begin(), keep.end(), p) - keep.begin());
    };
    PartialRealizationProblem prob;
    prob.space = induced(inst.space, keep);
    for (const Pair& p : Z) prob.free_pairs.emplace_back(local(p.a), local(p.b));
    prob.dim = inst.d;
    prob.restarts = restarts;
    prob.seed = derive_seed(seed, it.i, it.j);
    prob.cfg = cfg;
    EmbedPredicate pred = [&](const PointSet& kept_local) {
      PointSet g;
      for (PointId q : kept_local) g.push_back(keep[q]);
      return embeds(g);
    };
    auto w = feasible_with_free_pairs(prob, pred);
    if (!w) continue;
    for (const auto& [p, v] : w->free_values) sol.modifications[Pair(keep[p.a], keep[p.b])] = v;
    Realization real{w->realization.dim, {}};
    for (const auto& [p, c] : w->realization.coords) real.coords[keep[p]] = c;
    sol.realization = std::move(real);
    return sol;
  }
  return std::nullopt;
}

// Minimum vertex cover by subset enumeration; ties go to the smallest mask.
inline PointSet brute_force_vertex_cover(const Graph& g) {
  if (g.n > 20) throw OracleBudgetExceeded("vertex cover oracle supports at most 20 vertices");
  std::optional<std::uint32_t> best;
  for (std::uint32_t mask = 0; mask < (1u << g.n); ++mask) {
    if (best && __builtin_popcount(mask) >= __builtin_popcount(*best)) continue;
    bool ok = true;
    for (const Pair& e : g.edges)
      if (!(mask >> e.a & 1u) && !(mask >> e.b & 1u)) {
        ok = false;
        break;
      }
    if (ok) best = mask;
  }
  PointSet out;
  for (std::size_t v = 0; v < g.n; ++v)
    if (*best >> v & 1u) out.push_back(v);
  return out;
}

inline std::size_t brute_force_maxcut(const Graph& g) {
  if (g.n > 20) throw OracleBudgetExceeded("max cut oracle supports at most 20 vertices");
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << g.n); ++mask) {
    std::size_t cut = 0;
    for (const Pair& e : g.edges)
      if ((mask >> e.a & 1u) != (mask >> e.b & 1u)) ++cut;
    best = std::max(best, cut);
  }
  return best;
}

// Exact rank of a real matrix given by rows.
inline std::size_t exact_rank(const std::vector<std::vector<double>>& rows) {
  std::vector<std::vector<mpq_class>> a;
  for (const auto& r : rows) {
    std::vector<mpq_class> q;
    for (double v : r) q.emplace_back(v);
    a.push_back(std::move(q));
  }
  const std::size_t m = a.size();
  const std::size_t n = m == 0 ? 0 : a[0].size();
  std::size_t rank = 0;
  for (std::size_t c = 0; c < n && rank < m; ++c) {
    std::size_t piv = rank;
    while (piv < m && a[piv][c] == 0) ++piv;
    if (piv == m) continue;
    std::swap(a[piv], a[rank]);
    for (std::size_t r = rank + 1; r < m; ++r) {
      if (a[r][c] == 0) continue;
      const mpq_class f = a[r][c] / a[rank][c];
      for (std::size_t t = c; t < n; ++t) a[r][t] -= f * a[rank][t];
    }
    ++rank;
  }
  return rank;
}

// Whether deleting at most k columns lowers the rank by at least h.
inline bool brute_force_rank_reduction(const std::vector<std::vector<double>>& rows, std::size_t h, std::size_t k) {
  const std::size_t n = rows.empty() ? 0 : rows[0].size();
  if (n > 20) throw OracleBudgetExceeded("rank oracle supports at most 20 columns");
  const std::size_t r0 = exact_rank(rows);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) > k) continue;
    std::vector<std::vector<double>> sub(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t c = 0; c < n; ++c)
        if (!(mask >> c & 1u)) sub[i].push_back(rows[i][c]);
    if (exact_rank(sub) + h <= r0) return true;
  }
  return false;
}

}  // namespace edmrepair
