#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "approx.hpp"
#include "core.hpp"
#include "feasibility.hpp"
#include "geometry.hpp"

namespace edmrepair {

// ---------------------------------------------------------------------------
// verification

struct VerifyReport {
  bool ok = true;
  std::string reason;

  explicit operator bool() const { return ok; }
  static VerifyReport fail(std::string why) { return {false, std::move(why)}; }
};

inline VerifyReport verify_solution(const WeightedInstance& inst, const Solution& sol, const Config& cfg = {}) {
  const std::size_t n = inst.size();
  for (PointId p : sol.outliers)
    if (p >= n) return VerifyReport::fail("outlier index out of range");
  if (!std::is_sorted(sol.outliers.begin(), sol.outliers.end()) ||
      std::adjacent_find(sol.outliers.begin(), sol.outliers.end()) != sol.outliers.end())
    return VerifyReport::fail("outliers must be sorted and distinct");
  if (static_cast<int>(sol.outliers.size()) > inst.k_out) return VerifyReport::fail("too many outliers");
  if (static_cast<int>(sol.modifications.size()) > inst.k_mod) return VerifyReport::fail("too many modifications");
  for (const auto& [p, v] : sol.modifications) {
    if (p.a == p.b || p.b >= n) return VerifyReport::fail("invalid modified pair");
    if (!(v >= 0.0)) return VerifyReport::fail("negative modified distance");
    if (contains(sol.outliers, p.a) || contains(sol.outliers, p.b))
      return VerifyReport::fail("modified pair touches an outlier");
  }
  const Weight cost = solution_cost(inst, sol);
  if (cost != sol.cost) return VerifyReport::fail("recorded cost does not match weights");
  if (cost > inst.W) return VerifyReport::fail("cost exceeds budget");

  DistanceSpace repaired = apply_modifications(inst.space, sol.modifications);
  const PointSet survivors = set_minus(inst.space.points(), sol.outliers);
  Config fcfg = cfg;
  fcfg.backend = Backend::floating;
  if (sol.realization) {
    const Realization& r = *sol.realization;
    if (r.dim > inst.d) return VerifyReport::fail("realization has too many coordinates");
    if (r.coords.size() != survivors.size()) return VerifyReport::fail("realization does not cover the survivors");
    for (PointId p : survivors)
      if (!r.coords.count(p)) return VerifyReport::fail("realization misses a survivor");
    if (max_relative_error(repaired, r) >= cfg.tol.eps_dist) return VerifyReport::fail("realization error too large");
  } else if (!is_embeddable(repaired, survivors, inst.d, fcfg)) {
    return VerifyReport::fail("repaired space does not embed");
  }
  return {};
}

// ---------------------------------------------------------------------------
// outlier-only branching

namespace detail {

struct Candidate {
  PointSet removed;
  Weight cost = 0;
};

inline bool better(const Candidate& a, const Candidate& b) {
  if (a.cost != b.cost) return a.cost < b.cost;
  if (a.removed.size() != b.removed.size()) return a.removed.size() < b.removed.size();
  return a.removed < b.removed;
}

inline void keep_best(std::optional<Candidate>& best, std::optional<Candidate> c) {
  if (c && (!best || better(*c, *best))) best = std::move(c);
}

inline Solution eeo_solution(const WeightedInstance& inst, const Candidate& c, const Config& cfg) {
  Solution sol;
  sol.outliers = c.removed;
  sol.cost = c.cost;
  sol.realization = realize(inst.space, set_minus(inst.space.points(), c.removed), inst.d, cfg);
  return sol;
}

inline void require_outlier_only(const WeightedInstance& inst) {
  inst.check();
  if (inst.k_mod != 0) throw std::invalid_argument("outlier-only solver needs k_mod = 0");
}

}  // namespace detail

struct BranchStats {
  std::size_t nodes = 0;
  // (parent measure, child measure) for every recursive call of alg2_branch
  std::vector<std::pair<int, int>> measure_edges;
};

// Branch over the obstruction set; returns a minimum-cost outlier set.
inline std::optional<Solution> alg1_branch(const WeightedInstance& inst, const Config& cfg = {},
                                           BranchStats* stats = nullptr) {
  detail::require_outlier_only(inst);
  const int d = inst.d;
  std::map<PointSet, std::optional<detail::Candidate>> memo;
  std::function<std::optional<detail::Candidate>(const PointSet&, int, Weight, Weight)> rec;
  rec = [&](const PointSet& removed, int k, Weight W, Weight cost) -> std::optional<detail::Candidate> {
    if (stats) ++stats->nodes;
    if (k < 0 || W < 0) return std::nullopt;
    if (auto it = memo.find(removed); it != memo.end()) return it->second;
    const PointSet alive = set_minus(inst.space.points(), removed);
    std::optional<detail::Candidate> best;
    if (is_embeddable(inst.space, alive, d, cfg)) {
      best = detail::Candidate{removed, cost};
    } else {
      const PointSet obs = *obstruction_set(inst.space, alive, d, cfg);
      for (PointId x : obs)
        detail::keep_best(best, rec(with_point(removed, x), k - 1, W - inst.w_out[x], cost + inst.w_out[x]));
    }
    memo[removed] = best;
    return best;
  };
  auto best = rec({}, inst.k_out, inst.W, 0);
  if (!best) return std::nullopt;
  return detail::eeo_solution(inst, *best, cfg);
}

// Branching with an independent set Z that the solution must avoid.
inline std::optional<Solution> alg2_branch(const WeightedInstance& inst, const PointSet& Z0 = {},
                                           const Config& cfg = {}, BranchStats* stats = nullptr) {
  detail::require_outlier_only(inst);
  const int d = inst.d;
  if (!Z0.empty() && !is_independent(inst.space, make_point_set(Z0), cfg))
    throw std::invalid_argument("Z must be independent");
  std::function<std::optional<detail::Candidate>(const PointSet&, const PointSet&, int, Weight, Weight)> rec;
  auto measure = [&](int k, const PointSet& Z) { return k + d + 1 - static_cast<int>(Z.size()); };
  rec = [&](const PointSet& removed, const PointSet& Z, int k, Weight W,
            Weight cost) -> std::optional<detail::Candidate> {
    if (stats) ++stats->nodes;
    if (k < 0 || W < 0 || static_cast<int>(Z.size()) > d + 1) return std::nullopt;
    const PointSet alive = set_minus(inst.space.points(), removed);
    if (is_embeddable(inst.space, alive, d, cfg)) return detail::Candidate{removed, cost};
    const int zs = static_cast<int>(Z.size());
    const int here = measure(k, Z);
    auto del = [&](PointId z) {
      if (stats) stats->measure_edges.emplace_back(here, measure(k - 1, Z));
      return rec(with_point(removed, z), Z, k - 1, W - inst.w_out[z], cost + inst.w_out[z]);
    };
    const PointSet outside = set_minus(alive, Z);
    // forced deletion
    for (PointId z : outside)
      if (!is_embeddable(inst.space, with_point(Z, z), zs, cfg)) return del(z);
    // z joins the solution or the independent set
    for (PointId z : outside) {
      PointSet Zz = with_point(Z, z);
      if (!is_independent(inst.space, Zz, cfg)) continue;
      std::optional<detail::Candidate> best = del(z);
      if (stats) stats->measure_edges.emplace_back(here, measure(k, Zz));
      detail::keep_best(best, rec(removed, Zz, k, W, cost));
      return best;
    }
    // one of a bad pair (possibly a single point) is deleted
    for (std::size_t i = 0; i < outside.size(); ++i)
      for (std::size_t j = i; j < outside.size(); ++j) {
        PointSet Zxy = with_point(with_point(Z, outside[i]), outside[j]);
        if (is_embeddable(inst.space, Zxy, zs - 1, cfg)) continue;
        std::optional<detail::Candidate> best = del(outside[i]);
        if (j != i) detail::keep_best(best, del(outside[j]));
        return best;
      }
    throw std::logic_error("alg2_branch: no rule applies on a non-embeddable space");
  };
  auto best = rec({}, make_point_set(Z0), inst.k_out, inst.W, 0);
  if (!best) return std::nullopt;
  return detail::eeo_solution(inst, *best, cfg);
}

// alg1_branch when (d+3)^k <= 2^(d+k), alg2_branch otherwise.
inline bool prefers_alg1(int d, int k) {
  return static_cast<double>(k) * std::log2(static_cast<double>(d + 3)) <= static_cast<double>(d + k) + 1e-12;
}

inline std::optional<Solution> solve_eeo(const WeightedInstance& inst, const Config& cfg = {},
                                         BranchStats* stats = nullptr) {
  if (prefers_alg1(inst.d, inst.k_out)) return alg1_branch(inst, cfg, stats);
  return alg2_branch(inst, {}, cfg, stats);
}

// ---------------------------------------------------------------------------
// compression

struct BasisPartition {
  std::vector<PointSet> parts;                           // Y_1..Y_l
  std::map<int, std::vector<std::size_t>> size_classes;  // h -> indices of parts of size h
  int h_star = 0;                                        // 0 when no class reaches the threshold

  std::size_t class_size(int h) const {
    auto it = size_classes.find(h);
    return it == size_classes.end() ? 0 : it->second.size();
  }
};

inline int select_h_star(const BasisPartition& bp, std::size_t threshold) {
  int best = 0;
  for (const auto& [h, idx] : bp.size_classes)
    if (idx.size() >= threshold) best = std::max(best, h);
  return best;
}

inline BasisPartition partition_into_bases(const DistanceSpace& s, const PointSet& Y, int d, const Config& cfg = {},
                                           std::size_t threshold = 0) {
  const PointSet ground = make_point_set(Y);
  if (!is_embeddable(s, ground, d, cfg)) throw std::invalid_argument("partition_into_bases needs a d-embeddable set");
  BasisPartition bp;
  PointSet Z = ground;
  while (!Z.empty()) {
    PointSet part = extend_to_max_independent(s, Z, {Z.front()}, cfg);
    bp.size_classes[static_cast<int>(part.size())].push_back(bp.parts.size());
    Z = set_minus(Z, part);
    bp.parts.push_back(std::move(part));
  }
  if (threshold > 0) bp.h_star = select_h_star(bp, threshold);
  return bp;
}

inline bool is_x_compatible(const DistanceSpace& s, const PointSet& Yi, PointId x, int d, const Config& cfg = {}) {
  return is_embeddable(s, with_point(Yi, x), d, cfg);
}

inline bool is_pair_x_compatible(const DistanceSpace& s, const PointSet& Yi, const PointSet& Yj, PointId x, int d,
                                 const Config& cfg = {}) {
  return is_embeddable(s, with_point(set_union(Yi, Yj), x), d, cfg);
}

struct XEquivalence {
  std::vector<std::size_t> compatible;            // part indices in C_h that are x-compatible
  std::vector<std::vector<std::size_t>> classes;  // partition of `compatible`
  bool consistent = true;                         // pair compatibility was transitive
};

// Classes of x-equivalent sets among the x-compatible members of `members`.
inline XEquivalence x_equivalence_classes(const DistanceSpace& s, const BasisPartition& bp,
                                          const std::vector<std::size_t>& members, PointId x, int d,
                                          const Config& cfg = {}) {
  XEquivalence eq;
  for (std::size_t i : members)
    if (is_x_compatible(s, bp.parts[i], x, d, cfg)) eq.compatible.push_back(i);
  const std::size_t m = eq.compatible.size();
  std::vector<std::vector<char>> rel(m, std::vector<char>(m, 1));
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b)
      rel[a][b] = rel[b][a] = is_pair_x_compatible(s, bp.parts[eq.compatible[a]], bp.parts[eq.compatible[b]], x, d, cfg);
  std::vector<std::size_t> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t v) {
    return parent[v] == v ? v : parent[v] = find(parent[v]);
  };
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b)
      if (rel[a][b]) parent[find(b)] = find(a);
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t a = 0; a < m; ++a) groups[find(a)].push_back(a);
  for (auto& [root, g] : groups) {
    for (std::size_t a : g)
      for (std::size_t b : g)
        if (!rel[a][b]) eq.consistent = false;
    std::vector<std::size_t> cls;
    for (std::size_t a : g) cls.push_back(eq.compatible[a]);
    eq.classes.push_back(std::move(cls));
  }
  std::sort(eq.classes.begin(), eq.classes.end());
  return eq;
}

struct ForcedOutlier {
  PointId point = 0;
  int rule = 0;  // 3 or 4
};

struct CompressionTrace {
  PointSet hitting_set;  // greedy set A of the last round
  std::vector<ForcedOutlier> forced_outliers;
  bool unchanged = false;  // small-instance rule returned the instance as is
  BasisPartition partition;
  std::map<PointId, XEquivalence> equivalence;
  std::map<PointId, std::vector<std::size_t>> large_class;  // R_x
  std::vector<std::size_t> marked;                          // part indices
  bool marking_completed = false;
  PointSet kept;  // X' as original indices
  WeightedInstance reduced;
};

struct CompressResult {
  enum class Kind { reduced, yes, no };
  Kind kind = Kind::reduced;
  CompressionTrace trace;
  std::optional<Solution> solution;  // set when kind == yes
};

inline std::size_t kernel_bound(int k_out, int k_mod, int d) {
  const std::size_t k = static_cast<std::size_t>(std::max(0, k_out + k_mod));
  const std::size_t dd = static_cast<std::size_t>(d + 3);
  return 9 * k * k * dd * dd;
}

inline CompressResult compress(const WeightedInstance& inst, const Config& cfg = {}) {
  inst.check();
  const int d = inst.d;
  const DistanceSpace& s = inst.space;
  CompressResult res;
  CompressionTrace& tr = res.trace;
  PointSet alive = s.points();
  int kO = inst.k_out;
  const int kM = inst.k_mod;
  Weight W = inst.W;

  auto finish_reduced = [&](PointSet kept) {
    tr.kept = kept;
    tr.reduced = induced_instance(inst, kept);
    tr.reduced.k_out = kO;
    tr.reduced.W = W;
    res.kind = CompressResult::Kind::reduced;
  };

  for (;;) {
    if (kO < 0 || W < 0) {
      res.kind = CompressResult::Kind::no;
      return res;
    }
    const int k = kO + kM;
    const PointSet A = greedy_outliers(s, alive, d, cfg);
    tr.hitting_set = A;
    if (A.size() > static_cast<std::size_t>((d + 3) * k)) {
      res.kind = CompressResult::Kind::no;
      return res;
    }
    const PointSet Y = set_minus(alive, A);
    const std::size_t big = static_cast<std::size_t>(kO + 2 * kM);
    if (Y.size() <= 2 * big * static_cast<std::size_t>((d + 1) * (d + 1))) {
      tr.unchanged = true;
      finish_reduced(alive);
      return res;
    }
    if (A.empty()) {
      Solution sol;
      for (const ForcedOutlier& f : tr.forced_outliers) sol.outliers.push_back(f.point);
      sol.outliers = make_point_set(sol.outliers);
      sol.cost = solution_cost(inst, sol);
      sol.realization = realize(s, alive, d, cfg);
      res.kind = CompressResult::Kind::yes;
      res.solution = std::move(sol);
      return res;
    }

    tr.partition = partition_into_bases(s, Y, d, cfg, 2 * big + 1);
    const BasisPartition& bp = tr.partition;
    const int hs = bp.h_star;
    if (hs == 0) throw std::logic_error("compress: no size class reaches the threshold");
    const std::vector<std::size_t>& Chs = bp.size_classes.at(hs);

    auto force = [&](PointId x, int rule) {
      tr.forced_outliers.push_back({x, rule});
      alive = without_point(alive, x);
      kO -= 1;
      W -= inst.w_out[x];
    };

    // Rule 3: no large class of x-equivalent compatible sets
    tr.equivalence.clear();
    tr.large_class.clear();
    bool fired = false;
    for (PointId x : A) {
      XEquivalence eq = x_equivalence_classes(s, bp, Chs, x, d, cfg);
      std::size_t largest = 0;
      for (const auto& c : eq.classes) largest = std::max(largest, c.size());
      if (largest + big + 1 <= Chs.size()) {
        force(x, 3);
        fired = true;
        break;
      }
      const std::vector<std::size_t>* R = nullptr;
      for (const auto& c : eq.classes)
        if (c.size() == largest) {
          R = &c;
          break;
        }
      tr.large_class[x] = *R;
      tr.equivalence[x] = std::move(eq);
    }
    if (fired) continue;

    // Rule 4: too many parts incompatible with the large class
    std::map<PointId, std::vector<std::size_t>> incompatible;
    for (PointId x : A) {
      const std::vector<std::size_t>& R = tr.large_class.at(x);
      std::vector<std::size_t>& bad = incompatible[x];
      for (const auto& [h, idx] : bp.size_classes) {
        if (h > hs) continue;
        for (std::size_t j : idx) {
          if (std::find(R.begin(), R.end(), j) != R.end()) continue;
          for (std::size_t i : R)
            if (!is_pair_x_compatible(s, bp.parts[i], bp.parts[j], x, d, cfg)) {
              bad.push_back(j);
              break;
            }
        }
      }
      if (bad.size() >= static_cast<std::size_t>(kO + kM + 1)) {
        force(x, 4);
        fired = true;
        break;
      }
    }
    if (fired) continue;

    // marking
    std::vector<char> mark(bp.parts.size(), 0);
    for (const auto& [h, idx] : bp.size_classes)
      if (h > hs)
        for (std::size_t i : idx) mark[i] = 1;
    for (PointId x : A) {
      const std::vector<std::size_t>& R = tr.large_class.at(x);
      for (std::size_t t = 0; t < R.size() && t < big + 1; ++t) mark[R[t]] = 1;
      for (std::size_t j : incompatible[x]) mark[j] = 1;
    }
    PointSet kept = A;
    tr.marked.clear();
    for (std::size_t i = 0; i < bp.parts.size(); ++i)
      if (mark[i]) {
        tr.marked.push_back(i);
        kept = set_union(kept, bp.parts[i]);
      }
    tr.marking_completed = true;
    finish_reduced(kept);
    return res;
  }
}

// ---------------------------------------------------------------------------
// weighted outliers and modifications

struct WeeoOptions {
  std::uint64_t seed = 0;
  int restarts = 20;
  bool use_compression = true;
};

namespace detail {

template <class T>
void subsets_upto(const std::vector<T>& items, std::size_t k, std::size_t start, std::vector<T>& cur,
                  std::vector<std::vector<T>>& out) {
  out.push_back(cur);
  if (cur.size() == k) return;
  for (std::size_t i = start; i < items.size(); ++i) {
    cur.push_back(items[i]);
    subsets_upto(items, k, i + 1, cur, out);
    cur.pop_back();
  }
}

struct Guess {
  Weight cost = 0;
  std::size_t zo = 0;  // index into the outlier-guess list
  std::size_t zm = 0;  // index into the pair-guess list
};

class EmbedCache {
 public:
  EmbedCache(const DistanceSpace& s, int d, const Config& cfg) : s_(s), d_(d), cfg_(cfg) {}
  bool operator()(const PointSet& kept) {
    auto it = memo_.find(kept);
    if (it != memo_.end()) return it->second;
    const bool v = is_embeddable(s_, kept, d_, cfg_);
    memo_.emplace(kept, v);
    return v;
  }

 private:
  const DistanceSpace& s_;
  int d_;
  Config cfg_;
  std::map<PointSet, bool> memo_;
};

// Cheapest (outliers, free pairs) on `inst`, enumerated by total cost.
inline std::optional<Solution> guess_and_check(const WeightedInstance& inst, const WeeoOptions& opt, const Config& cfg,
                                               int restarts) {
  const std::size_t n = inst.size();
  const int d = inst.d;
  std::vector<PointId> pts = inst.space.points();
  std::vector<std::vector<PointId>> zo_list;
  {
    std::vector<PointId> cur;
    subsets_upto(pts, static_cast<std::size_t>(std::max(inst.k_out, 0)), 0, cur, zo_list);
  }
  std::vector<Pair> all_pairs;
  for (PointId i = 0; i < n; ++i)
    for (PointId j = i + 1; j < n; ++j) all_pairs.emplace_back(i, j);
  std::vector<std::vector<Pair>> zm_list;
  {
    std::vector<Pair> cur;
    subsets_upto(all_pairs, static_cast<std::size_t>(std::max(inst.k_mod, 0)), 0, cur, zm_list);
  }
  std::vector<Weight> zo_cost(zo_list.size(), 0);
  for (std::size_t i = 0; i < zo_list.size(); ++i)
    for (PointId p : zo_list[i]) zo_cost[i] += inst.w_out[p];
  std::vector<Weight> zm_cost(zm_list.size(), 0);
  for (std::size_t i = 0; i < zm_list.size(); ++i)
    for (const Pair& p : zm_list[i]) zm_cost[i] += inst.w_mod(p);

  // order by (cost, Z_O lexicographic, Z_M lexicographic); lists are already
  // in a fixed enumeration order, so sort indices stably by the key
  std::vector<std::size_t> zo_order(zo_list.size()), zm_order(zm_list.size());
  std::iota(zo_order.begin(), zo_order.end(), 0);
  std::iota(zm_order.begin(), zm_order.end(), 0);
  std::sort(zo_order.begin(), zo_order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(zo_cost[a], zo_list[a]) < std::tie(zo_cost[b], zo_list[b]);
  });
  std::sort(zm_order.begin(), zm_order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(zm_cost[a], zm_list[a]) < std::tie(zm_cost[b], zm_list[b]);
  });
  std::vector<Weight> levels;
  for (std::size_t a : zo_order)
    for (std::size_t b : zm_order)
      if (zo_cost[a] + zm_cost[b] <= inst.W) levels.push_back(zo_cost[a] + zm_cost[b]);
      else break;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  EmbedCache cache(inst.space, d, cfg);
  for (Weight level : levels) {
    for (std::size_t a : zo_order) {
      if (zo_cost[a] > level) break;
      const PointSet ZO = make_point_set(zo_list[a]);
      const PointSet keep = set_minus(pts, ZO);
      for (std::size_t b : zm_order) {
        if (zo_cost[a] + zm_cost[b] > level) break;
        if (zo_cost[a] + zm_cost[b] < level) continue;
        const std::vector<Pair>& ZM = zm_list[b];
        bool touches = false;
        for (const Pair& p : ZM)
          if (contains(ZO, p.a) || contains(ZO, p.b)) touches = true;
        if (touches) continue;

        Solution sol;
        sol.outliers = ZO;
        sol.cost = level;
        if (ZM.empty()) {
          if (!cache(keep)) continue;
          sol.realization = realize(inst.space, keep, d, cfg);
          return sol;
        }
        // problem on the surviving points, local indices
        DistanceSpace sub = induced(inst.space, keep);
        auto local = [&](PointId p) {
          return static_cast<PointId>(std::lower_bound(keep.begin(), keep.end(), p) - keep.begin());
        };
        PartialRealizationProblem prob;
        prob.space = sub;
        for (const Pair& p : ZM) prob.free_pairs.emplace_back(local(p.a), local(p.b));
        prob.dim = d;
        prob.restarts = restarts;
        prob.seed = derive_seed(opt.seed, a, b);
        prob.cfg = cfg;
        EmbedPredicate pred = [&](const PointSet& kept_local) {
          PointSet g;
          for (PointId q : kept_local) g.push_back(keep[q]);
          return cache(g);
        };
        auto w = feasible_with_free_pairs(prob, pred);
        if (!w) continue;
        for (const auto& [p, v] : w->free_values) sol.modifications[Pair(keep[p.a], keep[p.b])] = v;
        Realization real{w->realization.dim, {}};
        for (const auto& [p, c] : w->realization.coords) real.coords[keep[p]] = c;
        sol.realization = std::move(real);
        return sol;
      }
    }
  }
  return std::nullopt;
}

}  // namespace detail

// Re-realize a solution found on a sub-instance over all of its survivors.
inline std::optional<Realization> realize_solution(const WeightedInstance& inst, const Solution& sol,
                                                   const Config& cfg = {}, std::uint64_t seed = 0) {
  Config fcfg = cfg;
  fcfg.backend = Backend::floating;
  const PointSet survivors = set_minus(inst.space.points(), sol.outliers);
  DistanceSpace repaired = apply_modifications(inst.space, sol.modifications);
  if (auto r = realize(repaired, survivors, inst.d, fcfg)) return r;
  if (sol.modifications.empty()) return realize(inst.space, survivors, inst.d, cfg);
  DistanceSpace sub = induced(inst.space, survivors);
  PartialRealizationProblem prob;
  prob.space = sub;
  prob.dim = inst.d;
  prob.seed = seed;
  prob.cfg = fcfg;
  for (const auto& [p, v] : sol.modifications) {
    const auto la = static_cast<PointId>(std::lower_bound(survivors.begin(), survivors.end(), p.a) - survivors.begin());
    const auto lb = static_cast<PointId>(std::lower_bound(survivors.begin(), survivors.end(), p.b) - survivors.begin());
    prob.free_pairs.emplace_back(la, lb);
  }
  auto w = feasible_with_free_pairs(prob);
  if (!w) return std::nullopt;
  Realization real{w->realization.dim, {}};
  for (const auto& [p, c] : w->realization.coords) real.coords[survivors[p]] = c;
  return real;
}

struct WeeoResult {
  std::optional<Solution> solution;
  CompressResult compression;
};

inline WeeoResult solve_weeo_detailed(const WeightedInstance& inst, const WeeoOptions& opt = {},
                                      const Config& cfg = {}) {
  inst.check();
  WeeoResult out;
  if (!opt.use_compression) {
    out.compression.kind = CompressResult::Kind::reduced;
    out.compression.trace.unchanged = true;
    out.compression.trace.kept = inst.space.points();
    out.compression.trace.reduced = inst;
  } else {
    out.compression = compress(inst, cfg);
  }
  const CompressResult& cr = out.compression;
  if (cr.kind == CompressResult::Kind::no) return out;
  if (cr.kind == CompressResult::Kind::yes) {
    out.solution = cr.solution;
    return out;
  }
  const CompressionTrace& tr = cr.trace;
  auto local = detail::guess_and_check(tr.reduced, opt, cfg, opt.restarts);
  if (!local) return out;

  Solution sol;
  for (const ForcedOutlier& f : tr.forced_outliers) sol.outliers.push_back(f.point);
  for (PointId p : local->outliers) sol.outliers.push_back(tr.kept[p]);
  sol.outliers = make_point_set(sol.outliers);
  for (const auto& [p, v] : local->modifications) sol.modifications[Pair(tr.kept[p.a], tr.kept[p.b])] = v;
  sol.cost = solution_cost(inst, sol);
  if (tr.kept.size() == inst.size() && tr.forced_outliers.empty()) {
    sol.realization = local->realization;
  } else {
    sol.realization = realize_solution(inst, sol, cfg, opt.seed);
  }
  out.solution = std::move(sol);
  return out;
}

inline std::optional<Solution> solve_weeo(const WeightedInstance& inst, const WeeoOptions& opt = {},
                                          const Config& cfg = {}) {
  return solve_weeo_detailed(inst, opt, cfg).solution;
}

}  // namespace edmrepair
