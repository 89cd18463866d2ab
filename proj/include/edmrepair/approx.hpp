#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "core.hpp"
#include "geometry.hpp"
#include "parallel.hpp"

namespace edmrepair {

// Set of at most d+3 points of `ground` meeting every inclusion-minimal
// d-outlier set, or nullopt when `ground` is already d-embeddable.
inline std::optional<PointSet> obstruction_set(const DistanceSpace& s, const PointSet& ground, int d,
                                               const Config& cfg = {}) {
  if (d < 0) throw std::invalid_argument("dimension must be nonnegative");
  if (is_embeddable(s, ground, d, cfg)) return std::nullopt;
  PointSet A{ground.front()};
  while (static_cast<int>(A.size()) <= d) {
    const int a = static_cast<int>(A.size());
    for (PointId x : ground) {
      if (contains(A, x)) continue;
      PointSet ax = with_point(A, x);
      if (!is_embeddable(s, ax, a, cfg)) return ax;
    }
    bool grown = false;
    for (PointId x : ground) {
      if (contains(A, x)) continue;
      PointSet ax = with_point(A, x);
      if (is_independent(s, ax, cfg)) {
        A = std::move(ax);
        grown = true;
        break;
      }
    }
    if (!grown) break;
  }
  // x == y is admitted so that a witness exists even when one point remains.
  const int a = static_cast<int>(A.size());
  const PointSet rest = set_minus(ground, A);
  for (std::size_t i = 0; i < rest.size(); ++i)
    for (std::size_t j = i; j < rest.size(); ++j) {
      PointSet axy = with_point(with_point(A, rest[i]), rest[j]);
      if (!is_embeddable(s, axy, a - 1, cfg)) return axy;
    }
  throw std::logic_error("obstruction_set: no witness found on a non-embeddable space");
}

inline std::optional<PointSet> obstruction_set(const DistanceSpace& s, int d, const Config& cfg = {}) {
  return obstruction_set(s, s.points(), d, cfg);
}

// Repeatedly deletes an obstruction set; size at most (d+3) * Opt.
inline PointSet greedy_outliers(const DistanceSpace& s, const PointSet& ground, int d, const Config& cfg = {}) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  PointSet removed;
  PointSet rest = make_point_set(ground);
  while (auto obs = obstruction_set(s, rest, d, cfg)) {
    removed = set_union(removed, *obs);
    rest = set_minus(rest, *obs);
  }
  return removed;
}

inline PointSet greedy_outliers(const DistanceSpace& s, int d, const Config& cfg = {}) {
  return greedy_outliers(s, s.points(), d, cfg);
}

// Both endpoints of a maximal matching grown over the edges in sorted order.
inline PointSet vertex_cover_2approx(const Graph& g) {
  std::vector<char> covered(g.n, 0);
  std::vector<Pair> edges = g.edges;
  std::sort(edges.begin(), edges.end());
  PointSet cover;
  for (const Pair& e : edges) {
    if (covered[e.a] || covered[e.b]) continue;
    covered[e.a] = covered[e.b] = 1;
    cover.push_back(e.a);
    cover.push_back(e.b);
  }
  return make_point_set(std::move(cover));
}

// ---------------------------------------------------------------------------
// randomized 2-approximation

struct SieveState {
  int level = 1;
  PointSet U;
  PointSet C_comp;
  PointSet C_def;
  PointSet C_incomp;
};

struct SieveLevel {
  SieveState sieve;
  std::vector<Pair> comp_edges;  // incompatible pairs inside C_comp
  PointSet Q;                    // 2-approximate cover of comp_edges
  PointSet A;                    // Q + C_incomp + C_def
  bool feasible = false;
};

struct TwoApproxTrace {
  int guess = 1;  // dimension guess d'
  unsigned trial = 0;
  std::uint64_t seed = 0;
  std::vector<SieveLevel> levels;
  std::size_t best_level = 0;  // index into levels
};

struct TwoApproxResult {
  PointSet outliers;
  std::vector<TwoApproxTrace> traces;
  unsigned trials = 0;
};

inline unsigned default_two_approx_trials(int d) { return 1u << static_cast<unsigned>(d + 1); }

namespace detail {

inline bool better_candidate(const PointSet& a, const PointSet& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

// One run of the sieve with guess dp; every candidate is checked against d.
inline TwoApproxTrace sieve_run(const DistanceSpace& s, int d, int dp, std::uint64_t seed, const Config& cfg) {
  TwoApproxTrace tr;
  tr.guess = dp;
  tr.seed = seed;
  std::mt19937_64 rng(seed);
  const PointSet all = s.points();
  PointSet U;
  for (int i = 1; i <= dp + 2; ++i) {
    SieveLevel lv;
    lv.sieve.level = i;
    lv.sieve.U = U;
    for (PointId y : all) {
      if (contains(U, y)) continue;
      PointSet uy = with_point(U, y);
      if (is_embeddable(s, uy, i - 2, cfg))
        lv.sieve.C_comp.push_back(y);
      else if (!is_embeddable(s, uy, dp, cfg))
        lv.sieve.C_def.push_back(y);
      else
        lv.sieve.C_incomp.push_back(y);
    }
    const PointSet& comp = lv.sieve.C_comp;
    for (std::size_t a = 0; a < comp.size(); ++a)
      for (std::size_t b = a + 1; b < comp.size(); ++b) {
        PointSet uxy = with_point(with_point(U, comp[a]), comp[b]);
        if (!is_embeddable(s, uxy, i - 2, cfg)) lv.comp_edges.emplace_back(comp[a], comp[b]);
      }
    lv.Q = vertex_cover_2approx(Graph(s.size(), lv.comp_edges));
    lv.A = set_union(set_union(lv.Q, lv.sieve.C_incomp), lv.sieve.C_def);
    lv.feasible = is_embeddable(s, set_minus(all, lv.A), d, cfg);
    const bool stop = lv.sieve.C_incomp.empty();
    PointSet incomp = lv.sieve.C_incomp;
    tr.levels.push_back(std::move(lv));
    if (stop) break;
    std::uniform_int_distribution<std::size_t> pick(0, incomp.size() - 1);
    U = with_point(U, incomp[pick(rng)]);
  }
  bool have = false;
  for (std::size_t k = 0; k < tr.levels.size(); ++k) {
    if (!tr.levels[k].feasible) continue;
    if (!have || better_candidate(tr.levels[k].A, tr.levels[tr.best_level].A)) {
      tr.best_level = k;
      have = true;
    }
  }
  if (!have) throw std::logic_error("sieve produced no feasible candidate");
  return tr;
}

}  // namespace detail

// Unweighted outlier deletion, size <= 2 Opt with probability >= 1 - 1/e at
// the default trial count. The output is always a verified d-outlier set.
inline TwoApproxResult two_approx_outliers(const DistanceSpace& s, int d, std::uint64_t seed, unsigned trials = 0,
                                           const Config& cfg = {}) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  TwoApproxResult res;
  res.trials = trials == 0 ? default_two_approx_trials(d) : trials;
  if (s.size() == 0 || is_embeddable(s, d, cfg)) return res;
  const std::size_t runs = static_cast<std::size_t>(d) * res.trials;
  res.traces.resize(runs);
  parallel_for(runs, cfg.threads, [&](std::size_t k) {
    const int dp = 1 + static_cast<int>(k / res.trials);
    const unsigned t = static_cast<unsigned>(k % res.trials);
    res.traces[k] = detail::sieve_run(s, d, dp, derive_seed(seed, static_cast<std::uint64_t>(dp), t), cfg);
    res.traces[k].trial = t;
  });
  bool have = false;
  for (const auto& tr : res.traces) {
    const PointSet& cand = tr.levels[tr.best_level].A;
    if (!have || detail::better_candidate(cand, res.outliers)) {
      res.outliers = cand;
      have = true;
    }
  }
  return res;
}

}  // namespace edmrepair
