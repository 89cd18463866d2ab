#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"
#include "geometry.hpp"
#include "oracle.hpp"

namespace edmrepair {

enum class NoiseKind { random_inconsistent, perturbed };

struct PlantedSpec {
  std::size_t n = 10;
  int d = 2;
  std::size_t k_out_planted = 1;
  std::size_t k_mod_planted = 0;
  int box = 10;
  NoiseKind noise = NoiseKind::random_inconsistent;
  std::uint64_t seed = 0;

  void check() const {
    if (n <= k_out_planted) throw std::invalid_argument("need n > k_out_planted");
    if (d < 1) throw std::invalid_argument("dimension must be >= 1");
    if (box < 1) throw std::invalid_argument("box must be >= 1");
    const std::size_t m = n - k_out_planted;
    if (k_mod_planted > m * (m - 1) / 2) throw std::invalid_argument("too many scrambled pairs");
  }
};

struct PlantedInstance {
  WeightedInstance instance;
  Solution truth;               // planted outliers and the original values of scrambled pairs
  std::vector<std::vector<double>> points;  // coordinates of the survivors
  bool upper_bound_only = true;             // truth cost not confirmed optimal
  int attempts = 0;
};

inline DistanceSpace space_from_points(const std::vector<std::vector<double>>& pts,
                                       std::vector<std::string> labels = {}) {
  const std::size_t n = pts.size();
  std::vector<double> flat(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < pts[i].size(); ++t) s += (pts[i][t] - pts[j][t]) * (pts[i][t] - pts[j][t]);
      flat[i * n + j] = s;
    }
  return DistanceSpace(n, std::move(flat), std::move(labels));
}

namespace detail {

inline PlantedInstance planted_attempt(const PlantedSpec& spec, std::mt19937_64& rng) {
  const std::size_t m = spec.n - spec.k_out_planted;
  const int d = spec.d;
  std::uniform_int_distribution<int> coord(-spec.box, spec.box);
  PlantedInstance out;
  out.points.assign(m, std::vector<double>(static_cast<std::size_t>(d)));
  for (auto& p : out.points)
    for (auto& c : p) c = coord(rng);

  const std::size_t n = spec.n;
  std::vector<double> flat(n * n, 0.0);
  DistanceSpace good = space_from_points(out.points);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) flat[i * n + j] = good(i, j);

  const int far = 4 * spec.box * spec.box * d;
  std::uniform_int_distribution<int> raw(1, far);
  std::uniform_int_distribution<int> jitter(1, spec.box);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t o = m; o < n; ++o) {
    std::vector<double> q(static_cast<std::size_t>(d));
    for (auto& c : q) c = coord(rng);
    for (std::size_t j = 0; j < o; ++j) {
      double v;
      if (spec.noise == NoiseKind::random_inconsistent || j >= m) {
        v = raw(rng);
      } else {
        double s = 0.0;
        for (std::size_t t = 0; t < q.size(); ++t) s += (q[t] - out.points[j][t]) * (q[t] - out.points[j][t]);
        v = s + (coin(rng) ? jitter(rng) : -jitter(rng));
        if (v < 1.0) v = s + jitter(rng);
      }
      flat[o * n + j] = flat[j * n + o] = v;
    }
  }

  // scramble distinct surviving pairs
  std::vector<Pair> pairs;
  for (PointId i = 0; i < m; ++i)
    for (PointId j = i + 1; j < m; ++j) pairs.emplace_back(i, j);
  std::shuffle(pairs.begin(), pairs.end(), rng);
  std::uniform_int_distribution<int> bump(1, far);
  for (std::size_t t = 0; t < spec.k_mod_planted; ++t) {
    const Pair p = pairs[t];
    const double truth = flat[p.a * n + p.b];
    out.truth.modifications[p] = truth;
    const double v = truth + bump(rng);
    flat[p.a * n + p.b] = flat[p.b * n + p.a] = v;
  }

  DistanceSpace space(n, std::move(flat));
  out.instance = WeightedInstance::unit(std::move(space), d, static_cast<int>(spec.k_out_planted),
                                        static_cast<int>(spec.k_mod_planted),
                                        static_cast<Weight>(spec.k_out_planted + spec.k_mod_planted));
  for (std::size_t o = m; o < n; ++o) out.truth.outliers.push_back(o);
  out.truth.cost = solution_cost(out.instance, out.truth);
  return out;
}

// Every planted outlier breaks embeddability of the repaired survivors on its own.
inline bool outliers_required(const PlantedInstance& pi, const Config& cfg) {
  const WeightedInstance& inst = pi.instance;
  DistanceSpace repaired = apply_modifications(inst.space, pi.truth.modifications);
  const PointSet survivors = set_minus(inst.space.points(), pi.truth.outliers);
  for (PointId o : pi.truth.outliers)
    if (is_embeddable(repaired, with_point(survivors, o), inst.d, cfg)) return false;
  return true;
}

}  // namespace detail

// Planted instance with integer coordinates; up to 50 draws until the planted
// outliers are confirmed necessary. Ground truth is exact (not just an upper
// bound) only when brute force confirms its cost on a tiny instance.
inline PlantedInstance planted_instance(const PlantedSpec& spec) {
  spec.check();
  std::mt19937_64 rng(spec.seed);
  Config cfg = Config::exact();
  PlantedInstance last;
  for (int attempt = 1; attempt <= 50; ++attempt) {
    PlantedInstance pi = detail::planted_attempt(spec, rng);
    pi.attempts = attempt;
    if (detail::outliers_required(pi, cfg)) {
      if (spec.n <= 10 && spec.k_mod_planted == 0) {
        auto opt = brute_force_eeo(pi.instance);
        pi.upper_bound_only = !(opt && opt->cost == pi.truth.cost);
        if (!pi.upper_bound_only) return pi;
      } else {
        pi.upper_bound_only = true;
        return pi;
      }
    }
    last = std::move(pi);
  }
  last.upper_bound_only = true;
  return last;
}

inline Graph random_graph(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution edge(p);
  std::vector<Pair> edges;
  for (PointId i = 0; i < n; ++i)
    for (PointId j = i + 1; j < n; ++j)
      if (edge(rng)) edges.emplace_back(i, j);
  return Graph(n, std::move(edges));
}

// Points p_1..p_{k+2} then x_1..x_n; yes iff g has a vertex cover of size <= k.
inline WeightedInstance vc_reduction(const Graph& g, int k) {
  if (k < 0 || static_cast<std::size_t>(k) > g.n) throw std::invalid_argument("need 0 <= k <= n");
  const std::size_t np = static_cast<std::size_t>(k) + 2;
  const std::size_t N = np + g.n;
  std::vector<double> flat(N * N, 0.0);
  std::vector<std::string> labels;
  auto set = [&](std::size_t a, std::size_t b, double rho) { flat[a * N + b] = flat[b * N + a] = rho * rho; };
  for (std::size_t i = 1; i <= np; ++i) labels.push_back("p" + std::to_string(i));
  for (std::size_t j = 1; j <= g.n; ++j) labels.push_back("x" + std::to_string(j));
  for (std::size_t i = 1; i <= np; ++i)
    for (std::size_t j = i + 1; j <= np; ++j) set(i - 1, j - 1, static_cast<double>(j - i));
  for (std::size_t i = 1; i <= np; ++i)
    for (std::size_t j = 1; j <= g.n; ++j) set(i - 1, np + j - 1, static_cast<double>(i + j));
  for (std::size_t i = 1; i <= g.n; ++i)
    for (std::size_t j = i + 1; j <= g.n; ++j)
      set(np + i - 1, np + j - 1, g.has_edge(i - 1, j - 1) ? 0.0 : static_cast<double>(j - i));
  return WeightedInstance::unit(DistanceSpace(N, std::move(flat), std::move(labels)), 1, k, 0);
}

// Points p_0..p_k then x_1..x_n with k = C(n,2) - l; yes iff max cut >= l.
inline WeightedInstance maxcut_reduction(const Graph& g, std::size_t l) {
  const std::size_t pairs = g.n * (g.n - (g.n > 0 ? 1 : 0)) / 2;
  if (l > pairs) throw std::invalid_argument("need l <= C(n,2)");
  const std::size_t k = pairs - l;
  const std::size_t np = k + 1;
  const std::size_t N = np + g.n;
  std::vector<double> flat(N * N, 0.0);
  std::vector<std::string> labels;
  auto set = [&](std::size_t a, std::size_t b, double rho) { flat[a * N + b] = flat[b * N + a] = rho * rho; };
  for (std::size_t i = 0; i < np; ++i) labels.push_back("p" + std::to_string(i));
  for (std::size_t j = 1; j <= g.n; ++j) labels.push_back("x" + std::to_string(j));
  for (std::size_t i = 0; i < np; ++i)
    for (std::size_t j = 0; j < g.n; ++j) set(i, np + j, 1.0);
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = i + 1; j < g.n; ++j) set(np + i, np + j, g.has_edge(i, j) ? 2.0 : 1.0);
  return WeightedInstance::unit(DistanceSpace(N, std::move(flat), std::move(labels)), 1, 0, static_cast<int>(k));
}

// Points p_0..p_k at the origin then one point per column; d = rank(M) - h.
inline WeightedInstance rank_reduction(const std::vector<std::vector<double>>& rows, std::size_t h, int k) {
  if (rows.empty() || rows[0].empty()) throw std::invalid_argument("empty matrix");
  const std::size_t r = rows.size();
  const std::size_t n = rows[0].size();
  for (const auto& row : rows)
    if (row.size() != n) throw std::invalid_argument("ragged matrix");
  for (std::size_t c = 0; c < n; ++c) {
    bool zero = true;
    for (std::size_t i = 0; i < r; ++i)
      if (rows[i][c] != 0.0) zero = false;
    if (zero) throw std::invalid_argument("matrix has a zero column");
  }
  if (k < 0) throw std::invalid_argument("k must be nonnegative");
  const std::size_t rank = exact_rank(rows);
  if (h < 1 || h > rank) throw std::invalid_argument("need 1 <= h <= rank");
  if (h == rank) throw std::invalid_argument("h = rank leaves target dimension 0");
  std::vector<std::vector<double>> pts;
  for (int i = 0; i <= k; ++i) pts.emplace_back(r, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<double> col(r);
    for (std::size_t i = 0; i < r; ++i) col[i] = rows[i][c];
    pts.push_back(std::move(col));
  }
  std::vector<std::string> labels;
  for (int i = 0; i <= k; ++i) labels.push_back("p" + std::to_string(i));
  for (std::size_t c = 1; c <= n; ++c) labels.push_back("x" + std::to_string(c));
  return WeightedInstance::unit(space_from_points(pts, std::move(labels)), static_cast<int>(rank - h), k, 0);
}

// 9-point instance with one outlier (label "7") and two corrupted entries.
inline WeightedInstance paper_example() {
  DistanceSpace s({{0, 7, 1, 2, 4, 5, 1, 4, 5},
                   {7, 0, 2, 1, 1, 2, 10, 5, 4},
                   {1, 2, 0, 1, 11, 4, 4, 1, 2},
                   {2, 1, 1, 0, 2, 1, 8, 2, 1},
                   {4, 1, 11, 2, 0, 1, 12, 8, 5},
                   {5, 2, 4, 1, 1, 0, 7, 5, 2},
                   {1, 10, 4, 8, 12, 7, 0, 8, 9},
                   {4, 5, 1, 2, 8, 5, 8, 0, 1},
                   {5, 4, 2, 1, 5, 2, 9, 1, 0}},
                  {"1", "2", "3", "4", "5", "6", "7", "8", "9"});
  return WeightedInstance::unit(std::move(s), 2, 1, 2, 3);
}

// Known witness for paper_example(): delete "7", set (1,2) to 1 and (3,5) to 5.
inline Solution paper_witness() {
  Solution sol;
  sol.outliers = {6};
  sol.modifications[Pair(0, 1)] = 1.0;
  sol.modifications[Pair(2, 4)] = 5.0;
  sol.cost = 3;
  return sol;
}

}  // namespace edmrepair
