#pragma once

#include <random>
#include <vector>

#include <edmrepair/core.hpp>

namespace fixtures {

using edmrepair::DistanceSpace;

// 9-point worked example, labels "1".."9"; point "7" (index 6) is the outlier
// and entries (1,2), (3,5) are corrupted.
inline DistanceSpace worked_example() {
  return DistanceSpace({{0, 7, 1, 2, 4, 5, 1, 4, 5},
                        {7, 0, 2, 1, 1, 2, 10, 5, 4},
                        {1, 2, 0, 1, 11, 4, 4, 1, 2},
                        {2, 1, 1, 0, 2, 1, 8, 2, 1},
                        {4, 1, 11, 2, 0, 1, 12, 8, 5},
                        {5, 2, 4, 1, 1, 0, 7, 5, 2},
                        {1, 10, 4, 8, 12, 7, 0, 8, 9},
                        {4, 5, 1, 2, 8, 5, 8, 0, 1},
                        {5, 4, 2, 1, 5, 2, 9, 1, 0}},
                       {"1", "2", "3", "4", "5", "6", "7", "8", "9"});
}

// Repaired 8-point matrix (point 7 removed, labels kept).
inline DistanceSpace repaired_example() {
  return DistanceSpace({{0, 1, 1, 2, 4, 5, 4, 5},
                        {1, 0, 2, 1, 1, 2, 5, 4},
                        {1, 2, 0, 1, 5, 4, 1, 2},
                        {2, 1, 1, 0, 2, 1, 2, 1},
                        {4, 1, 5, 2, 0, 1, 8, 5},
                        {5, 2, 4, 1, 1, 0, 5, 2},
                        {4, 5, 1, 2, 8, 5, 0, 1},
                        {5, 4, 2, 1, 5, 2, 1, 0}},
                       {"1", "2", "3", "4", "5", "6", "8", "9"});
}

inline DistanceSpace from_points(const std::vector<std::vector<double>>& pts) {
  const std::size_t n = pts.size();
  std::vector<double> flat(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < pts[i].size(); ++t) s += (pts[i][t] - pts[j][t]) * (pts[i][t] - pts[j][t]);
      flat[i * n + j] = s;
    }
  return DistanceSpace(n, std::move(flat));
}

inline std::vector<std::vector<double>> random_int_points(std::mt19937_64& rng, std::size_t n, int d, int box) {
  std::uniform_int_distribution<int> u(-box, box);
  std::vector<std::vector<double>> p(n, std::vector<double>(static_cast<std::size_t>(d)));
  for (auto& q : p)
    for (auto& c : q) c = u(rng);
  return p;
}

inline std::vector<std::vector<double>> random_real_points(std::mt19937_64& rng, std::size_t n, int d, double box) {
  std::uniform_real_distribution<double> u(-box, box);
  std::vector<std::vector<double>> p(n, std::vector<double>(static_cast<std::size_t>(d)));
  for (auto& q : p)
    for (auto& c : q) c = u(rng);
  return p;
}

// Integer points in [-box, box]^d with the last `bad` rows replaced by random
// squared distances in [1, 4 box^2 d].
inline DistanceSpace noisy_space(std::mt19937_64& rng, std::size_t n, int d, std::size_t bad, int box = 3) {
  DistanceSpace s = from_points(random_int_points(rng, n, d, box));
  std::vector<double> flat = s.flat();
  std::uniform_int_distribution<int> u(1, 4 * box * box * d);
  for (std::size_t o = n - bad; o < n; ++o)
    for (std::size_t j = 0; j < n; ++j)
      if (j != o) flat[o * n + j] = flat[j * n + o] = u(rng);
  return DistanceSpace(n, std::move(flat));
}

}  // namespace fixtures
