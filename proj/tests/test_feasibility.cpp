#include <gtest/gtest.h>

#include <random>

#include <edmrepair/feasibility.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace edmrepair;

namespace {

// worked example without point "7"; (0,1) and (2,4) carry the corrupted values
DistanceSpace example_without_outlier() {
  DistanceSpace s = fixtures::worked_example();
  return restrict(s, {6});
}

PartialRealizationProblem problem(DistanceSpace s, std::vector<Pair> free, int dim, std::uint64_t seed = 0) {
  PartialRealizationProblem p;
  p.space = std::move(s);
  p.free_pairs = std::move(free);
  p.dim = dim;
  p.seed = seed;
  return p;
}

// points embedded in R^d with `k` pairs given arbitrary values
struct Planted {
  DistanceSpace space;
  std::vector<Pair> free;
  int d;
};

Planted planted(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dd(1, 3), nn(4, 8), kk(1, 3);
  const int d = dd(rng);
  const std::size_t n = static_cast<std::size_t>(nn(rng));
  DistanceSpace s = fixtures::from_points(fixtures::random_real_points(rng, n, d, 5.0));
  std::vector<Pair> all;
  for (PointId i = 0; i < n; ++i)
    for (PointId j = i + 1; j < n; ++j) all.emplace_back(i, j);
  std::shuffle(all.begin(), all.end(), rng);
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(kk(rng)), all.size());
  std::vector<Pair> free(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k));
  Modifications scramble;
  std::uniform_real_distribution<double> u(0.0, 200.0);
  for (const Pair& p : free) scramble[p] = u(rng);
  return {apply_modifications(s, scramble), free, d};
}

}  // namespace

TEST(Feasibility, NoFreePairsMatchesRealize) {
  DistanceSpace s = fixtures::repaired_example();
  auto w = feasible_with_free_pairs(problem(s, {}, 2));
  ASSERT_TRUE(w.has_value());
  EXPECT_LT(max_relative_error(s, w->realization), 1e-9);
  EXPECT_TRUE(w->free_values.empty());
}

TEST(Feasibility, WorkedExampleRecoversRepair) {
  DistanceSpace s = example_without_outlier();
  std::vector<Pair> free{{0, 1}, {2, 4}};
  auto w = feasible_with_free_pairs(problem(s, free, 2));
  ASSERT_TRUE(w.has_value());
  EXPECT_NEAR(w->free_values.at(Pair(0, 1)), 1.0, 1e-6);
  EXPECT_NEAR(w->free_values.at(Pair(2, 4)), 5.0, 1e-6);
  EXPECT_TRUE(verify_witness(s, free, 2, w->realization));
}

TEST(Feasibility, WorkedExampleNeedsBothPairs) {
  DistanceSpace s = example_without_outlier();
  FeasibilityOutcome o = feasible_with_free_pairs_detailed(problem(s, {{0, 1}}, 2));
  EXPECT_FALSE(o.witness.has_value());
  EXPECT_TRUE(o.certified_infeasible);
}

TEST(Feasibility, BadTriangleWithFreePair) {
  DistanceSpace s({{0, 1, 1}, {1, 0, 9}, {1, 9, 0}});
  auto w = feasible_with_free_pairs(problem(s, {{1, 2}}, 1));
  ASSERT_TRUE(w.has_value());
  const double v = w->free_values.at(Pair(1, 2));
  EXPECT_TRUE(std::fabs(v) < 1e-9 || std::fabs(v - 4.0) < 1e-9);
}

TEST(Feasibility, DimensionZero) {
  DistanceSpace s({{0, 0, 4}, {0, 0, 4}, {4, 4, 0}});
  EXPECT_FALSE(feasible_with_free_pairs(problem(s, {}, 0)).has_value());
  EXPECT_FALSE(feasible_with_free_pairs(problem(s, {{0, 2}}, 0)).has_value());
  EXPECT_TRUE(feasible_with_free_pairs(problem(s, {{0, 2}, {1, 2}}, 0)).has_value());
}

TEST(VerifyWitness, RepairedRealizationPasses) {
  DistanceSpace rep = fixtures::repaired_example();
  auto real = realize(rep, 2);
  ASSERT_TRUE(real.has_value());
  EXPECT_TRUE(verify_witness(example_without_outlier(), {{0, 1}, {2, 4}}, 2, *real));
  EXPECT_TRUE(verify_witness(rep, {{0, 1}, {2, 4}}, 2, *real));
}

TEST(VerifyWitness, PerturbedNonFreePairFails) {
  DistanceSpace rep = fixtures::repaired_example();
  auto real = realize(rep, 2);
  ASSERT_TRUE(real.has_value());
  Realization bad = *real;
  // moving point 7 changes its non-free distances by about 10x the tolerance
  bad.coords[7][0] += 10 * 1e-6 * rep.max_sqdist();
  EXPECT_FALSE(verify_witness(rep, {{0, 1}}, 2, bad));
}

TEST(VerifyWitness, WrongDimensionFails) {
  DistanceSpace rep = fixtures::repaired_example();
  auto real = realize(rep, 2);
  ASSERT_TRUE(real.has_value());
  EXPECT_FALSE(verify_witness(rep, {}, 1, *real));
}

TEST(FeasibilityProperties, AgreesWithEmbeddabilityWithoutFreePairs) {
  std::mt19937_64 rng(31);
  int checked = 0;
  for (int t = 0; t < 100; ++t) {
    const int d = 1 + t % 3;
    DistanceSpace s = fixtures::noisy_space(rng, 7, d, t % 3 == 0 ? 1 : 0);
    for (int q = 0; q < 5; ++q) {
      std::uniform_int_distribution<std::uint64_t> mask(1, (1u << 7) - 1);
      PointSet sub = oracle_ref::mask_to_set(mask(rng), 7);
      DistanceSpace part = induced(s, sub);
      const bool expect = oracle_ref::mds_embeddable(part, part.points(), d);
      EXPECT_EQ(feasible_with_free_pairs(problem(part, {}, d)).has_value(), expect);
      ++checked;
    }
  }
  EXPECT_GE(checked, 500);
}

TEST(FeasibilityProperties, SoundAndCompleteOnPlanted) {
  std::mt19937_64 rng(77);
  int found = 0;
  const int total = 200;
  for (int t = 0; t < total; ++t) {
    Planted p = planted(rng);
    auto w = feasible_with_free_pairs(problem(p.space, p.free, p.d, static_cast<std::uint64_t>(t)));
    if (!w) continue;
    ++found;
    EXPECT_TRUE(verify_witness(p.space, p.free, p.d, w->realization));
    for (const auto& [pair, v] : w->free_values) EXPECT_GE(v, 0.0);
  }
  EXPECT_GE(found, total * 95 / 100);
}

TEST(FeasibilityProperties, ScaleInvariantVerdict) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 40; ++t) {
    Planted p = planted(rng);
    if (t % 2 == 1) {
      // break one non-free distance so some verdicts are negative
      std::vector<double> flat = p.space.flat();
      const std::size_t n = p.space.size();
      for (PointId i = 0; i < n; ++i)
        for (PointId j = i + 1; j < n; ++j)
          if (std::find(p.free.begin(), p.free.end(), Pair(i, j)) == p.free.end()) {
            flat[i * n + j] = flat[j * n + i] = flat[i * n + j] * 3.0 + 1.0;
            i = n;
            break;
          }
      p.space = DistanceSpace(n, flat);
    }
    const bool base = feasible_with_free_pairs(problem(p.space, p.free, p.d, 1)).has_value();
    for (double c : {1e-3, 7.0, 1e4}) {
      std::vector<double> flat = p.space.flat();
      for (double& v : flat) v *= c;
      DistanceSpace scaled(p.space.size(), flat);
      EXPECT_EQ(feasible_with_free_pairs(problem(scaled, p.free, p.d, 1)).has_value(), base) << "trial " << t;
    }
  }
}
