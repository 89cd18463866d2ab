#include <gtest/gtest.h>

#include <random>

#include <edmrepair/geometry.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace edmrepair;

namespace {

DistanceSpace triangle(double a, double b, double c) { return DistanceSpace({{0, a, b}, {a, 0, c}, {b, c, 0}}); }

DistanceSpace unit_square() {
  return fixtures::from_points({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
}

const std::vector<Config> kBackends = {Config{}, Config::exact()};

}  // namespace

TEST(CmDet, PairIsTwiceSquaredDistance) {
  DistanceSpace s = fixtures::worked_example();
  std::vector<PointId> p{0, 1};
  EXPECT_EQ(oracle_ref::cm_cofactor(s, p), 14);
  EXPECT_EQ(cm_det<Rational>(s, p), 14);
  EXPECT_NEAR(cm_det(s, p), 14.0, 1e-12);
}

TEST(CmDet, UnitTriangle) {
  DistanceSpace s = triangle(1, 1, 1);
  std::vector<PointId> p{0, 1, 2};
  EXPECT_EQ(oracle_ref::cm_cofactor(s, p), -3);
  EXPECT_EQ(cm_det<Rational>(s, p), -3);
  EXPECT_NEAR(cm_det(s, p), -3.0, 1e-12);
}

TEST(CmDet, SinglePoint) {
  std::vector<PointId> p{1};
  EXPECT_EQ(cm_det<Rational>(triangle(1, 1, 1), p), -1);
}

TEST(CmDet, DuplicateIndexThrows) {
  std::vector<PointId> p{1, 1};
  EXPECT_THROW(cm_det(triangle(1, 1, 1), p), std::invalid_argument);
}

TEST(CmDet, AgreesWithCofactorOracle) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 40; ++t) {
    std::uniform_int_distribution<int> u(0, 20);
    const std::size_t n = 5;
    std::vector<double> flat(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) flat[i * n + j] = flat[j * n + i] = u(rng);
    DistanceSpace s(n, flat);
    std::vector<PointId> p{0, 1, 2, 3, 4};
    EXPECT_EQ(cm_det<Rational>(s, p), oracle_ref::cm_cofactor(s, p));
  }
}

TEST(CmDetOverrides, EmptyOverridesMatchPlain) {
  DistanceSpace s = fixtures::worked_example();
  std::vector<PointId> p{0, 2, 4, 6};
  EXPECT_EQ(cm_det_with_overrides<Rational>(s, p, {}), cm_det<Rational>(s, p));
}

TEST(CmDetOverrides, PairOverride) {
  DistanceSpace s = triangle(1, 1, 1);
  std::vector<PointId> p{0, 1};
  EXPECT_EQ(cm_det_with_overrides<Rational>(s, p, {{Pair(0, 1), 7.0}}), 14);
}

TEST(CmDetOverrides, FullTriangleOverride) {
  DistanceSpace s = triangle(4, 9, 2);
  std::vector<PointId> p{0, 1, 2};
  Modifications all{{Pair(0, 1), 1.0}, {Pair(0, 2), 1.0}, {Pair(1, 2), 1.0}};
  EXPECT_EQ(cm_det_with_overrides<Rational>(s, p, all), -3);
}

TEST(CmDetOverrides, RejectsNegativeAndForeignPairs) {
  DistanceSpace s = triangle(1, 1, 1);
  std::vector<PointId> p{0, 1};
  EXPECT_THROW(cm_det_with_overrides(s, p, {{Pair(0, 1), -1.0}}), std::invalid_argument);
  EXPECT_THROW(cm_det_with_overrides(s, p, {{Pair(0, 2), 1.0}}), std::invalid_argument);
}

TEST(CmSign, ToleranceTreatsCollinearAsZero) {
  DistanceSpace s = triangle(1, 4, 1);  // 0,1,2 on a line with 1 in the middle
  std::vector<PointId> p{0, 1, 2};
  EXPECT_EQ(cm_sign(s, p), 0);
  EXPECT_EQ(cm_sign(s, p, Config::exact()), 0);
  EXPECT_EQ(cm_sign(triangle(1, 1, 1), p), -1);
}

TEST(Embeddable, CollinearOnLine) {
  for (const Config& cfg : kBackends) EXPECT_TRUE(is_embeddable(triangle(1, 4, 1), {0, 1, 2}, 1, cfg));
}

TEST(Embeddable, TriangleInequalityViolation) {
  for (const Config& cfg : kBackends)
    for (int r = 0; r <= 5; ++r) EXPECT_FALSE(is_embeddable(triangle(1, 1, 9), {0, 1, 2}, r, cfg));
}

TEST(Embeddable, RepairedExampleInPlane) {
  DistanceSpace s = fixtures::repaired_example();
  for (const Config& cfg : kBackends) {
    EXPECT_TRUE(is_embeddable(s, s.points(), 2, cfg));
    EXPECT_FALSE(is_embeddable(s, s.points(), 1, cfg));
  }
  EXPECT_TRUE(oracle_ref::mds_embeddable(s, s.points(), 2));
}

TEST(Embeddable, WorkedExampleNeedsRepair) {
  DistanceSpace s = fixtures::worked_example();
  for (const Config& cfg : kBackends) EXPECT_FALSE(is_embeddable(s, s.points(), 2, cfg));
}

TEST(Embeddable, Conventions) {
  DistanceSpace s = triangle(1, 1, 1);
  EXPECT_TRUE(is_embeddable(s, {}, -1));
  EXPECT_FALSE(is_embeddable(s, {0}, -1));
  EXPECT_TRUE(is_embeddable(s, {2}, 0));
}

TEST(StronglyEmbeddable, Examples) {
  for (const Config& cfg : kBackends) {
    EXPECT_TRUE(is_strongly_embeddable(triangle(1, 1, 1), {0, 1, 2}, 2, cfg));
    EXPECT_FALSE(is_strongly_embeddable(triangle(1, 1, 1), {0, 1, 2}, 1, cfg));
    EXPECT_TRUE(is_strongly_embeddable(DistanceSpace({{0, 0}, {0, 0}}), {0, 1}, 0, cfg));
    EXPECT_FALSE(is_strongly_embeddable(triangle(1, 4, 1), {0, 1, 2}, 2, cfg));
    EXPECT_TRUE(is_strongly_embeddable(triangle(1, 4, 1), {0, 1, 2}, 1, cfg));
  }
}

TEST(Realize, RepairedExampleRoundTrip) {
  DistanceSpace s = fixtures::repaired_example();
  auto r = realize(s, s.points(), 2);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->dim, 2);
  EXPECT_LT(max_relative_error(s, *r), 1e-9);
}

TEST(Realize, UnitSquare) {
  DistanceSpace s = unit_square();
  for (const Config& cfg : kBackends) {
    EXPECT_TRUE(realize(s, s.points(), 2, cfg).has_value());
    EXPECT_FALSE(realize(s, s.points(), 1, cfg).has_value());
  }
  EXPECT_FALSE(oracle_ref::line_embeddable_by_signs(s, s.points()));
}

TEST(Realize, SinglePointAtOrigin) {
  auto r = realize(triangle(1, 1, 1), {1}, 1);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->coords.at(1), std::vector<double>{0.0});
}

TEST(Realize, CanonicalPlacement) {
  DistanceSpace s = fixtures::from_points({{3, 1}, {5, 1}, {3, 4}});
  auto r = realize(s, s.points(), 2);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->coords.at(0), (std::vector<double>{0.0, 0.0}));
  EXPECT_NEAR(r->coords.at(1)[0], 2.0, 1e-12);
  EXPECT_NEAR(r->coords.at(1)[1], 0.0, 1e-12);
  EXPECT_GE(r->coords.at(2)[1], 0.0);
}

TEST(Independence, Examples) {
  for (const Config& cfg : kBackends) {
    EXPECT_TRUE(is_independent(triangle(1, 1, 1), {2}, cfg));
    EXPECT_FALSE(is_independent(DistanceSpace({{0, 0}, {0, 0}}), {0, 1}, cfg));
    EXPECT_TRUE(is_independent(triangle(1, 1, 1), {0, 1, 2}, cfg));
  }
  EXPECT_THROW(is_independent(triangle(1, 1, 1), {}), std::invalid_argument);
}

TEST(Independence, ExtendToMaximal) {
  for (const Config& cfg : kBackends) {
    EXPECT_EQ(extend_to_max_independent(triangle(1, 4, 1), {0, 1, 2}, {}, cfg).size(), 2u);
    EXPECT_EQ(extend_to_max_independent(triangle(1, 4, 1), {1}, {}, cfg), (PointSet{1}));
    DistanceSpace s = fixtures::repaired_example();
    PointSet basis = extend_to_max_independent(s, s.points(), {}, cfg);
    EXPECT_EQ(basis.size(), 3u);
  }
  EXPECT_THROW(extend_to_max_independent(DistanceSpace({{0, 0}, {0, 0}}), {0, 1}, {0, 1}), std::invalid_argument);
}

TEST(Independence, RepairedExampleHasIndependentTriple) {
  // brute force over triples with the exact cofactor oracle
  DistanceSpace s = fixtures::repaired_example();
  int independent = 0;
  for (PointId a = 0; a < 8; ++a)
    for (PointId b = a + 1; b < 8; ++b)
      for (PointId c = b + 1; c < 8; ++c) {
        const bool oracle = oracle_ref::cm_cofactor(s, {a, b, c}) < 0;
        EXPECT_EQ(is_independent(s, {a, b, c}), oracle);
        independent += oracle;
      }
  EXPECT_GT(independent, 0);
}

TEST(Properties, AgreesWithMinorOracleOnSmallSubsets) {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 60; ++t) {
    const int dim = 1 + t % 3;
    auto pts = fixtures::random_int_points(rng, 6, dim, 3);
    DistanceSpace s = fixtures::from_points(pts);
    if (t % 2 == 1) {  // corrupt one entry
      std::uniform_int_distribution<int> u(0, 5);
      PointId i = static_cast<PointId>(u(rng));
      PointId j = (i + 1 + static_cast<PointId>(u(rng)) % 5) % 6;
      s = apply_modifications(s, {{Pair(i, j), s(i, j) + 1 + u(rng)}});
    }
    for (std::uint32_t mask = 1; mask < 64; mask += 3) {
      PointSet sub = oracle_ref::mask_to_set(mask, 6);
      for (int r = 0; r <= 3; ++r) {
        const bool expected = oracle_ref::gram_minor_embeddable(s, sub, r);
        EXPECT_EQ(is_embeddable(s, sub, r), expected) << "float t=" << t << " mask=" << mask << " r=" << r;
        EXPECT_EQ(is_embeddable(s, sub, r, Config::exact()), expected) << "exact t=" << t << " mask=" << mask;
      }
    }
  }
}

TEST(Properties, RoundTripRandomRealPoints) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 100; ++t) {
    const int dim = 1 + t % 4;
    const std::size_t n = 2 + static_cast<std::size_t>(t % 11);
    DistanceSpace s = fixtures::from_points(fixtures::random_real_points(rng, n, dim, 10.0));
    auto r = realize(s, s.points(), dim);
    ASSERT_TRUE(r) << "t=" << t;
    EXPECT_LT(max_relative_error(s, *r), 1e-9);
  }
}

TEST(Properties, SignLawOnRealizedSubsets) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const int dim = 1 + t % 4;
    DistanceSpace s = fixtures::from_points(fixtures::random_int_points(rng, 6, dim, 4));
    const std::size_t k = 1 + static_cast<std::size_t>(t) % static_cast<std::size_t>(dim + 1);
    std::vector<PointId> sub;
    for (PointId i = 0; i < k; ++i) sub.push_back(i);
    const Rational cm = cm_det<Rational>(s, sub);
    const int r = static_cast<int>(k) - 1;
    EXPECT_GE((r % 2 == 1 ? cm : Rational(-cm)), 0);
  }
}

TEST(Properties, IndependenceClosedUnderSubsets) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 30; ++t) {
    DistanceSpace s = fixtures::from_points(fixtures::random_int_points(rng, 5, 3, 3));
    PointSet basis = extend_to_max_independent(s, s.points(), {});
    for (std::uint32_t mask = 1; mask < (1u << basis.size()); ++mask) {
      PointSet sub;
      for (std::size_t i = 0; i < basis.size(); ++i)
        if (mask >> i & 1u) sub.push_back(basis[i]);
      EXPECT_TRUE(is_independent(s, sub));
    }
  }
}

TEST(Properties, DeletionClosure) {
  DistanceSpace s = fixtures::repaired_example();
  for (PointId x = 0; x < s.size(); ++x) EXPECT_TRUE(is_embeddable(s, without_point(s.points(), x), 2));
}

TEST(Properties, ScaleInvariance) {
  DistanceSpace s = fixtures::repaired_example();
  std::vector<double> flat = s.flat();
  for (double& v : flat) v *= 1e6;
  DistanceSpace big(s.size(), flat);
  EXPECT_TRUE(is_embeddable(big, big.points(), 2));
  EXPECT_FALSE(is_embeddable(big, big.points(), 1));
}
