#include <gtest/gtest.h>

#include <edmrepair/core.hpp>

#include "fixtures.hpp"

using namespace edmrepair;

TEST(Validate, AcceptsSymmetricMatrix) {
  EXPECT_FALSE(validate(DistanceSpace({{0, 4}, {4, 0}})).has_value());
}

TEST(Validate, ReportsAsymmetry) {
  auto v = validate(DistanceSpace({{0, 4}, {3, 0}}));
  ASSERT_TRUE(v);
  EXPECT_EQ(v->kind, Violation::Kind::asymmetric);
  EXPECT_EQ(v->i, 0u);
  EXPECT_EQ(v->j, 1u);
}

TEST(Validate, ReportsNonzeroDiagonal) {
  auto v = validate(DistanceSpace({{1, 4}, {4, 0}}));
  ASSERT_TRUE(v);
  EXPECT_EQ(v->kind, Violation::Kind::nonzero_diagonal);
  EXPECT_EQ(v->i, 0u);
}

TEST(Validate, ReportsNegativeEntry) {
  auto v = validate(DistanceSpace({{0, -1}, {-1, 0}}));
  ASSERT_TRUE(v);
  EXPECT_EQ(v->kind, Violation::Kind::negative_entry);
}

TEST(Validate, ZeroOffDiagonalAllowed) {
  EXPECT_FALSE(validate(DistanceSpace({{0, 0}, {0, 0}})).has_value());
}

TEST(Restrict, WorkedExampleDropsOutlier) {
  DistanceSpace r = restrict(fixtures::worked_example(), {6});
  DistanceSpace target = fixtures::repaired_example();
  ASSERT_EQ(r.size(), 8u);
  EXPECT_EQ(r.labels(), target.labels());
  for (PointId i = 0; i < 8; ++i)
    for (PointId j = 0; j < 8; ++j) {
      const bool corrupted = (i == 0 && j == 1) || (i == 1 && j == 0) || (i == 2 && j == 4) || (i == 4 && j == 2);
      if (corrupted)
        EXPECT_NE(r(i, j), target(i, j));
      else
        EXPECT_EQ(r(i, j), target(i, j));
    }
}

TEST(Restrict, EmptyDeleteIsIdentity) {
  DistanceSpace s = fixtures::worked_example();
  EXPECT_EQ(restrict(s, {}), s);
}

TEST(Restrict, DeleteAllGivesEmpty) {
  DistanceSpace s = fixtures::worked_example();
  EXPECT_EQ(restrict(s, s.points()).size(), 0u);
}

TEST(Restrict, UnknownIndexThrows) {
  EXPECT_THROW(restrict(fixtures::worked_example(), {9}), std::out_of_range);
}

TEST(Restrict, ComposesAsUnion) {
  DistanceSpace s = fixtures::worked_example();
  DistanceSpace twice = restrict(restrict(s, {1}), {4});  // index 4 of the 8-point space is original 5
  EXPECT_EQ(twice, restrict(s, {1, 5}));
}

TEST(Restrict, PreservesValidity) {
  DistanceSpace s = fixtures::worked_example();
  EXPECT_FALSE(validate(restrict(s, {0, 3, 8})).has_value());
}

TEST(ApplyModifications, RepairsWorkedExample) {
  DistanceSpace s = fixtures::worked_example();
  DistanceSpace fixed = restrict(apply_modifications(s, {{Pair(0, 1), 1.0}, {Pair(2, 4), 5.0}}), {6});
  EXPECT_EQ(fixed, fixtures::repaired_example());
}

TEST(ApplyModifications, EmptyIsIdentity) {
  DistanceSpace s = fixtures::worked_example();
  EXPECT_EQ(apply_modifications(s, {}), s);
}

TEST(ApplyModifications, SetsBothEntries) {
  DistanceSpace s = apply_modifications(fixtures::worked_example(), {{Pair(1, 0), 0.0}});
  EXPECT_EQ(s(0, 1), 0.0);
  EXPECT_EQ(s(1, 0), 0.0);
}

TEST(ApplyModifications, RejectsBadInput) {
  DistanceSpace s = fixtures::worked_example();
  EXPECT_THROW(apply_modifications(s, {{Pair(0, 1), -1.0}}), std::invalid_argument);
  EXPECT_THROW(apply_modifications(s, {{Pair(2, 2), 1.0}}), std::invalid_argument);
}

TEST(ApplyModifications, IdempotentAndCommuting) {
  DistanceSpace s = fixtures::worked_example();
  Modifications a{{Pair(0, 1), 3.0}};
  Modifications b{{Pair(2, 4), 6.0}};
  EXPECT_EQ(apply_modifications(apply_modifications(s, a), a), apply_modifications(s, a));
  EXPECT_EQ(apply_modifications(apply_modifications(s, a), b), apply_modifications(apply_modifications(s, b), a));
}

TEST(SolutionCost, UnitWeightsWorkedWitness) {
  WeightedInstance inst = WeightedInstance::unit(fixtures::worked_example(), 2, 1, 2, 3);
  Solution sol;
  sol.outliers = {6};
  sol.modifications = {{Pair(0, 1), 1.0}, {Pair(2, 4), 5.0}};
  EXPECT_EQ(solution_cost(inst, sol), 3);
}

TEST(SolutionCost, EmptySolutionIsFree) {
  WeightedInstance inst = WeightedInstance::unit(fixtures::worked_example(), 2, 1, 2, 3);
  EXPECT_EQ(solution_cost(inst, Solution{}), 0);
}

TEST(SolutionCost, UsesPointWeights) {
  WeightedInstance inst = WeightedInstance::unit(DistanceSpace({{0, 4}, {4, 0}}), 1, 1, 0);
  inst.w_out = {5, 1};
  Solution sol;
  sol.outliers = {0};
  EXPECT_EQ(solution_cost(inst, sol), 5);
}

TEST(WeightedInstance, CheckRejectsBadParameters) {
  WeightedInstance inst = WeightedInstance::unit(DistanceSpace({{0, 4}, {4, 0}}), 1, 0, 0);
  EXPECT_NO_THROW(inst.check());
  inst.d = 0;
  EXPECT_THROW(inst.check(), std::invalid_argument);
  inst.d = 1;
  inst.w_out = {1};
  EXPECT_THROW(inst.check(), std::invalid_argument);
}

TEST(WeightedInstance, DefaultBudgetIsTotalWeight) {
  WeightedInstance inst = WeightedInstance::unit(DistanceSpace({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}), 1, 0, 0);
  EXPECT_EQ(inst.W, 6);
}

TEST(PointSets, Helpers) {
  EXPECT_EQ(make_point_set({3, 1, 3}), (PointSet{1, 3}));
  EXPECT_EQ(with_point({1, 3}, 2), (PointSet{1, 2, 3}));
  EXPECT_EQ(without_point({1, 2, 3}, 2), (PointSet{1, 3}));
  EXPECT_EQ(set_union({1, 3}, {2, 3}), (PointSet{1, 2, 3}));
  EXPECT_EQ(set_minus({1, 2, 3}, {2}), (PointSet{1, 3}));
  EXPECT_TRUE(disjoint({1, 3}, {2, 4}));
  EXPECT_FALSE(disjoint({1, 3}, {3}));
}
