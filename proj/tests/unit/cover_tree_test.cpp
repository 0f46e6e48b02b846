#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "adversarl/attack/cover_tree.hpp"
#include "adversarl/attack/state_partition.hpp"
#include "adversarl/core/errors.hpp"
#include "adversarl/core/rng.hpp"
#include "support/oracles.hpp"

namespace adversarl {
namespace {

using testing::kNegInf;

Box unit_box(std::size_t dim) { return Box{std::vector<double>(dim, -1.0), std::vector<double>(dim, 1.0)}; }

TEST(Partition, LowerCornerIsCellZero) {
  StatePartition p(Box{{-1.0}, {1.0}}, 16);
  EXPECT_EQ(p.cell_index(StateVec{-1.0}), 0u);
}

TEST(Partition, TopEdgeFoldsIntoLastCell) {
  StatePartition p(Box{{-1.0}, {1.0}}, 16);
  EXPECT_EQ(p.cell_index(StateVec{1.0}), 15u);
}

TEST(Partition, InteriorBoundaryGoesUp) {
  StatePartition p(Box{{-1.0}, {1.0}}, 16);
  EXPECT_EQ(p.cell_index(StateVec{0.0}), 8u);
  EXPECT_EQ(p.cell_index(StateVec{-0.0000001}), 7u);
}

TEST(Partition, TwoDimensionalRowMajor) {
  StatePartition p(Box{{0.0, 0.0}, {8.0, 8.0}}, 9);
  EXPECT_EQ(p.cell_count(), 81u);
  EXPECT_EQ(p.cell_index(StateVec{0.5, 8.0}), 72u);
}

TEST(Partition, OutOfBoundsIsRejected) {
  StatePartition p(Box{{-1.0}, {1.0}}, 16);
  EXPECT_THROW(p.cell_index(StateVec{1.5}), ContractViolation);
}

TEST(Partition, CellsContainTheirPointsAndRespectTheDiameter) {
  StatePartition p(Box{{0.0, 0.0}, {8.0, 8.0}}, 9);
  Rng rng = make_rng(4, 0);
  for (int i = 0; i < 5000; ++i) {
    const StateVec s{uniform(rng, 0, 8), uniform(rng, 0, 8)};
    const Box cell = p.cell_box(p.cell_index(s));
    ASSERT_TRUE(cell.contains(s.coords()));
    ASSERT_LE(cell.diameter(), p.cell_diameter() + 1e-12);
  }
}

TEST(QhatUpdate, FirstSampleOverwrites) {
  CellStats st;
  st.count = 1;
  qhat_update(st, 0.7);
  EXPECT_DOUBLE_EQ(st.qhat, 0.7);
}

TEST(QhatUpdate, TwoSamplesAverage) {
  CellStats st;
  st.count = 1;
  qhat_update(st, 0.5);
  st.count = 2;
  qhat_update(st, 0.7);
  EXPECT_NEAR(st.qhat, 0.6, 1e-15);
}

TEST(QhatUpdate, ZeroCountIsAContractViolation) {
  CellStats st;
  EXPECT_THROW(qhat_update(st, 1.0), ContractViolation);
}

TEST(QhatUpdate, IncrementalMatchesBatchMean) {
  Rng rng = make_rng(17, 0);
  CellStats st;
  double sum = 0.0;
  for (int i = 1; i <= 1000; ++i) {
    const double x = uniform(rng, -2.0, 12.0);
    sum += x;
    ++st.count;
    qhat_update(st, x);
    ASSERT_NEAR(st.qhat, sum / i, 1e-9);
  }
}

TEST(CoverTree, InitialTreeHasRootAndTwoChildren) {
  CoverTree t(unit_box(1), 2.0, 0.5);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t.node(1).depth, 1);
  EXPECT_EQ(t.node(1).index, 1u);
  EXPECT_EQ(t.node(2).index, 2u);
  EXPECT_EQ(t.node(1).box.lo, std::vector<double>{-1.0});
  EXPECT_EQ(t.node(1).box.hi, std::vector<double>{0.0});
  EXPECT_DOUBLE_EQ(t.node(1).representative[0], -0.5);
  EXPECT_EQ(t.node(2).box.lo, std::vector<double>{0.0});
  EXPECT_EQ(t.node(2).box.hi, std::vector<double>{1.0});
  EXPECT_DOUBLE_EQ(t.node(2).representative[0], 0.5);
}

TEST(CoverTree, SplitIndicesFollowTheBinaryLayout) {
  CoverTree t(unit_box(1), 2.0, 0.5);
  const auto [l, r] = t.split(2);
  EXPECT_EQ(t.node(l).depth, 2);
  EXPECT_EQ(t.node(l).index, 3u);
  EXPECT_EQ(t.node(r).index, 4u);
  EXPECT_DOUBLE_EQ(t.node(l).representative[0], 0.25);
  EXPECT_DOUBLE_EQ(t.node(r).representative[0], 0.75);
}

TEST(CoverTree, SplittingAnInternalNodeIsAContractViolation) {
  CoverTree t(unit_box(1), 2.0, 0.5);
  EXPECT_THROW(t.split(0), ContractViolation);
}

TEST(CoverTree, TwoDimensionalSplitsRoundRobin) {
  CoverTree t(unit_box(2), 1.2 * std::sqrt(8.0), std::sqrt(0.5));
  // Depth 0 split on axis 0.
  EXPECT_EQ(t.node(1).box.hi, (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(t.node(2).box.lo, (std::vector<double>{0.0, -1.0}));
  // Depth 1 split on axis 1.
  const auto [l, r] = t.split(1);
  EXPECT_EQ(t.node(l).box.lo, (std::vector<double>{-1.0, -1.0}));
  EXPECT_EQ(t.node(l).box.hi, (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(t.node(r).box.lo, (std::vector<double>{-1.0, 0.0}));
  EXPECT_EQ(t.node(r).box.hi, (std::vector<double>{0.0, 1.0}));
}

TEST(CoverTree, DimConsecutiveSplitsHalveTheDiameter) {
  for (std::size_t dim : {1u, 2u, 5u}) {
    CoverTree t(unit_box(dim), 1.2 * unit_box(dim).diameter(), std::pow(2.0, -1.0 / static_cast<double>(dim)));
    int id = 1;
    for (std::size_t j = 1; j < dim; ++j) id = t.split(id).first;
    EXPECT_NEAR(t.node(id).box.diameter(), 0.5 * t.node(0).box.diameter(), 1e-12) << dim;
  }
}

TEST(CoverTree, GeometryHoldsOnDeepRandomTrees) {
  for (std::size_t dim : {1u, 2u, 5u}) {
    const Box a = unit_box(dim);
    const double nu1 = dim == 1 ? a.diameter() : 1.2 * a.diameter();
    CoverTree t(a, nu1, std::pow(2.0, -1.0 / static_cast<double>(dim)));
    Rng rng = make_rng(dim, 0);
    for (int i = 0; i < 400; ++i) {
      std::vector<int> leaves;
      for (std::size_t id = 0; id < t.size(); ++id)
        if (t.node(static_cast<int>(id)).is_leaf()) leaves.push_back(static_cast<int>(id));
      ASSERT_NO_THROW(t.split(leaves[uniform_index(rng, leaves.size())]));
    }
    for (const TreeNode& n : t.nodes()) {
      ASSERT_LE(n.box.diameter(), t.size_bound(n.depth)) << "dim " << dim << " depth " << n.depth;
      ASSERT_TRUE(n.box.contains(n.representative.coords()));
      if (!n.is_leaf()) {
        const Box& l = t.node(n.left).box;
        const Box& r = t.node(n.right).box;
        const std::size_t axis = static_cast<std::size_t>(n.depth) % dim;
        for (std::size_t d = 0; d < dim; ++d) {
          ASSERT_EQ(l.lo[d], n.box.lo[d]);
          ASSERT_EQ(r.hi[d], n.box.hi[d]);
          if (d == axis) {
            ASSERT_EQ(l.hi[d], r.lo[d]);
          } else {
            ASSERT_EQ(l.hi[d], n.box.hi[d]);
            ASSERT_EQ(r.lo[d], n.box.lo[d]);
          }
        }
      }
    }
  }
}

TEST(CoverTree, TooSmallNuOneIsAGeometryViolation) {
  // With nu1 = diam(A) in 2-D the first split already breaks diam <= nu1 rho.
  try {
    CoverTree t(unit_box(2), unit_box(2).diameter(), std::sqrt(0.5));
    FAIL() << "expected InvariantViolation";
  } catch (const InvariantViolation& e) {
    EXPECT_EQ(e.invariant(), "tree geometry");
  }
}

LcbContext slider_context() {
  LcbContext ctx;
  ctx.horizon = 10;
  ctx.h = 10;
  ctx.cells = 16;
  ctx.k = 10;
  ctx.total_nodes = 30;
  ctx.delta1 = 0.05;
  ctx.cell_diameter = 0.125;
  return ctx;
}

TEST(Lcb, WorkedExample) {
  // Depth-2 node with nu1 = 2, rho = 1/2: size term 0.5. Mean of two visits 0.5.
  CoverTree t(unit_box(1), 2.0, 0.5);
  const int l = t.split(1).first;
  t.record(l, 3, 0.4);
  t.record(l, 3, 0.6);
  const double l_value = t.lcb(l, 3, slider_context());
  EXPECT_NEAR(l_value, 0.5 - 0.5 * std::sqrt(std::log(192000.0)) - 0.625, 1e-12);
  EXPECT_NEAR(l_value, -1.870, 2e-3);
}

TEST(Lcb, UnvisitedIsMinusInfinity) {
  CoverTree t(unit_box(1), 2.0, 0.5);
  EXPECT_EQ(t.lcb(1, 0, slider_context()), kNegInf);
  t.record(1, 0, 1.0);
  EXPECT_EQ(t.lcb(1, 1, slider_context()), kNegInf);
}

TEST(Lcb, RadiusShrinksWithVisits) {
  const LcbContext ctx = slider_context();
  for (std::uint64_t n = 1; n < 1000; ++n) ASSERT_GT(confidence_radius(ctx, n), confidence_radius(ctx, n + 1));
}

TEST(Lcb, MatchesReferenceFormula) {
  CoverTree t(unit_box(1), 2.0, 0.5);
  Rng rng = make_rng(8, 0);
  for (int i = 0; i < 200; ++i) t.record(static_cast<int>(uniform_index(rng, 3)), 0, uniform(rng, 0, 10));
  LcbContext ctx = slider_context();
  for (int h = 1; h <= 10; ++h) {
    ctx.h = h;
    for (int id = 0; id < 3; ++id)
      EXPECT_DOUBLE_EQ(t.lcb(id, 0, ctx), testing::reference_lcb(t.node(id), 0, ctx, t.nu1(), t.rho()));
  }
}

/// Builds a tree where node `id` has LCB exactly `l` in cell 0 by choosing
/// its mean; count 1 keeps the offset fixed.
void set_lcb(CoverTree& t, int id, double l, const LcbContext& ctx) {
  const double offset = confidence_radius(ctx, 1) + ctx.cell_diameter + t.size_bound(t.node(id).depth);
  t.record(id, 0, l + offset);
}

TEST(BValue, LeafEqualsLcb) {
  CoverTree t(unit_box(1), 2.0, 0.5);
  const LcbContext ctx = slider_context();
  set_lcb(t, 1, -1.5, ctx);
  const auto b = t.bvalues(0, ctx);
  EXPECT_NEAR(b[1], -1.5, 1e-12);
  EXPECT_EQ(b[2], kNegInf);
}

TEST(BValue, ParentTakesMaxOfOwnAndWorseChild) {
  CoverTree t(unit_box(1), 2.0, 0.5);
  const LcbContext ctx = slider_context();
  set_lcb(t, 0, -2.0, ctx);
  set_lcb(t, 1, -1.0, ctx);
  set_lcb(t, 2, -3.0, ctx);
  EXPECT_NEAR(t.bvalues(0, ctx)[0], -2.0, 1e-12);
}

TEST(BValue, FreshChildrenAreAbsorbed) {
  CoverTree t(unit_box(1), 2.0, 0.5);
  const LcbContext ctx = slider_context();
  set_lcb(t, 0, -2.0, ctx);
  EXPECT_NEAR(t.bvalues(0, ctx)[0], -2.0, 1e-12);
}

TEST(Traverse, InitialTreeGoesLeft) {
  CoverTree t(unit_box(1), 2.0, 0.5);
  const TraverseResult r = t.wor_traverse(0, slider_context());
  EXPECT_EQ(r.leaf, 1);
  EXPECT_EQ(r.path, (std::vector<int>{0, 1}));
}

TEST(Traverse, SmallerBGoesRight) {
  CoverTree t(unit_box(1), 2.0, 0.5);
  const LcbContext ctx = slider_context();
  set_lcb(t, 1, -1.0, ctx);
  set_lcb(t, 2, -5.0, ctx);
  EXPECT_EQ(t.wor_traverse(0, ctx).leaf, 2);
}

using testing::random_tree;

TEST(BValue, MatchesRecursiveOracleOnRandomTrees) {
  Rng rng = make_rng(2024, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const CoverTree t = random_tree(rng, trial % 2 == 0 ? 1 : 2);
    LcbContext ctx = slider_context();
    ctx.h = 1 + static_cast<int>(uniform_index(rng, 10));
    ctx.total_nodes = t.size() * 10;
    for (std::uint32_t cell = 0; cell < 4; ++cell) {
      const auto b = t.bvalues(cell, ctx);
      for (std::size_t id = 0; id < t.size(); ++id) {
        const double ref = testing::reference_bvalue(t, static_cast<int>(id), cell, ctx);
        ASSERT_EQ(b[id], ref) << "trial " << trial << " node " << id;
        ASSERT_GE(b[id], t.lcb(static_cast<int>(id), cell, ctx));
      }
    }
  }
}

TEST(Traverse, MatchesDescentOracleOnRandomTrees) {
  Rng rng = make_rng(4048, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const CoverTree t = random_tree(rng, trial % 2 == 0 ? 1 : 2);
    LcbContext ctx = slider_context();
    ctx.h = 1 + static_cast<int>(uniform_index(rng, 10));
    ctx.total_nodes = t.size() * 10;
    for (std::uint32_t cell = 0; cell < 4; ++cell) {
      const TraverseResult r = t.wor_traverse(cell, ctx);
      ASSERT_EQ(r.path, testing::reference_descent(t, cell, ctx)) << "trial " << trial;
      ASSERT_EQ(r.leaf, r.path.back());
      ASSERT_TRUE(t.node(r.leaf).is_leaf());
      ASSERT_EQ(t.wor_traverse(cell, ctx).path, r.path);
    }
  }
}

TEST(Expansion, SliderThresholdIsEightVisits) {
  LcbContext ctx;
  ctx.horizon = 10;
  ctx.h = 10;
  ctx.cells = 16;
  ctx.k = 100;
  ctx.total_nodes = 30;
  ctx.delta1 = 0.05;
  EXPECT_NEAR(0.5 * std::log(1920000.0), 7.234, 1e-3);
  EXPECT_FALSE(expansion_due(1.0, ctx, 7));
  EXPECT_TRUE(expansion_due(1.0, ctx, 8));
  EXPECT_FALSE(expansion_due(1.0, ctx, 0));
}

TEST(Expansion, ChildrenStartFresh) {
  CoverTree t(unit_box(1), 2.0, 0.5);
  for (int i = 0; i < 8; ++i) t.record(1, 5, 0.3);
  const auto [l, r] = t.split(1);
  for (std::uint32_t cell = 0; cell < 16; ++cell) {
    EXPECT_EQ(t.node(l).stats_for(cell).count, 0u);
    EXPECT_EQ(t.node(r).stats_for(cell).count, 0u);
    EXPECT_EQ(t.lcb(l, cell, slider_context()), kNegInf);
    EXPECT_EQ(t.lcb(r, cell, slider_context()), kNegInf);
  }
  EXPECT_EQ(t.node(1).stats_for(5).count, 8u);
}

TEST(NodeBound, InitialTreesFitAtEveryStep) {
  for (int h = 1; h <= 10; ++h) EXPECT_GE(node_count_bound(1, 2.0, 0.5, 10, h, 16, 0.05), 4.0);
}

TEST(NodeBound, CubeRootGrowthForHalvingInOneDimension) {
  // With rho = 1/2 the exponent is log_8 2 = 1/3.
  const double a = node_count_bound(1'000'000, 2.0, 0.5, 10, 10, 16, 0.05);
  const double b = node_count_bound(8'000'000, 2.0, 0.5, 10, 10, 16, 0.05);
  EXPECT_NEAR(b / a, 2.0, 1e-3);
}

TEST(NodeBound, MatchesFormula) {
  const double k = 5000;
  const double nu1 = 1.2 * std::sqrt(8.0);
  const double rho = std::sqrt(0.5);
  const double base = k * nu1 * nu1 * (2 - rho * rho) / (9.0 * std::log(6.0 * 81 * 10 / 0.05)) + 1;
  const double e = std::log(2.0) / std::log(2.0 / (rho * rho));
  EXPECT_NEAR(node_count_bound(5000, nu1, rho, 10, 8, 81, 0.05), 4 * std::pow(base, e), 1e-9);
}

}  // namespace
}  // namespace adversarl
