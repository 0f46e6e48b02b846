#include <gtest/gtest.h>

#include <cmath>

#include "adversarl/core/config.hpp"
#include "adversarl/core/errors.hpp"
#include "adversarl/core/rng.hpp"
#include "adversarl/core/types.hpp"

namespace adversarl {
namespace {

TargetPolicySpec constant_target(ActionVec a, double radius) {
  TargetPolicySpec t;
  t.policy = [a](int, const StateVec&) { return a; };
  t.radius = radius;
  return t;
}

TEST(Vec, HoldsUpToEightCoordinates) {
  const ActionVec a(std::vector<double>(8, 0.5));
  EXPECT_EQ(a.dim(), 8u);
  EXPECT_EQ(a[7], 0.5);
  EXPECT_THROW(ActionVec(std::vector<double>(9, 0.0)), std::length_error);
  EXPECT_NE((StateVec{1.0}), (StateVec{1.0, 0.0}));
}

TEST(Distance, IdentityIsZero) { EXPECT_EQ(distance_l(ActionVec{0.0}, ActionVec{0.0}), 0.0); }

TEST(Distance, ThreeFourFive) { EXPECT_DOUBLE_EQ(distance_l(ActionVec{0.0, 0.0}, ActionVec{3.0, 4.0}), 5.0); }

TEST(Distance, DimensionMismatchThrows) {
  EXPECT_THROW(distance_l(ActionVec{0.0}, ActionVec{0.0, 1.0}), ContractViolation);
}

TEST(Distance, SmallGapInsideSliderRadius) {
  EXPECT_NEAR(distance_l(ActionVec{0.5}, ActionVec{0.44}), 0.06, 1e-12);
  const auto t = constant_target(ActionVec{0.5}, 0.0625);
  EXPECT_TRUE(t.in_target_space(1, StateVec{0.0}, ActionVec{0.44}));
}

TEST(TargetSpace, TargetActionItselfIsInside) {
  const auto t = constant_target(ActionVec{0.25, -0.5}, 0.1);
  EXPECT_TRUE(t.in_target_space(3, StateVec{1.0, 1.0}, ActionVec{0.25, -0.5}));
}

TEST(TargetSpace, BallIsClosed) {
  const auto t = constant_target(ActionVec{0.0}, 0.0625);
  EXPECT_TRUE(t.in_target_space(1, StateVec{0.0}, ActionVec{0.0625}));
  EXPECT_TRUE(t.in_target_space(1, StateVec{0.0}, ActionVec{-0.0625}));
}

TEST(TargetSpace, JustOutsideIsOutside) {
  const auto t = constant_target(ActionVec{0.0}, 0.0625);
  EXPECT_FALSE(t.in_target_space(1, StateVec{0.0}, ActionVec{0.0625 + 1e-9}));
}

TEST(TargetSpace, MembershipDependsOnlyOnDistance) {
  Rng rng = make_rng(11, 0);
  for (int i = 0; i < 1000; ++i) {
    const ActionVec center{uniform(rng, -1, 1), uniform(rng, -1, 1)};
    const double radius = uniform(rng, 0.01, 1.0);
    const auto t = constant_target(center, radius);
    const ActionVec a{uniform(rng, -1, 1), uniform(rng, -1, 1)};
    // Rotate a about the center: same distance, different point.
    const double angle = uniform(rng, 0, 6.283185307179586);
    const double dx = a[0] - center[0];
    const double dy = a[1] - center[1];
    const ActionVec b{center[0] + std::cos(angle) * dx - std::sin(angle) * dy,
                      center[1] + std::sin(angle) * dx + std::cos(angle) * dy};
    const double d = distance_l(a, center);
    if (std::abs(d - radius) < 1e-9) continue;
    EXPECT_EQ(t.in_target_space(1, StateVec{0.0}, a), t.in_target_space(1, StateVec{0.0}, b));
    EXPECT_DOUBLE_EQ(distance_l(a, center), distance_l(center, a));
  }
}

TEST(Box, ValidateRejectsEmptyAxis) {
  Box b{{0.0, 1.0}, {1.0, 1.0}};
  EXPECT_THROW(b.validate("test"), ContractViolation);
}

TEST(Box, DiameterAndCenter) {
  Box b{{0.0, 0.0}, {8.0, 6.0}};
  EXPECT_DOUBLE_EQ(b.diameter(), 10.0);
  EXPECT_EQ(b.center(), (std::vector<double>{4.0, 3.0}));
}

TEST(EnvSpec, NormalizeMapsRangeOntoUnitInterval) {
  EnvSpec e{"x", Box{{-1}, {1}}, Box{{-1}, {1}}, 10, -1.0, 1.0};
  EXPECT_DOUBLE_EQ(e.normalize_reward(-1.0), 0.0);
  EXPECT_DOUBLE_EQ(e.normalize_reward(1.0), 1.0);
  EXPECT_DOUBLE_EQ(e.normalize_reward(0.5), 0.75);
}

TEST(EnvSpec, HorizonMustBePositive) {
  EnvSpec e{"x", Box{{-1}, {1}}, Box{{-1}, {1}}, 0, 0.0, 1.0};
  EXPECT_THROW(e.validate(), ContractViolation);
}

StepRecord record(int h, bool attacked, bool in_target, bool terminal = false) {
  StepRecord r;
  r.h = h;
  r.state = StateVec{0.0};
  r.agent_action = ActionVec{0.1};
  r.submitted_action = attacked ? ActionVec{0.9} : ActionVec{0.1};
  r.attacked = attacked;
  r.in_target_space = in_target;
  r.terminal = terminal;
  return r;
}

TEST(Trajectory, AcceptsWellFormedEpisode) {
  Trajectory t{1, {record(1, false, true), record(2, true, false), record(3, false, false, true)}};
  EXPECT_NO_THROW(t.validate(10));
}

TEST(Trajectory, RejectsGapInStepIndices) {
  Trajectory t{1, {record(1, false, true), record(3, false, true)}};
  EXPECT_THROW(t.validate(10), InvariantViolation);
}

TEST(Trajectory, RejectsTerminalBeforeLastStep) {
  Trajectory t{1, {record(1, false, true, true), record(2, false, true)}};
  EXPECT_THROW(t.validate(10), InvariantViolation);
}

TEST(Trajectory, RejectsAttackOnInTargetAction) {
  Trajectory t{1, {record(1, true, true)}};
  EXPECT_THROW(t.validate(10), InvariantViolation);
}

TEST(Trajectory, RejectsSubstitutionWithoutAttackFlag) {
  StepRecord r = record(1, false, false);
  r.submitted_action = ActionVec{0.7};
  Trajectory t{1, {r}};
  EXPECT_THROW(t.validate(10), InvariantViolation);
}

TEST(Trajectory, RejectsEpisodeLongerThanHorizon) {
  Trajectory t{1, {record(1, false, true), record(2, false, true)}};
  EXPECT_THROW(t.validate(1), InvariantViolation);
}

TEST(AttackConfig, RejectsOutOfRangeValues) {
  AttackConfig c;
  c.rho = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = AttackConfig{};
  c.delta1 = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = AttackConfig{};
  c.warmup_episodes = -1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = AttackConfig{};
  c.m_per_axis = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_NO_THROW(AttackConfig{}.validate());
}

constexpr ConfigKey kKeys[] = {
    {"alpha", "1", "a number"},
    {"name", "", "no default"},
    {"flag", "false", "a flag"},
};

TEST(Config, ParsesValuesCommentsAndDefaults) {
  const auto c = KeyValueConfig::parse("# comment\nalpha = 2.5  # trailing\n\nflag=yes\n", kKeys);
  EXPECT_DOUBLE_EQ(c.get_double("alpha"), 2.5);
  EXPECT_TRUE(c.get_bool("flag"));
  EXPECT_FALSE(c.get("name").has_value());
  EXPECT_THROW(c.get_string("name"), ConfigError);
}

TEST(Config, UnknownKeyIsRejectedWithLineNumber) {
  try {
    KeyValueConfig::parse("alpha = 1\nbeta = 2\n", kKeys, "f.cfg");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("f.cfg:2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("beta"), std::string::npos);
  }
}

TEST(Config, MissingEqualsIsRejected) { EXPECT_THROW(KeyValueConfig::parse("alpha 1\n", kKeys), ConfigError); }

TEST(Config, LaterSetWins) {
  auto c = KeyValueConfig::parse("alpha = 1\n", kKeys);
  c.set("alpha=3");
  EXPECT_EQ(c.get_int("alpha"), 3);
}

TEST(Config, TypeErrorsAreConfigErrors) {
  auto c = KeyValueConfig::parse("alpha = x\nflag = maybe\n", kKeys);
  EXPECT_THROW(c.get_double("alpha"), ConfigError);
  EXPECT_THROW(c.get_int("alpha"), ConfigError);
  EXPECT_THROW(c.get_bool("flag"), ConfigError);
}

TEST(Config, RenderListsEffectiveValues) {
  auto c = KeyValueConfig::parse("flag = true\n", kKeys);
  EXPECT_EQ(c.render(), "alpha = 1\nflag = true\n");
}

TEST(Rng, DerivedStreamsAreReproducibleAndDistinct) {
  Rng a = make_rng(42, 1);
  Rng b = make_rng(42, 1);
  Rng c = make_rng(42, 2);
  const auto x = a();
  EXPECT_EQ(x, b());
  EXPECT_NE(x, c());
}

TEST(Rng, UniformStaysInRange) {
  Rng rng = make_rng(5, 0);
  for (int i = 0; i < 10000; ++i) {
    const double u = uniform(rng, -0.7, 0.7);
    ASSERT_GE(u, -0.7);
    ASSERT_LT(u, 0.7);
    ASSERT_LT(uniform_index(rng, 33), 33u);
  }
}

TEST(Rng, StandardNormalHasUnitMoments) {
  Rng rng = make_rng(9, 0);
  double sum = 0.0;
  double sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = standard_normal(rng);
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.02);
}

}  // namespace
}  // namespace adversarl
