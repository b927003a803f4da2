#include <random>

#include <gtest/gtest.h>

#include "intentgrasp/errors.hpp"
#include "intentgrasp/intent.hpp"

namespace intentgrasp {
namespace {

constexpr TaskSet U{1}, T{2}, H{4}, UT{3}, UH{5}, TH{6}, UTH{7};

std::vector<double> target(std::vector<double> w, const ZoneLayout& layout) {
  return target_vector(joint_events({std::move(w)}), layout).v;
}

double at(const std::vector<double>& v, const ZoneLayout& layout, TaskSet s) { return v.at(layout.index_of(s)); }

/// u(S) written out as a product, independent of the library's loop.
double brute_u(const std::vector<double>& w, std::uint32_t mask) {
  double p = 1.0;
  for (std::size_t i = 0; i < w.size(); ++i) p *= ((mask >> i) & 1u) ? w[i] : 1.0 - w[i];
  return p;
}

TEST(JointEvents, WorkedExample) {
  const auto u = joint_events({{0.88, 0.9, 0.2}});
  EXPECT_NEAR(u[U], 0.0704, 1e-15);
  EXPECT_NEAR(u[UT], 0.6336, 1e-15);
  EXPECT_EQ(u.task_count(), 3u);
}

TEST(JointEvents, DeterministicIntent) {
  const auto u = joint_events({{1.0, 1.0, 1.0}});
  for (std::uint32_t s = 0; s < 8; ++s) EXPECT_EQ(u.u[s], s == 7 ? 1.0 : 0.0);
}

TEST(JointEvents, SumsToOneAndMatchesProducts) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> w(1 + trial % 6);
    for (double& x : w) x = unit(rng);
    const auto u = joint_events({w});
    ASSERT_EQ(u.u.size(), std::size_t{1} << w.size());
    double sum = 0;
    for (std::uint32_t s = 0; s < u.u.size(); ++s) {
      EXPECT_NEAR(u.u[s], brute_u(w, s), 1e-15);
      sum += u.u[s];
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(JointEvents, RejectsOutOfRange) {
  EXPECT_THROW(joint_events({{0.5, 1.2, 0.1}}), ValidationError);
  EXPECT_THROW(joint_events({{-0.01, 0.5}}), ValidationError);
  EXPECT_THROW(joint_events({{}}), ValidationError);
}

TEST(TargetVector, SevenZoneColumns) {
  const ZoneLayout seven = seven_zone_layout();
  const auto single = target({0.9, 0.1, 0.1}, seven);
  EXPECT_NEAR(at(single, seven, U), 0.729 / 0.919, 1e-15);
  EXPECT_NEAR(at(single, seven, U), 0.7933, 5e-5);
  EXPECT_NEAR(at(single, seven, UT), 0.0881, 5e-5);
  EXPECT_NEAR(at(single, seven, UH), 0.0881, 5e-5);
  EXPECT_NEAR(at(single, seven, T), 0.0098, 5e-5);
  EXPECT_NEAR(at(single, seven, H), 0.0098, 5e-5);
  EXPECT_NEAR(at(single, seven, TH), 0.0011, 5e-5);
  EXPECT_NEAR(at(single, seven, UTH), 0.0098, 5e-5);
  EXPECT_NEAR(at(target({0.9, 0.9, 0.1}, seven), seven, UT), 0.7356, 5e-5);
  EXPECT_NEAR(at(target({0.9, 0.9, 0.9}, seven), seven, UTH), 0.7297, 5e-5);
}

TEST(TargetVector, ReducedLayouts) {
  const ZoneLayout five = five_zone_layout();
  const auto v5 = target({0.9, 0.1, 0.9}, five);
  EXPECT_NEAR(at(v5, five, U), 0.081 / 0.181, 1e-15);
  EXPECT_NEAR(at(v5, five, UTH), 0.4475, 5e-5);
  EXPECT_NEAR(at(v5, five, UT), 0.0497, 5e-5);
  EXPECT_NEAR(at(v5, five, TH), 0.0497, 5e-5);
  EXPECT_NEAR(at(v5, five, T), 0.0055, 5e-5);

  const ZoneLayout four = four_zone_layout();
  const auto v4 = target({0.9, 0.1, 0.9}, four);
  EXPECT_NEAR(at(v4, four, T), 0.0100, 1e-12);
  EXPECT_NEAR(at(v4, four, UT), 0.0900, 1e-12);
  EXPECT_NEAR(at(v4, four, TH), 0.0900, 1e-12);
  EXPECT_NEAR(at(v4, four, UTH), 0.8100, 1e-12);
}

TEST(TargetVector, FullLayoutDenominatorIsOneMinusInaction) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  const ZoneLayout seven = seven_zone_layout();
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<double> w{unit(rng), unit(rng), unit(rng)};
    const auto u = joint_events({w});
    const auto tv = target_vector(u, seven);
    EXPECT_DOUBLE_EQ(tv.inaction_probability, u.inaction());
    double sum = 0;
    for (std::size_t k = 0; k < 7; ++k) {
      EXPECT_NEAR(tv.v[k], u[seven.zone(k)] / (1.0 - u.inaction()), 1e-14);
      sum += tv.v[k];
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(TargetVector, ClarificationAndDegenerate) {
  const ZoneLayout seven = seven_zone_layout();
  const auto u = joint_events({{0.1, 0.1, 0.1}});  // inaction 0.729
  try {
    target_vector(u, seven, 0.5);
    FAIL() << "expected ClarificationNeeded";
  } catch (const ClarificationNeeded& e) {
    EXPECT_NEAR(e.inaction_probability(), 0.729, 1e-15);
    EXPECT_EQ(e.threshold(), 0.5);
  }
  EXPECT_NO_THROW(target_vector(u, seven, 0.8));
  EXPECT_NO_THROW(target_vector(u, seven));
  EXPECT_THROW(target_vector(joint_events({{0.0, 0.0, 0.0}}), seven), DegenerateIntent);
  // All mass on {U}, which the Four-Zone layout does not contain.
  EXPECT_THROW(target_vector(joint_events({{1.0, 0.0, 0.0}}), four_zone_layout()), DegenerateIntent);
}

TEST(ReconstructIntent, PublishedColumns) {
  const ZoneLayout seven = seven_zone_layout();
  // Published order H, T, U, TH, UH, UT, UTH mapped onto layout order.
  std::vector<double> p(7);
  p[seven.index_of(H)] = 0.0117;
  p[seven.index_of(T)] = 0.0113;
  p[seven.index_of(U)] = 0.7950;
  p[seven.index_of(TH)] = 0.0023;
  p[seven.index_of(UH)] = 0.0898;
  p[seven.index_of(UT)] = 0.0899;
  p[seven.index_of(UTH)] = 0.0000;
  const auto w = reconstruct_intent(p, seven).w;
  EXPECT_NEAR(w[0], 0.9747, 5e-5);
  EXPECT_NEAR(w[1], 0.1035, 5e-5);
  EXPECT_NEAR(w[2], 0.1038, 5e-5);

  const auto w4 = reconstruct_intent({0.0129, 0.0892, 0.0888, 0.8091}, four_zone_layout()).w;
  EXPECT_NEAR(w4[1], 1.0, 1e-12);
}

TEST(ReconstructIntent, ConcentratedOnUsage) {
  std::vector<double> p(7, 0.0);
  p[0] = 1.0;
  EXPECT_EQ(reconstruct_intent(p, seven_zone_layout()).w, (std::vector<double>{1.0, 0.0, 0.0}));
  EXPECT_THROW(reconstruct_intent({0.5, 0.5}, seven_zone_layout()), DimensionMismatch);
}

TEST(ReconstructIntent, MarginalIdentityAgainstBruteForce) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const ZoneLayout seven = seven_zone_layout();
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<double> w{unit(rng), unit(rng), unit(rng)};
    const auto rec = reconstruct_intent(target(w, seven), seven).w;
    const double inaction = brute_u(w, 0);
    for (std::size_t t = 0; t < 3; ++t) {
      double expected = 0;
      for (std::uint32_t s = 1; s < 8; ++s)
        if ((s >> t) & 1u) expected += brute_u(w, s);
      EXPECT_NEAR(rec[t], expected / (1.0 - inaction), 1e-12);
    }
  }
}

TEST(ReconstructIntent, TaskInEveryZoneReconstructsToOne) {
  std::mt19937_64 rng(21);
  std::gamma_distribution<double> gamma(1.0, 1.0);
  const ZoneLayout four = four_zone_layout();
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> p(4);
    double sum = 0;
    for (double& x : p) sum += (x = gamma(rng));
    for (double& x : p) x /= sum;
    ASSERT_NEAR(reconstruct_intent(p, four).w[1], 1.0, 1e-12);
  }
}

}  // namespace
}  // namespace intentgrasp
