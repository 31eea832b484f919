#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "etadp/adp.hpp"
#include "etadp/errors.hpp"
#include "etadp/etm.hpp"

namespace etadp::etm {
namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

EtmConfig unit_config() {
  EtmConfig c;
  c.beta = 0.25;
  c.g_max = 1.0;
  c.L_a = 1.0;
  c.w_min = 0.1;
  c.tau_min = 1e-3;
  return c;
}

// Replays the trigger rule along a fixed sampled trajectory.
std::size_t replay(const std::vector<Vec>& xs, double dt, const Vec& Wa, const EtmConfig& cfg) {
  const Mat Q = Mat::Identity(2, 2);
  TriggerState ts = initial_state(xs.front(), 0.0, 0.0);
  force_trigger(ts, 0.0, Vec::Zero(2), 0.0);
  commit_event(ts, 0.0, xs.front(), 0.0);
  for (std::size_t k = 1; k < xs.size(); ++k) {
    const double t = static_cast<double>(k) * dt;
    const Vec e = trigger_error(ts, xs[k]);
    if (should_trigger(ts, t, e, threshold(xs[k], Wa, Q, cfg), cfg)) commit_event(ts, t, xs[k], 0.0);
  }
  return ts.event_count();
}

TEST(TriggerError, Values) {
  TriggerState ts = initial_state(vec({1, 0}), 0.0, 0.0);
  EXPECT_EQ(trigger_error(ts, vec({1, 0})), Vec::Zero(2));
  const Vec e = trigger_error(ts, vec({0.9, 0.2}));
  EXPECT_NEAR(e(0), 0.1, 1e-15);
  EXPECT_NEAR(e(1), -0.2, 1e-15);
  TriggerState swapped = initial_state(vec({0.9, 0.2}), 0.0, 0.0);
  EXPECT_EQ(trigger_error(swapped, vec({1, 0})), -e);
  EXPECT_THROW(trigger_error(ts, Vec::Zero(3)), ArgumentError);
}

TEST(Threshold, Values) {
  const Mat Q = Mat::Identity(2, 2);
  const EtmConfig c = unit_config();
  EXPECT_DOUBLE_EQ(threshold(Vec::Zero(2), vec({1, 0, 0}), Q, c), 0.0);
  EXPECT_DOUBLE_EQ(threshold(vec({2, 0}), vec({1, 0, 0}), Q, c), 1.0);
  EXPECT_DOUBLE_EQ(threshold(vec({2, 0}), vec({2, 0, 0}), Q, c), 0.5);
}

TEST(Threshold, WeightFloor) {
  const Mat Q = Mat::Identity(2, 2);
  const EtmConfig c = unit_config();
  const double at_floor = threshold(vec({1, 0}), vec({0.1, 0, 0}), Q, c);
  EXPECT_DOUBLE_EQ(threshold(vec({1, 0}), Vec::Zero(3), Q, c), at_floor);
  EXPECT_TRUE(std::isfinite(at_floor));
}

TEST(Threshold, UsesSmallestEigenvalueOfQ) {
  Mat Q(2, 2);
  Q << 4.0, 0.0, 0.0, 9.0;
  EXPECT_DOUBLE_EQ(threshold(vec({2, 0}), vec({1, 0, 0}), Q, unit_config()), 2.0);
}

TEST(ShouldTrigger, Decisions) {
  const EtmConfig c = unit_config();
  TriggerState ts = initial_state(vec({0, 0}), 0.0, 0.0);
  EXPECT_FALSE(should_trigger(ts, 1.0, Vec::Zero(2), 0.0, c));
  EXPECT_TRUE(should_trigger(ts, 1.0, vec({1.1, 0}), 1.0, c));
  EXPECT_FALSE(should_trigger(ts, 1.0, vec({1.0, 0}), 1.0, c));
  ts.t_last = 1.0;
  EXPECT_FALSE(should_trigger(ts, 1.0005, vec({10, 0}), 0.1, c));
  EXPECT_EQ(ts.evaluations.size(), 4u);
  EXPECT_TRUE(ts.evaluations[1].triggered);
  EXPECT_DOUBLE_EQ(ts.evaluations[1].e_norm, 1.1);
  EXPECT_DOUBLE_EQ(ts.evaluations[1].delta, 1.0);
}

TEST(ShouldTrigger, StepAlignedGapPasses) {
  const EtmConfig c = unit_config();
  TriggerState ts = initial_state(vec({0, 0}), 0.0, 0.0);
  ts.t_last = 0.1 * 3;
  EXPECT_TRUE(should_trigger(ts, 0.301, vec({1, 0}), 0.0, c));
}

TEST(Commit, ResetsAndCounts) {
  TriggerState ts = initial_state(vec({1, 1}), 0.0, 0.0);
  const Vec x = vec({0.3, -0.4});
  commit_event(ts, 0.25, x, 1.5);
  EXPECT_EQ(ts.event_count(), 1u);
  EXPECT_DOUBLE_EQ(ts.t_last, 0.25);
  EXPECT_DOUBLE_EQ(ts.u_held, 1.5);
  EXPECT_EQ(trigger_error(ts, x).norm(), 0.0);
  commit_event(ts, 0.5, x, 1.0);
  EXPECT_EQ(ts.event_count(), 2u);
}

TEST(Saving, Ratios) {
  std::vector<TriggerEvaluation> log(100);
  for (int k = 0; k < 28; ++k) log[k].triggered = true;
  EXPECT_DOUBLE_EQ(update_saving_ratio(log), 0.72);
  for (auto& ev : log) ev.triggered = true;
  EXPECT_DOUBLE_EQ(update_saving_ratio(log), 0.0);
  EXPECT_THROW(update_saving_ratio(std::vector<TriggerEvaluation>{}), MetricError);
}

TEST(Saving, MinimumGap) {
  const std::vector<double> t{0.0, 0.5, 0.6, 2.0};
  EXPECT_NEAR(min_inter_event_time(t), 0.1, 1e-15);
  EXPECT_TRUE(std::isinf(min_inter_event_time(std::vector<double>{1.0})));
}

TEST(Zeno, GapNeverBelowTauMin) {
  EtmConfig c = unit_config();
  c.tau_min = 0.01;
  TriggerState ts = initial_state(vec({0, 0}), 0.0, 0.0);
  const double dt = 1e-3;
  for (int k = 1; k <= 5000; ++k) {
    const double t = k * dt;
    // threshold zero: fires as often as the gate allows
    if (should_trigger(ts, t, vec({1, 0}), 0.0, c)) commit_event(ts, t, vec({0, 0}), 0.0);
  }
  EXPECT_GE(min_inter_event_time(ts.event_times), c.tau_min - 1e-9);
  EXPECT_NEAR(static_cast<double>(ts.event_count()), 500.0, 1.0);
}

TEST(Sensitivity, LargerBetaNeverAddsEvents) {
  std::vector<Vec> xs;
  const double dt = 1e-3;
  for (int k = 0; k <= 10000; ++k) {
    const double t = k * dt;
    xs.push_back(vec({std::exp(-0.5 * t) * std::cos(3.0 * t) + 0.02 * std::sin(7.0 * t),
                      std::exp(-0.5 * t) * std::sin(3.0 * t)}));
  }
  const Vec Wa = vec({2, 1, 2});
  const Mat Q = Mat::Identity(2, 2);
  std::size_t previous = std::numeric_limits<std::size_t>::max();
  double last_delta = 0.0;
  for (double beta : {0.05, 0.1, 0.25, 0.5, 0.75, 0.95}) {
    EtmConfig c = unit_config();
    c.beta = beta;
    const std::size_t events = replay(xs, dt, Wa, c);
    EXPECT_LE(events, previous) << beta;
    previous = events;
    const double delta = threshold(xs[1234], Wa, Q, c);
    EXPECT_GT(delta, last_delta);
    last_delta = delta;
  }
}

TEST(Bounds, GainBoundOverSamples) {
  plant::NominalDynamics nd;
  nd.f0 = [](const Vec&) { return 0.0; };
  nd.g0 = [](const Vec& x) { return std::cos(x(0)) + 2.0; };
  nd.g_limit = 2.5;
  std::vector<Vec> samples{vec({1, 0}), vec({0, 0})};
  EXPECT_DOUBLE_EQ(estimate_gain_bound(nd, samples), 2.5);
  std::vector<Vec> far{vec({3.0, 0})};
  EXPECT_NEAR(estimate_gain_bound(nd, far), std::cos(3.0) + 2.0, 1e-15);
  EXPECT_THROW(estimate_gain_bound(nd, std::vector<Vec>{}), ArgumentError);
}

TEST(Bounds, ActorLipschitzForQuadraticBasis) {
  // phi_x B = [0, x1, 2 x2]^T has constant Jacobian with spectral norm 2.
  const adp::BasisSet b = adp::polynomial_basis(2, 2);
  std::vector<adp::GridRange> r{{-2, 2, 0.5}, {-2, 2, 0.5}};
  const auto grid = adp::make_extrapolation_grid(r);
  EXPECT_NEAR(estimate_actor_lipschitz(b, plant::chain_input(2), grid), 2.0, 1e-6);
}

TEST(Config, Validation) {
  EtmConfig c = unit_config();
  EXPECT_NO_THROW(c.validate());
  c.beta = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = unit_config();
  c.tau_min = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = unit_config();
  c.w_min = -1.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

}  // namespace
}  // namespace etadp::etm
