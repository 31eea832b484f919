#include "etadp/etm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace etadp::etm {

namespace {
// Slack for comparing step-aligned times.
constexpr double kTimeSlack = 1e-9;
}  // namespace

void EtmConfig::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("etm.beta must lie in (0, 1)");
  if (!(g_max > 0.0) || !(L_a > 0.0)) throw ConfigError("etm g_max and L_a must be positive");
  if (!(w_min > 0.0)) throw ConfigError("etm.w_min must be positive");
  if (!(tau_min > 0.0)) throw ConfigError("etm.tau_min must be positive");
}

TriggerState initial_state(const Vec& x0, double u0, double t0) {
  TriggerState ts;
  ts.x_last = x0;
  ts.u_held = u0;
  ts.t_last = t0;
  return ts;
}

Vec trigger_error(const TriggerState& ts, const Vec& x_now) {
  if (ts.x_last.size() != x_now.size()) throw ArgumentError("trigger_error: dimension mismatch");
  return ts.x_last - x_now;
}

double threshold(const Vec& x_now, const Vec& Wa, const Mat& Q, const EtmConfig& cfg) {
  const double w = std::max(Wa.norm(), cfg.w_min);
  const double lambda = numkit::min_eigenvalue_sym(Q);
  const double denom = cfg.g_max * cfg.g_max * cfg.L_a * cfg.L_a * w * w;
  return std::sqrt(lambda * cfg.beta / denom) * x_now.norm();
}

bool should_trigger(TriggerState& ts, double t, const Vec& e, double delta, const EtmConfig& cfg) {
  const double e_sq = e.squaredNorm();
  const bool gap_ok = (t - ts.t_last) + kTimeSlack >= cfg.tau_min;
  const bool fire = e_sq > delta * delta && gap_ok;
  ts.evaluations.push_back({t, std::sqrt(e_sq), delta, fire});
  return fire;
}

void force_trigger(TriggerState& ts, double t, const Vec& e, double delta) {
  ts.evaluations.push_back({t, e.norm(), delta, true});
}

void commit_event(TriggerState& ts, double t, const Vec& x_now, double u_new) {
  ts.x_last = x_now;
  ts.u_held = u_new;
  ts.t_last = t;
  ts.event_times.push_back(t);
}

double update_saving_ratio(std::span<const TriggerEvaluation> log) {
  if (log.empty()) throw MetricError("update_saving_ratio: empty evaluation log");
  const auto skipped = std::count_if(log.begin(), log.end(),
                                     [](const TriggerEvaluation& ev) { return !ev.triggered; });
  return static_cast<double>(skipped) / static_cast<double>(log.size());
}

double min_inter_event_time(std::span<const double> event_times) {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < event_times.size(); ++k) {
    gap = std::min(gap, event_times[k] - event_times[k - 1]);
  }
  return gap;
}

double estimate_gain_bound(const plant::NominalDynamics& nominal, std::span<const Vec> samples) {
  if (samples.empty()) throw ArgumentError("estimate_gain_bound: no samples");
  double best = 0.0;
  for (const Vec& x : samples) best = std::max(best, std::abs(nominal.g(x)));
  return best;
}

double estimate_actor_lipschitz(const adp::BasisSet& basis, const Vec& B,
                                std::span<const Vec> samples, double h) {
  if (samples.empty()) throw ArgumentError("estimate_actor_lipschitz: no samples");
  const auto n = static_cast<Eigen::Index>(basis.n);
  double best = 0.0;
  for (const Vec& x : samples) {
    Mat jac(basis.q, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      Vec xp = x, xm = x;
      xp(j) += h;
      xm(j) -= h;
      jac.col(j) = (basis.phi_x(xp) * B - basis.phi_x(xm) * B) / (2.0 * h);
    }
    Eigen::JacobiSVD<Mat> svd(jac);
    best = std::max(best, svd.singularValues()(0));
  }
  return best;
}

}  // namespace etadp::etm
