#pragma once

#include <span>
#include <vector>

#include "etadp/adp.hpp"
#include "etadp/numkit.hpp"

namespace etadp::etm {

struct EtmConfig {
  double beta = 0.5;
  double g_max = 1.0;
  double L_a = 1.0;
  double w_min = 0.1;
  double tau_min = 1e-3;
  bool enabled = true;

  void validate() const;
};

struct TriggerEvaluation {
  double t = 0.0;
  double e_norm = 0.0;
  double delta = 0.0;
  bool triggered = false;
};

struct TriggerState {
  Vec x_last;
  double u_held = 0.0;
  double t_last = 0.0;
  // one entry per evaluation instant
  std::vector<TriggerEvaluation> evaluations;
  // commit times tau_k
  std::vector<double> event_times;

  std::size_t event_count() const { return event_times.size(); }
};

TriggerState initial_state(const Vec& x0, double u0, double t0);

/// e = x(tau_k) - x(t)
Vec trigger_error(const TriggerState& ts, const Vec& x_now);

/// delta = sqrt(lambda_min(Q) beta / (g_max^2 L_a^2 max(||Wa||, w_min)^2)) ||x||
double threshold(const Vec& x_now, const Vec& Wa, const Mat& Q, const EtmConfig& cfg);

/// ||e||^2 > delta^2 and at least tau_min since the last event. The decision
/// is appended to ts.evaluations either way.
bool should_trigger(TriggerState& ts, double t, const Vec& e, double delta, const EtmConfig& cfg);

/// Logs an evaluation that fires unconditionally (time-triggered baseline,
/// initial instant).
void force_trigger(TriggerState& ts, double t, const Vec& e, double delta);

void commit_event(TriggerState& ts, double t, const Vec& x_now, double u_new);

/// Fraction of evaluation instants with no trigger. Throws MetricError on an
/// empty log.
double update_saving_ratio(std::span<const TriggerEvaluation> log);

/// Smallest gap between consecutive event times; +inf with fewer than two.
double min_inter_event_time(std::span<const double> event_times);

/// max |g0| over the sample set (clamped nominal gain).
double estimate_gain_bound(const plant::NominalDynamics& nominal, std::span<const Vec> samples);

/// Largest spectral norm of the Jacobian of x -> phi_x(x)^T B over the sample
/// set, by central differences with step h.
double estimate_actor_lipschitz(const adp::BasisSet& basis, const Vec& B,
                                std::span<const Vec> samples, double h = 1e-5);

}  // namespace etadp::etm
