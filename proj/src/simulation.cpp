#include "etadp/simulation.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include "etadp/adp.hpp"
#include "etadp/eso.hpp"
#include "etadp/plant.hpp"

namespace etadp {

namespace {

// Anything beyond this is treated as divergence rather than a guard breach.
constexpr double kDivergence = 1e6;

Vec initial_weights(const Vec& configured, int q, int n) {
  if (configured.size() > 0) {
    if (configured.size() != q) throw ConfigError("adp.init weights must have q entries");
    return configured;
  }
  Vec w = Vec::Zero(q);
  w.head(n * (n + 1) / 2).setOnes();
  return w;
}

std::vector<plant::DomainPoint> diagnostic_grid(const std::vector<Vec>& xs, int p, double eta_amp) {
  std::vector<plant::DomainPoint> pts;
  const double etas[] = {-std::abs(eta_amp), 0.0, std::abs(eta_amp)};
  for (const Vec& x : xs) {
    for (double eta : etas) pts.push_back({x, Vec::Zero(p), eta, 0.0});
  }
  return pts;
}

}  // namespace

Episode run_episode(const SimConfig& cfg) {
  cfg.validate();
  const auto wall_start = std::chrono::steady_clock::now();

  const plant::PlantModel model = plant::make_builtin(
      cfg.plant.name, plant::SineSignal{cfg.plant.eta_amplitude, cfg.plant.eta_frequency});
  const int n = model.n;
  const int p = model.p;
  const plant::NominalDynamics nominal =
      plant::nominal_of(model, cfg.eso.Mf, cfg.eso.Mg, cfg.eso.g_min);

  adp::BasisSet basis = adp::polynomial_basis(n, cfg.adp.basis_degree);
  const int q = basis.q;
  const adp::Learner learner(basis, nominal, model.A, model.B, cfg.adp.gains);

  adp::LearnerState ls;
  ls.Wv = initial_weights(cfg.adp.Wv0, q, n);
  ls.Wa = initial_weights(cfg.adp.Wa0, q, n);
  ls.Psi = cfg.adp.psi_scale * Mat::Identity(q, q);
  ls.grid = adp::make_extrapolation_grid(cfg.adp.grid);

  etm::EtmConfig etm_cfg = cfg.etm.cfg;
  etm_cfg.tau_min = cfg.etm.tau_min.value_or(cfg.dt);
  etm_cfg.g_max = cfg.etm.g_max.value_or(etm::estimate_gain_bound(nominal, ls.grid));
  etm_cfg.L_a = cfg.etm.L_a.value_or(etm::estimate_actor_lipschitz(basis, model.B, ls.grid));
  etm_cfg.validate();

  Episode ep;
  ep.config = cfg;
  RunSummary& sum = ep.summary;
  sum.g_max = etm_cfg.g_max;
  sum.L_a = etm_cfg.L_a;
  sum.tau_min = etm_cfg.tau_min;
  sum.gain_mismatch = plant::estimate_gain_mismatch(
      model, diagnostic_grid(ls.grid, p, cfg.plant.eta_amplitude));

  TrajectoryRecord& rec = ep.record;
  rec.n = n;
  rec.p = p;
  const std::size_t steps = cfg.step_count();
  rec.rows.reserve(steps + 1);

  // Joint state [x; z; hat_x], integrated synchronously with u held.
  Vec x = cfg.plant.x0;
  Vec z = cfg.plant.z0;
  Vec hat_x = Vec::Zero(n + 1);

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  etm::TriggerState ts = etm::initial_state(hat_x.head(n), 0.0, 0.0);
  double u = 0.0;
  double u0 = 0.0;
  double J = 0.0;
  double eso_err_sum = 0.0;
  std::size_t eso_err_count = 0;
  double eso_err_all = 0.0;

  try {
    for (std::size_t k = 0; k <= steps; ++k) {
      const double t = static_cast<double>(k) * cfg.dt;
      const eso::ObserverState obs = eso::make_state(hat_x, cfg.eso);
      const Vec x_hat_n = hat_x.head(n);
      const Vec x_bar_n = obs.bar_x.head(n);

      const Vec e = etm::trigger_error(ts, x_hat_n);
      const double delta =
          cfg.etm.threshold_scale * etm::threshold(x_hat_n, ls.Wa, cfg.adp.gains.Q, etm_cfg);
      bool triggered;
      if (k == 0 || !etm_cfg.enabled) {
        etm::force_trigger(ts, t, e, delta);
        triggered = true;
      } else {
        triggered = etm::should_trigger(ts, t, e, delta, etm_cfg);
      }

      if (triggered) {
        learner.train_step(ls, x_bar_n, cfg.dt);
        if (!ls.Wv.allFinite() || !ls.Wa.allFinite() || !ls.Psi.allFinite()) {
          throw IntegrationFault("learner weights became non-finite", t, 0);
        }
        const adp::ControlOutput c = learner.composite_control(ls, obs);
        u = c.u;
        u0 = c.u0;
        if (c.g_clamped) ++sum.g_clamp_count;
        etm::commit_event(ts, t, x_hat_n, u);
      }

      const plant::PlantState ps{x, z, t};
      TrajectoryRow row;
      row.t = t;
      row.x = x;
      row.z = z;
      row.hat_x = hat_x;
      row.bar_x = obs.bar_x;
      row.d = plant::lumped_disturbance(model, ps, u);
      row.u = u;
      row.u0 = u0;
      row.eps_t = learner.bellman_error(ls, x_bar_n);
      row.Wv = ls.Wv;
      row.Wa = ls.Wa;
      row.Psi = ls.Psi;
      row.triggered = triggered;
      row.J = J;

      const double est_err = std::abs(row.d - hat_x(n));
      eso_err_all += est_err;
      if (t >= cfg.eso_settle - 1e-12) {
        eso_err_sum += est_err;
        ++eso_err_count;
      }
      sum.max_state_norm = std::max(sum.max_state_norm, x.norm());
      sum.max_observer_norm = std::max(sum.max_observer_norm, hat_x.norm());
      sum.max_control = std::max(sum.max_control, std::abs(u));
      sum.max_weight_norm = std::max({sum.max_weight_norm, ls.Wv.norm(), ls.Wa.norm()});
      rec.rows.push_back(std::move(row));

      if (k == steps) break;

      const double y_noise = cfg.plant.noise_std > 0.0 ? cfg.plant.noise_std * noise(rng) : 0.0;
      Vec joint(n + p + n + 1);
      joint << x, z, hat_x;
      const numkit::DynamicsField field = [&](double tau, const Vec& s) {
        const plant::PlantState st{s.head(n), s.segment(n, p), tau};
        const plant::PlantDerivative pd = plant::plant_derivative(model, st, u);
        const double y = plant::output(model, st.x) + y_noise;
        Vec d(s.size());
        d << pd.dx, pd.dz, eso::eso_derivative(s.tail(n + 1), y, u, nominal, cfg.eso);
        return d;
      };
      const Vec next = numkit::rk4_step(field, t, joint, cfg.dt);
      const Vec x_next = next.head(n);
      if (x_next.norm() > kDivergence || next.tail(n + 1).norm() > kDivergence) {
        throw IntegrationFault("state diverged", t + cfg.dt, 0);
      }

      const auto& Q = cfg.adp.gains.Q;
      J += 0.5 * cfg.dt * (x.dot(Q * x) + x_next.dot(Q * x_next)) +
           cfg.dt * cfg.adp.gains.R * u0 * u0;
      x = x_next;
      z = next.segment(n, p);
      hat_x = next.tail(n + 1);
    }
  } catch (const IntegrationFault& fault) {
    rec.evaluations = ts.evaluations;
    rec.event_times = ts.event_times;
    throw EpisodeAborted(fault, std::move(ep));
  } catch (const PlantEvaluationError& err) {
    rec.evaluations = ts.evaluations;
    rec.event_times = ts.event_times;
    throw EpisodeAborted(IntegrationFault(err.what(), rec.rows.empty() ? 0.0 : rec.rows.back().t, 0),
                         std::move(ep));
  }

  rec.evaluations = std::move(ts.evaluations);
  rec.event_times = std::move(ts.event_times);

  const TrajectoryRow& last = rec.rows.back();
  sum.final_state_norm = last.x.norm();
  sum.saving_ratio = etm::update_saving_ratio(rec.evaluations);
  sum.event_count = rec.event_times.size();
  sum.cost_total = last.J;
  sum.eso_mean_abs_err = eso_err_count > 0 ? eso_err_sum / static_cast<double>(eso_err_count)
                                           : eso_err_all / static_cast<double>(rec.rows.size());
  sum.min_inter_event = etm::min_inter_event_time(rec.event_times);
  sum.guards_ok = sum.max_state_norm <= cfg.guard_state && sum.max_control <= cfg.guard_control;
  sum.Wv_final = ls.Wv;
  sum.Wa_final = ls.Wa;
  sum.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  ep.completed = true;
  return ep;
}

Comparison run_comparison(const SimConfig& cfg) {
  SimConfig et = cfg;
  et.etm.cfg.enabled = true;
  SimConfig tt = cfg;
  tt.etm.cfg.enabled = false;
  return Comparison{run_episode(et), run_episode(tt)};
}

}  // namespace etadp
