#include "etadp/eso.hpp"

#include <cmath>

namespace etadp::eso {

void EsoConfig::validate(int n) const {
  if (n < 1) throw ConfigError("eso: relative degree must be positive");
  if (L.size() != n + 1) throw ConfigError("eso.L must have n+1 entries");
  if (!numkit::is_hurwitz(L, n + 1)) throw ConfigError("eso.L does not give a Hurwitz error matrix");
  if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("eso.eps must lie in (0, 1]");
  if (M.size() != n + 1) throw ConfigError("eso.M must have n+1 entries");
  if (!(M.minCoeff() > 0.0)) throw ConfigError("eso.M entries must be positive");
  if (!(eps_sat > 0.0 && eps_sat < 1.0)) throw ConfigError("eso.eps_sat must lie in (0, 1)");
  if (!(Mf > 0.0) || !(Mg > 0.0)) throw ConfigError("eso.Mf and eso.Mg must be positive");
  if (!(g_min > 0.0) || g_min > Mg) throw ConfigError("eso.g_min must lie in (0, Mg]");
}

double smooth_sat(double v, double eps_sat) {
  const double a = std::abs(v);
  double s;
  if (a <= 1.0) {
    s = a;
  } else if (a <= 1.0 + eps_sat) {
    s = a + (a - 1.0) / eps_sat - (a * a - 1.0) / (2.0 * eps_sat);
  } else {
    s = 1.0 + 0.5 * eps_sat;
  }
  return v < 0.0 ? -s : s;
}

double smooth_sat_slope(double v, double eps_sat) {
  const double a = std::abs(v);
  if (a <= 1.0) return 1.0;
  if (a <= 1.0 + eps_sat) return 1.0 + (1.0 - a) / eps_sat;
  return 0.0;
}

Vec saturate_states(const Vec& hat_x, const EsoConfig& cfg) {
  if (hat_x.size() != cfg.M.size()) throw ArgumentError("saturate_states: dimension mismatch");
  Vec bar(hat_x.size());
  for (Eigen::Index i = 0; i < hat_x.size(); ++i) {
    bar(i) = cfg.M(i) * smooth_sat(hat_x(i) / cfg.M(i), cfg.eps_sat);
  }
  return bar;
}

ObserverState make_state(const Vec& hat_x, const EsoConfig& cfg) {
  return ObserverState{hat_x, saturate_states(hat_x, cfg)};
}

Vec eso_derivative(const Vec& hat_x, double y, double u, const plant::NominalDynamics& nominal,
                   const EsoConfig& cfg) {
  const Eigen::Index m = hat_x.size();
  const Eigen::Index n = m - 1;
  const double innovation = y - hat_x(0);
  if (!std::isfinite(innovation)) throw ObserverFault("eso: non-finite innovation");

  const Vec bar = saturate_states(hat_x, cfg);
  const Vec xs = bar.head(n);

  Vec d(m);
  double scale = 1.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    scale *= cfg.eps;
    const double correction = cfg.L(i) / scale * innovation;
    d(i) = (i + 1 < m ? hat_x(i + 1) : 0.0) + correction;
  }
  d(n - 1) += nominal.f(xs) + nominal.g(xs) * u;
  return d;
}

double disturbance_estimate(const ObserverState& obs) { return obs.bar_x(obs.bar_x.size() - 1); }

}  // namespace etadp::eso
