#pragma once

#include "etadp/numkit.hpp"
#include "etadp/plant.hpp"

namespace etadp::eso {

/// High-gain extended state observer settings.
///
/// The observer reconstructs [x_1 ... x_n, x_{n+1}] from y = x_1, where the
/// extra state is the lumped disturbance. Correction gains are l_i / eps^i.
/// Outputs pass through a smooth saturation with per-channel bounds M_i and
/// corner width eps_sat to suppress peaking.
struct EsoConfig {
  Vec L;
  double eps = 0.03;
  Vec M;
  double eps_sat = 0.1;
  double Mf = 7.0;
  double Mg = 7.0;
  // Floor on |g0| wherever it is divided by or multiplied in.
  double g_min = 0.1;

  /// Throws ConfigError unless L is Hurwitz, eps in (0, 1], M > 0 and
  /// eps_sat in (0, 1); `n` is the plant's relative degree.
  void validate(int n) const;
};

struct ObserverState {
  Vec hat_x;
  Vec bar_x;
};

/// Odd C^1 saturation: identity on [0, 1], quadratic blend on [1, 1 + eps_sat],
/// constant 1 + eps_sat / 2 beyond.
double smooth_sat(double v, double eps_sat);

/// d smooth_sat / dv.
double smooth_sat_slope(double v, double eps_sat);

Vec saturate_states(const Vec& hat_x, const EsoConfig& cfg);

ObserverState make_state(const Vec& hat_x, const EsoConfig& cfg);

/// Observer right-hand side. Nominal terms are evaluated at the saturated
/// estimate and clamped by `nominal`; the innovation uses the raw hat_x_1.
Vec eso_derivative(const Vec& hat_x, double y, double u, const plant::NominalDynamics& nominal,
                   const EsoConfig& cfg);

double disturbance_estimate(const ObserverState& obs);

}  // namespace etadp::eso
