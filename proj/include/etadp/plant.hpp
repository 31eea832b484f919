#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "etadp/numkit.hpp"

namespace etadp::plant {

using NominalField = std::function<double(const Vec& x)>;
// Uncertainty terms may depend on time directly (Example 2's decaying bias).
using UncertainField = std::function<double(double t, const Vec& x, const Vec& z, double eta)>;
using ZeroDynamicsField = std::function<Vec(const Vec& x, const Vec& z, double eta)>;
using ExogenousSignal = std::function<double(double t)>;

/// Single-input affine plant in integrator-chain form:
///
///   z' = f_z(x, z, eta)
///   x' = A x + B [ f0(x) + df + (g0(x) + dg) u ]
///   y  = C x = x_1
struct PlantModel {
  std::string name;
  int n = 0;
  int p = 0;
  NominalField f0;
  NominalField g0;
  UncertainField delta_f;
  UncertainField delta_g;
  ZeroDynamicsField f_z;
  ExogenousSignal eta;
  Mat A;
  Vec B;
  Eigen::RowVectorXd C;
  // Default initial conditions; callers may override.
  Vec x0;
  Vec z0;
};

struct PlantState {
  Vec x;
  Vec z;
  double t = 0.0;
};

struct PlantDerivative {
  Vec dx;
  Vec dz;
};

Mat chain_matrix(int n);
Vec chain_input(int n);
Eigen::RowVectorXd chain_output(int n);

PlantDerivative plant_derivative(const PlantModel& m, const PlantState& s, double u);

/// x_{n+1} = df + dg * u, the quantity the observer's extended state tracks.
double lumped_disturbance(const PlantModel& m, const PlantState& s, double u);

double output(const PlantModel& m, const Vec& x);

struct SineSignal {
  double amplitude = 0.0;
  double frequency = 1.0;
  double operator()(double t) const;
};

/// Third-order benchmark (2-dim measured chain plus scalar zero dynamics).
PlantModel example1_plant(ExogenousSignal eta = SineSignal{0.5, 1.0});

/// Inverted pendulum with m = 0.8 kg, l = 1.2 m, b = 0.2, g = 9.81 m/s^2.
PlantModel example2_plant(ExogenousSignal eta = SineSignal{0.2, 0.5});

/// Linear chain x' = A x + B (a^T x + g0 u) with no uncertainty and no zero
/// dynamics. Used by the Riccati oracle.
PlantModel linear_chain_plant(const Vec& a, double g0);

PlantModel double_integrator_plant();

/// Builtin plants by name: "example1", "example2", "double_integrator".
PlantModel make_builtin(const std::string& name, const ExogenousSignal& eta = nullptr);

struct DomainPoint {
  Vec x;
  Vec z;
  double eta = 0.0;
  double t = 0.0;
};

/// max over the grid of |g - g0| / |g0|. Throws DiagnosticError at g0 = 0.
double estimate_gain_mismatch(const PlantModel& m, const std::vector<DomainPoint>& grid);

/// Nominal f0, g0 with magnitude clamps |f0| <= f_limit, |g0| in [g_floor, g_limit].
/// This is the only view of the plant the observer and controller get.
struct NominalDynamics {
  NominalField f0;
  NominalField g0;
  double f_limit = std::numeric_limits<double>::infinity();
  double g_limit = std::numeric_limits<double>::infinity();
  double g_floor = 0.0;

  double f(const Vec& x) const;
  double g(const Vec& x) const;
  // True when g0(x) had to be raised to g_floor or cut to g_limit.
  bool g_clamped(const Vec& x) const;
};

NominalDynamics nominal_of(const PlantModel& m, double f_limit, double g_limit, double g_floor);

}  // namespace etadp::plant
