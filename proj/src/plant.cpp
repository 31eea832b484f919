#include "etadp/plant.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace etadp::plant {

Mat chain_matrix(int n) {
  Mat a = Mat::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) a(i, i + 1) = 1.0;
  return a;
}

Vec chain_input(int n) {
  Vec b = Vec::Zero(n);
  b(n - 1) = 1.0;
  return b;
}

Eigen::RowVectorXd chain_output(int n) {
  Eigen::RowVectorXd c = Eigen::RowVectorXd::Zero(n);
  c(0) = 1.0;
  return c;
}

namespace {

double checked(double v, const char* field) {
  if (!std::isfinite(v)) {
    throw PlantEvaluationError(field, std::string("plant: non-finite value from ") + field);
  }
  return v;
}

struct Evaluated {
  double f0, g0, df, dg, eta;
};

Evaluated evaluate(const PlantModel& m, const PlantState& s) {
  Evaluated e{};
  e.eta = checked(m.eta ? m.eta(s.t) : 0.0, "eta");
  e.f0 = checked(m.f0(s.x), "f0");
  e.g0 = checked(m.g0(s.x), "g0");
  e.df = checked(m.delta_f ? m.delta_f(s.t, s.x, s.z, e.eta) : 0.0, "delta_f");
  e.dg = checked(m.delta_g ? m.delta_g(s.t, s.x, s.z, e.eta) : 0.0, "delta_g");
  return e;
}

}  // namespace

PlantDerivative plant_derivative(const PlantModel& m, const PlantState& s, double u) {
  if (s.x.size() != m.n || s.z.size() != m.p) {
    throw ArgumentError("plant_derivative: state dimension mismatch for " + m.name);
  }
  if (!std::isfinite(u)) throw PlantEvaluationError("u", "plant: non-finite control input");
  const Evaluated e = evaluate(m, s);

  PlantDerivative d;
  d.dx = m.A * s.x + m.B * ((e.f0 + e.df) + (e.g0 + e.dg) * u);
  if (m.p > 0) {
    d.dz = m.f_z(s.x, s.z, e.eta);
    if (d.dz.size() != m.p || !d.dz.allFinite()) {
      throw PlantEvaluationError("f_z", "plant: zero dynamics returned a bad value");
    }
  } else {
    d.dz = Vec(0);
  }
  return d;
}

double lumped_disturbance(const PlantModel& m, const PlantState& s, double u) {
  if (!std::isfinite(u)) throw PlantEvaluationError("u", "plant: non-finite control input");
  const Evaluated e = evaluate(m, s);
  return e.df + e.dg * u;
}

double output(const PlantModel& m, const Vec& x) { return m.C.dot(x); }

double SineSignal::operator()(double t) const { return amplitude * std::sin(frequency * t); }

namespace {

PlantModel chain_shell(std::string name, int n, int p) {
  PlantModel m;
  m.name = std::move(name);
  m.n = n;
  m.p = p;
  m.A = chain_matrix(n);
  m.B = chain_input(n);
  m.C = chain_output(n);
  m.x0 = Vec::Zero(n);
  m.z0 = Vec::Zero(p);
  return m;
}

}  // namespace

PlantModel example1_plant(ExogenousSignal eta) {
  PlantModel m = chain_shell("example1", 2, 1);
  m.f0 = [](const Vec& x) {
    const double s = std::sin(x(1)) + 2.0;
    return -1.5 * x(0) - x(1) + 1.5 * (x(0) + x(1)) * s * s;
  };
  m.g0 = [](const Vec& x) { return std::cos(x(0)) + 2.0; };
  m.delta_f = [](double, const Vec& x, const Vec& z, double eta) {
    return -x(1) + eta + z(0) * z(0);
  };
  m.delta_g = [](double, const Vec& x, const Vec&, double eta) { return std::sin(x(1)) - eta; };
  m.f_z = [](const Vec& x, const Vec& z, double eta) {
    Vec dz(1);
    dz(0) = -(x(0) * x(0) + 0.5 * eta * eta) * z(0);
    return dz;
  };
  m.eta = std::move(eta);
  m.x0 << 1.0, 0.0;
  m.z0 << 0.1;
  return m;
}

PlantModel example2_plant(ExogenousSignal eta) {
  constexpr double kMass = 0.8;
  constexpr double kLength = 1.2;
  constexpr double kFriction = 0.2;
  constexpr double kGravity = 9.81;
  constexpr double kInertia = kMass * kLength * kLength;

  PlantModel m = chain_shell("example2", 2, 1);
  m.f0 = [](const Vec& x) {
    return -(kGravity / kLength) * std::sin(x(0)) - (kFriction / kInertia) * x(1);
  };
  m.g0 = [](const Vec&) { return 1.0 / kInertia; };
  m.delta_f = [](double t, const Vec& x, const Vec& z, double) {
    return 5.0 * std::exp(-0.3 * t) + 0.5 * std::sin(x(0)) + 0.5 * z(0);
  };
  m.delta_g = [](double, const Vec&, const Vec&, double) { return 0.0; };
  m.f_z = [](const Vec&, const Vec& z, double eta) {
    Vec dz(1);
    dz(0) = 0.5 * eta * z(0);
    return dz;
  };
  m.eta = std::move(eta);
  m.x0 << 0.5, 0.0;
  m.z0 << 0.1;
  return m;
}

PlantModel linear_chain_plant(const Vec& a, double g0) {
  const int n = static_cast<int>(a.size());
  if (n < 1) throw ArgumentError("linear_chain_plant: empty coefficient vector");
  PlantModel m = chain_shell("linear", n, 0);
  m.f0 = [a](const Vec& x) { return a.dot(x); };
  m.g0 = [g0](const Vec&) { return g0; };
  m.delta_f = [](double, const Vec&, const Vec&, double) { return 0.0; };
  m.delta_g = [](double, const Vec&, const Vec&, double) { return 0.0; };
  m.f_z = [](const Vec&, const Vec&, double) { return Vec(0); };
  m.eta = [](double) { return 0.0; };
  m.x0(0) = 1.0;
  return m;
}

PlantModel double_integrator_plant() {
  PlantModel m = linear_chain_plant(Vec::Zero(2), 1.0);
  m.name = "double_integrator";
  return m;
}

PlantModel make_builtin(const std::string& name, const ExogenousSignal& eta) {
  if (name == "example1") return eta ? example1_plant(eta) : example1_plant();
  if (name == "example2") return eta ? example2_plant(eta) : example2_plant();
  if (name == "double_integrator") return double_integrator_plant();
  throw ConfigError("unknown plant '" + name + "' (expected example1, example2, double_integrator)");
}

double estimate_gain_mismatch(const PlantModel& m, const std::vector<DomainPoint>& grid) {
  if (grid.empty()) throw ArgumentError("estimate_gain_mismatch: empty grid");
  double worst = 0.0;
  for (const auto& pt : grid) {
    const double g0 = m.g0(pt.x);
    if (g0 == 0.0) {
      std::ostringstream os;
      os << "estimate_gain_mismatch: g0 vanishes at x=[" << pt.x.transpose() << "]";
      throw DiagnosticError(os.str());
    }
    const double dg = m.delta_g ? m.delta_g(pt.t, pt.x, pt.z, pt.eta) : 0.0;
    worst = std::max(worst, std::abs(dg) / std::abs(g0));
  }
  return worst;
}

double NominalDynamics::f(const Vec& x) const {
  return std::clamp(f0(x), -f_limit, f_limit);
}

double NominalDynamics::g(const Vec& x) const {
  const double raw = g0(x);
  const double mag = std::clamp(std::abs(raw), g_floor, g_limit);
  return raw < 0.0 ? -mag : mag;
}

bool NominalDynamics::g_clamped(const Vec& x) const {
  const double mag = std::abs(g0(x));
  return mag < g_floor || mag > g_limit;
}

NominalDynamics nominal_of(const PlantModel& m, double f_limit, double g_limit, double g_floor) {
  if (!(f_limit > 0.0) || !(g_limit > 0.0) || g_floor < 0.0 || g_floor > g_limit) {
    throw ConfigError("nominal clamps must satisfy Mf > 0, Mg > 0, 0 <= g_min <= Mg");
  }
  return NominalDynamics{m.f0, m.g0, f_limit, g_limit, g_floor};
}

}  // namespace etadp::plant
