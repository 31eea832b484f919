#include "etadp/adp.hpp"

#include <cmath>
#include <memory>

namespace etadp::adp {

namespace {

using Exponents = std::vector<int>;

// All exponent tuples of total degree `degree` in `n` variables, first
// variable's exponent descending.
void monomials_of_degree(int n, int degree, Exponents& prefix, std::vector<Exponents>& out) {
  const int var = static_cast<int>(prefix.size());
  if (var == n - 1) {
    prefix.push_back(degree);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int e = degree; e >= 0; --e) {
    prefix.push_back(e);
    monomials_of_degree(n, degree - e, prefix, out);
    prefix.pop_back();
  }
}

double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

}  // namespace

BasisSet polynomial_basis(int n, int max_degree) {
  if (n < 1) throw ArgumentError("polynomial_basis: n must be positive");
  if (max_degree < 2 || max_degree % 2 != 0) {
    throw ArgumentError("polynomial_basis: degree must be an even number >= 2");
  }
  auto exps = std::make_shared<std::vector<Exponents>>();
  for (int d = 2; d <= max_degree; d += 2) {
    Exponents prefix;
    monomials_of_degree(n, d, prefix, *exps);
  }

  BasisSet basis;
  basis.n = n;
  basis.q = static_cast<int>(exps->size());
  basis.phi = [exps, n](const Vec& x) {
    Vec out(static_cast<Eigen::Index>(exps->size()));
    for (std::size_t k = 0; k < exps->size(); ++k) {
      double v = 1.0;
      for (int j = 0; j < n; ++j) v *= ipow(x(j), (*exps)[k][j]);
      out(static_cast<Eigen::Index>(k)) = v;
    }
    return out;
  };
  basis.phi_x = [exps, n](const Vec& x) {
    Mat jac = Mat::Zero(static_cast<Eigen::Index>(exps->size()), n);
    for (std::size_t k = 0; k < exps->size(); ++k) {
      const Exponents& e = (*exps)[k];
      for (int j = 0; j < n; ++j) {
        if (e[j] == 0) continue;
        double v = e[j] * ipow(x(j), e[j] - 1);
        for (int i = 0; i < n; ++i) {
          if (i != j) v *= ipow(x(i), e[i]);
        }
        jac(static_cast<Eigen::Index>(k), j) = v;
      }
    }
    return jac;
  };
  return basis;
}

Vec quadratic_weights(const Mat& p, int q) {
  const Eigen::Index n = p.rows();
  if (p.cols() != n) throw ArgumentError("quadratic_weights: P must be square");
  const Eigen::Index block = n * (n + 1) / 2;
  if (q < block) throw ArgumentError("quadratic_weights: basis too small for P");
  Vec w = Vec::Zero(q);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      w(k++) = (i == j) ? p(i, i) : p(i, j) + p(j, i);
    }
  }
  return w;
}

void LearnGains::validate(int n) const {
  if (!(rho > 0 && gamma > 0 && alpha_v1 > 0 && alpha_v2 > 0 && alpha_c1 > 0 && alpha_c2 > 0 &&
        delta1 > 0 && R > 0)) {
    throw ConfigError("adp gains, delta1 and R must all be strictly positive");
  }
  if (Q.rows() != n || Q.cols() != n) throw ConfigError("adp.Q must be n x n");
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-10) throw ConfigError("adp.Q must be symmetric");
  if (!(numkit::min_eigenvalue_sym(Q) > 0.0)) throw ConfigError("adp.Q must be positive definite");
}

double critic_value(const Vec& Wv, const Vec& x, const BasisSet& basis) {
  return Wv.dot(basis.phi(x));
}

double actor_policy(const Vec& Wa, const Vec& x, const BasisSet& basis, double g0_at_x, double R,
                    const Vec& B) {
  const Vec grad_along_b = basis.phi_x(x) * B;
  return -0.5 / R * g0_at_x * grad_along_b.dot(Wa);
}

double normalization(const Vec& zeta, const Mat& Psi, double rho) {
  return 1.0 + rho * zeta.dot(Psi * zeta);
}

Mat psi_derivative(const Mat& Psi, const Vec& zeta, const LearnGains& gains) {
  if (Psi.norm() > gains.delta1) return Mat::Zero(Psi.rows(), Psi.cols());
  const double sigma = normalization(zeta, Psi, gains.rho);
  const Vec pz = Psi * zeta;
  return gains.gamma * Psi - gains.alpha_v1 * (pz * pz.transpose()) / (sigma * sigma);
}

Vec critic_derivative(const Mat& Psi, const BellmanSample& now,
                      std::span<const BellmanSample> extrapolated, const LearnGains& gains) {
  if (extrapolated.empty()) throw ArgumentError("critic_derivative: empty extrapolation set");
  Vec sum = Vec::Zero(now.zeta.size());
  for (const auto& s : extrapolated) sum += s.zeta / s.sigma * s.eps;
  const double n = static_cast<double>(extrapolated.size());
  return -gains.alpha_v1 * (Psi * now.zeta) / now.sigma * now.eps -
         gains.alpha_v2 / n * (Psi * sum);
}

Vec actor_derivative(const Vec& Wv, const Vec& Wa, const BellmanSample& now,
                     std::span<const BellmanSample> extrapolated, const LearnGains& gains) {
  if (extrapolated.empty()) throw ArgumentError("actor_derivative: empty extrapolation set");
  Vec d = -gains.alpha_c1 * (Wa - Wv) - gains.alpha_c2 * Wa;
  d += gains.alpha_v1 / (4.0 * now.sigma) * (now.H.transpose() * Wa) * now.zeta.dot(Wv);
  const double n = static_cast<double>(extrapolated.size());
  for (const auto& s : extrapolated) {
    d += gains.alpha_v1 / (4.0 * n * s.sigma) * (s.H.transpose() * Wa) * s.zeta.dot(Wv);
  }
  return d;
}

std::vector<Vec> make_extrapolation_grid(std::span<const GridRange> ranges) {
  if (ranges.empty()) throw ArgumentError("make_extrapolation_grid: no ranges");
  std::vector<std::vector<double>> axes;
  for (const auto& r : ranges) {
    if (!(r.step > 0.0) || r.lo > r.hi || !std::isfinite(r.lo) || !std::isfinite(r.hi)) {
      throw ArgumentError("make_extrapolation_grid: empty range");
    }
    const auto count = static_cast<long>(std::floor((r.hi - r.lo) / r.step + 1e-9)) + 1;
    std::vector<double> axis;
    for (long k = 0; k < count; ++k) axis.push_back(r.lo + static_cast<double>(k) * r.step);
    axes.push_back(std::move(axis));
  }

  std::vector<Vec> points;
  const auto dims = static_cast<Eigen::Index>(axes.size());
  std::vector<std::size_t> idx(axes.size(), 0);
  while (true) {
    Vec p(dims);
    for (Eigen::Index d = 0; d < dims; ++d) p(d) = axes[d][idx[d]];
    points.push_back(std::move(p));
    // odometer increment, last axis fastest
    std::size_t d = axes.size();
    while (d > 0) {
      --d;
      if (++idx[d] < axes[d].size()) break;
      idx[d] = 0;
      if (d == 0) return points;
    }
  }
}

Learner::Learner(BasisSet basis, plant::NominalDynamics nominal, Mat A, Vec B, LearnGains gains)
    : basis_(std::move(basis)),
      nominal_(std::move(nominal)),
      A_(std::move(A)),
      B_(std::move(B)),
      gains_(std::move(gains)) {
  if (A_.rows() != basis_.n || A_.cols() != basis_.n || B_.size() != basis_.n) {
    throw ArgumentError("Learner: A, B and basis dimensions disagree");
  }
  gains_.validate(basis_.n);
}

double Learner::policy(const Vec& Wa, const Vec& x) const {
  return actor_policy(Wa, x, basis_, nominal_.g(x), gains_.R, B_);
}

BellmanSample Learner::sample(const Vec& Wv, const Vec& Wa, const Mat& Psi, const Vec& x) const {
  const Mat jac = basis_.phi_x(x);
  const Vec jb = jac * B_;
  const double g = nominal_.g(x);
  const double u0 = -0.5 / gains_.R * g * jb.dot(Wa);
  const Vec velocity = A_ * x + B_ * (nominal_.f(x) + g * u0);

  BellmanSample s;
  s.zeta = jac * velocity;
  s.eps = Wv.dot(s.zeta) + x.dot(gains_.Q * x) + gains_.R * u0 * u0;
  s.sigma = normalization(s.zeta, Psi, gains_.rho);
  s.H = (g * g / gains_.R) * (jb * jb.transpose());
  return s;
}

Vec Learner::regressor(const LearnerState& ls, const Vec& x) const {
  return sample(ls.Wv, ls.Wa, ls.Psi, x).zeta;
}

double Learner::bellman_error(const LearnerState& ls, const Vec& x) const {
  return sample(ls.Wv, ls.Wa, ls.Psi, x).eps;
}

Vec Learner::pack(const LearnerState& ls) const {
  const Eigen::Index q = basis_.q;
  Vec packed(2 * q + q * q);
  packed.head(q) = ls.Wv;
  packed.segment(q, q) = ls.Wa;
  packed.tail(q * q) = ls.Psi.reshaped();
  return packed;
}

void Learner::unpack(const Vec& packed, LearnerState& ls) const {
  const Eigen::Index q = basis_.q;
  ls.Wv = packed.head(q);
  ls.Wa = packed.segment(q, q);
  ls.Psi = packed.tail(q * q).reshaped(q, q);
}

Vec Learner::learning_derivative(const Vec& packed, const Vec& x_bar,
                                 const std::vector<Vec>& grid) const {
  const Eigen::Index q = basis_.q;
  const Vec Wv = packed.head(q);
  const Vec Wa = packed.segment(q, q);
  const Mat Psi = packed.tail(q * q).reshaped(q, q);

  const BellmanSample now = sample(Wv, Wa, Psi, x_bar);
  std::vector<BellmanSample> extrapolated;
  extrapolated.reserve(grid.size());
  for (const Vec& xi : grid) extrapolated.push_back(sample(Wv, Wa, Psi, xi));

  Vec d(packed.size());
  d.head(q) = critic_derivative(Psi, now, extrapolated, gains_);
  d.segment(q, q) = actor_derivative(Wv, Wa, now, extrapolated, gains_);
  d.tail(q * q) = psi_derivative(Psi, now.zeta, gains_).reshaped();
  return d;
}

void Learner::train_step(LearnerState& ls, const Vec& x_bar, double dt) const {
  const numkit::DynamicsField field = [&](double, const Vec& packed) {
    return learning_derivative(packed, x_bar, ls.grid);
  };
  const Vec next = numkit::rk4_step(field, 0.0, pack(ls), dt);
  unpack(next, ls);
  ls.Psi = 0.5 * (ls.Psi + ls.Psi.transpose());
}

ControlOutput Learner::composite_control(const LearnerState& ls,
                                         const eso::ObserverState& obs) const {
  const Eigen::Index n = B_.size();
  const Vec xs = obs.bar_x.head(n);
  const double g = nominal_.g(xs);
  ControlOutput out;
  out.u0 = actor_policy(ls.Wa, xs, basis_, g, gains_.R, B_);
  out.u = out.u0 - eso::disturbance_estimate(obs) / g;
  out.g_clamped = nominal_.g_clamped(xs);
  return out;
}

}  // namespace etadp::adp
