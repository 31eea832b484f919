#include <cmath>
#include <random>

#include "etadp/adp.hpp"
#include "etadp/plant.hpp"
#include "etadp/simulation.hpp"

namespace etadp {

Mat solve_lyapunov(const Mat& A, const Mat& Q) {
  const Eigen::Index n = A.rows();
  const Mat I = Mat::Identity(n, n);
  // vec(A^T P + P A) = (I kron A^T + A^T kron I) vec(P)
  Mat K = Mat::Zero(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      K.block(i * n, j * n, n, n) += I(i, j) * A.transpose();
      K.block(i * n, j * n, n, n) += A(j, i) * I;
    }
  }
  const Vec rhs = -Q.reshaped();
  const Vec p = K.fullPivLu().solve(rhs);
  Mat P = p.reshaped(n, n);
  return 0.5 * (P + P.transpose());
}

KleinmanResult solve_care_kleinman(const Mat& A, const Vec& B, const Mat& Q, double R,
                                   const Eigen::RowVectorXd& K0, double tol, int max_iter) {
  KleinmanResult res;
  Eigen::RowVectorXd K = K0;
  for (int it = 1; it <= max_iter; ++it) {
    const Mat Ac = A - B * K;
    const Mat Qk = Q + K.transpose() * R * K;
    res.P = solve_lyapunov(Ac, Qk);
    res.iterations = it;
    K = (B.transpose() * res.P) / R;
    const Mat are = A.transpose() * res.P + res.P * A -
                    res.P * B * B.transpose() * res.P / R + Q;
    res.residual = are.cwiseAbs().maxCoeff();
    if (!std::isfinite(res.residual)) break;
    if (res.residual <= tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

OracleReport run_lqr_oracle(const SimConfig& cfg) {
  const plant::PlantModel model = plant::make_builtin(cfg.plant.name);
  const int n = model.n;
  if (model.p != 0) throw ConfigError("oracle: plant must be a linear chain without zero dynamics");

  // Recover a^T x and g0 from the nominal fields; reject anything nonlinear.
  Vec a(n);
  for (int j = 0; j < n; ++j) a(j) = model.f0(Vec::Unit(n, j));
  const double g0 = model.g0(Vec::Zero(n));
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> box(-2.0, 2.0);
  for (int trial = 0; trial < 5; ++trial) {
    Vec x(n);
    for (int j = 0; j < n; ++j) x(j) = box(rng);
    const plant::PlantState s{x, Vec(0), 0.0};
    if (std::abs(model.f0(x) - a.dot(x)) > 1e-12 || std::abs(model.g0(x) - g0) > 1e-12 ||
        std::abs(plant::lumped_disturbance(model, s, 1.0)) > 1e-12) {
      throw ConfigError("oracle: plant '" + cfg.plant.name + "' is not a linear chain");
    }
  }

  const Mat A = model.A + model.B * a.transpose();
  const Vec B = g0 * model.B;
  const Mat& Q = cfg.adp.gains.Q;
  const double R = cfg.adp.gains.R;

  // Stabilizing start: place every closed-loop pole at -1, i.e. the last row
  // of A - B K equals -binomial coefficients of (s + 1)^n.
  Eigen::RowVectorXd K0(n);
  for (int j = 0; j < n; ++j) {
    // coefficient of s^j in (s+1)^n
    double c = 1.0;
    for (int i = 0; i < j; ++i) c = c * (n - i) / (i + 1);
    K0(j) = (a(j) + c) / g0;
  }

  OracleReport rep;
  const KleinmanResult kl = solve_care_kleinman(A, B, Q, R, K0);
  rep.P = kl.P;
  rep.iterations = kl.iterations;
  rep.are_residual = kl.residual;
  rep.converged = kl.converged;
  if (!kl.converged) return rep;

  const adp::BasisSet basis = adp::polynomial_basis(n, cfg.adp.basis_degree);
  rep.W_star = adp::quadratic_weights(rep.P, basis.q);

  const plant::NominalDynamics nominal = plant::nominal_of(model, cfg.eso.Mf, cfg.eso.Mg, cfg.eso.g_min);
  const adp::Learner learner(basis, nominal, model.A, model.B, cfg.adp.gains);
  adp::LearnerState exact;
  exact.Wv = rep.W_star;
  exact.Wa = rep.W_star;
  exact.Psi = Mat::Identity(basis.q, basis.q);
  for (int trial = 0; trial < 20; ++trial) {
    Vec x(n);
    for (int j = 0; j < n; ++j) x(j) = box(rng);
    rep.max_hjb_residual = std::max(rep.max_hjb_residual, std::abs(learner.bellman_error(exact, x)));
  }

  const Episode ep = run_episode(cfg);
  rep.Wv_learned = ep.summary.Wv_final;
  rep.Wa_learned = ep.summary.Wa_final;
  for (Eigen::Index i = 0; i < rep.W_star.size(); ++i) {
    const double ref = rep.W_star(i);
    const double err = std::abs(rep.Wv_learned(i) - ref);
    rep.max_rel_weight_error =
        std::max(rep.max_rel_weight_error, ref != 0.0 ? err / std::abs(ref) : err);
  }
  return rep;
}

}  // namespace etadp
