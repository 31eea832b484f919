#include "etadp/numkit.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace etadp::numkit {

bool all_finite(const Vec& v) { return v.allFinite(); }

namespace {

Vec checked_stage(const DynamicsField& field, double t, const Vec& state,
                  int stage, Eigen::Index dim) {
  Vec k = field(t, state);
  if (k.size() != dim) {
    throw IntegrationFault("rk4: field returned dimension " + std::to_string(k.size()) +
                               ", expected " + std::to_string(dim),
                           t, stage);
  }
  if (!k.allFinite()) {
    throw IntegrationFault("rk4: non-finite derivative at t=" + std::to_string(t) +
                               " stage " + std::to_string(stage),
                           t, stage);
  }
  return k;
}

}  // namespace

Vec rk4_step(const DynamicsField& field, double t, const Vec& state, double dt) {
  if (!(dt > 0.0)) throw ArgumentError("rk4_step: dt must be positive");
  if (!state.allFinite()) throw IntegrationFault("rk4_step: non-finite state", t, 0);

  const Eigen::Index dim = state.size();
  const double half = 0.5 * dt;
  const Vec k1 = checked_stage(field, t, state, 1, dim);
  const Vec k2 = checked_stage(field, t + half, state + half * k1, 2, dim);
  const Vec k3 = checked_stage(field, t + half, state + half * k2, 3, dim);
  const Vec k4 = checked_stage(field, t + dt, state + dt * k3, 4, dim);
  return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Mat observer_error_matrix(const Vec& gains) {
  const Eigen::Index m = gains.size();
  if (m < 1) throw ArgumentError("observer_error_matrix: empty gain vector");
  Mat e = Mat::Zero(m, m);
  e.col(0) = -gains;
  for (Eigen::Index i = 0; i + 1 < m; ++i) e(i, i + 1) = 1.0;
  return e;
}

bool is_hurwitz(const Vec& gains, int n_plus_1) {
  if (n_plus_1 < 1 || gains.size() != n_plus_1) {
    throw ArgumentError("is_hurwitz: gain vector has dimension " +
                        std::to_string(gains.size()) + ", expected " +
                        std::to_string(n_plus_1));
  }
  if (!gains.allFinite()) throw ArgumentError("is_hurwitz: non-finite gains");

  // det(sI - E) for the observer error matrix is s^m + l_1 s^{m-1} + ... + l_m.
  const Mat e = observer_error_matrix(gains);
  std::vector<double> coeffs(n_plus_1 + 1);
  coeffs[0] = 1.0;
  for (int i = 0; i < n_plus_1; ++i) coeffs[i + 1] = -e(i, 0);

  // Routh array: strict Hurwitz iff the first column is strictly positive.
  // Any zero in the first column means a root on or right of the axis.
  const std::size_t degree = coeffs.size() - 1;
  const std::size_t width = degree / 2 + 1;
  std::vector<double> upper(width, 0.0), lower(width, 0.0);
  for (std::size_t i = 0; i < width; ++i) {
    if (2 * i <= degree) upper[i] = coeffs[2 * i];
    if (2 * i + 1 <= degree) lower[i] = coeffs[2 * i + 1];
  }
  if (!(upper[0] > 0.0)) return false;
  for (std::size_t row = 1; row <= degree; ++row) {
    if (!(lower[0] > 0.0)) return false;
    std::vector<double> next(width, 0.0);
    for (std::size_t i = 0; i + 1 < width; ++i) {
      next[i] = (lower[0] * upper[i + 1] - upper[0] * lower[i + 1]) / lower[0];
    }
    upper = std::move(lower);
    lower = std::move(next);
  }
  return true;
}

double min_eigenvalue_sym(const Mat& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw ArgumentError("min_eigenvalue_sym: matrix must be square and non-empty");
  }
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw ArgumentError("min_eigenvalue_sym: matrix is not symmetric");
  }
  if (m.rows() == 2) {
    // closed form for the 2x2 case
    const double mean = 0.5 * (m(0, 0) + m(1, 1));
    const double diff = 0.5 * (m(0, 0) - m(1, 1));
    return mean - std::hypot(diff, m(0, 1));
  }
  Eigen::SelfAdjointEigenSolver<Mat> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace etadp::numkit
