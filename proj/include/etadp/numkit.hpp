#pragma once

#include <functional>

#include <Eigen/Dense>

#include "etadp/errors.hpp"

namespace etadp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

namespace numkit {

/// Right-hand side of an autonomous-or-not ODE: (t, state) -> d state / dt.
using DynamicsField = std::function<Vec(double, const Vec&)>;

inline constexpr double kDefaultStep = 1e-3;
inline constexpr double kAbsTol = 1e-9;
inline constexpr double kRelTol = 1e-6;

bool all_finite(const Vec& v);

/// Classical fourth-order Runge-Kutta advance of `state` from t to t + dt.
/// Throws IntegrationFault (carrying t and the stage index) if any stage
/// derivative is non-finite or has the wrong dimension.
Vec rk4_step(const DynamicsField& field, double t, const Vec& state, double dt);

/// Observer error matrix built from the gains L = [l_1 ... l_{n+1}]:
/// first column -L, ones on the superdiagonal, zeros elsewhere.
Mat observer_error_matrix(const Vec& gains);

/// True iff every eigenvalue of observer_error_matrix(gains) has strictly
/// negative real part. Decided with a Routh-Hurwitz array on the
/// characteristic polynomial s^{n+1} + l_1 s^n + ... + l_{n+1}.
bool is_hurwitz(const Vec& gains, int n_plus_1);

/// Smallest eigenvalue of a symmetric matrix (asymmetry above 1e-10 throws).
double min_eigenvalue_sym(const Mat& m);

}  // namespace numkit
}  // namespace etadp
