#pragma once

#include <functional>
#include <span>
#include <vector>

#include "etadp/eso.hpp"
#include "etadp/numkit.hpp"
#include "etadp/plant.hpp"

namespace etadp::adp {

/// Feature map phi : R^n -> R^q and its q x n Jacobian.
struct BasisSet {
  std::function<Vec(const Vec&)> phi;
  std::function<Mat(const Vec&)> phi_x;
  int q = 0;
  int n = 0;
};

/// Even polynomial basis: every monomial of total degree 2, 4, ..., max_degree.
/// Degree-2 monomials on n = 2 come out as [x1^2, x1 x2, x2^2].
BasisSet polynomial_basis(int n, int max_degree);

/// Maps a symmetric P to the weights W with W^T phi(x) = x^T P x, for the
/// degree-2 block of polynomial_basis(n, d).
Vec quadratic_weights(const Mat& p, int q);

struct LearnGains {
  double rho = 1.0;
  double gamma = 0.5;
  double alpha_v1 = 0.5;
  double alpha_v2 = 3.0;
  double alpha_c1 = 80.0;
  double alpha_c2 = 0.1;
  double delta1 = 120.0;
  Mat Q;
  double R = 1.0;

  void validate(int n) const;
};

struct LearnerState {
  Vec Wv;
  Vec Wa;
  Mat Psi;
  std::vector<Vec> grid;
};

/// Everything the learner needs to know about a single evaluation point.
struct BellmanSample {
  double eps = 0.0;    // HJB residual
  Vec zeta;            // phi_x(x) * closed-loop nominal velocity
  double sigma = 1.0;  // 1 + rho zeta^T Psi zeta
  Mat H;               // phi_x B g0 R^-1 g0 B^T phi_x^T
};

double critic_value(const Vec& Wv, const Vec& x, const BasisSet& basis);

/// u0 = -1/2 R^-1 g0 B^T phi_x(x)^T Wa
double actor_policy(const Vec& Wa, const Vec& x, const BasisSet& basis, double g0_at_x, double R,
                    const Vec& B);

double normalization(const Vec& zeta, const Mat& Psi, double rho);

/// Least-squares gain dynamics with forgetting; frozen (zero) whenever
/// ||Psi||_F exceeds delta1.
Mat psi_derivative(const Mat& Psi, const Vec& zeta, const LearnGains& gains);

Vec critic_derivative(const Mat& Psi, const BellmanSample& now,
                      std::span<const BellmanSample> extrapolated, const LearnGains& gains);

Vec actor_derivative(const Vec& Wv, const Vec& Wa, const BellmanSample& now,
                     std::span<const BellmanSample> extrapolated, const LearnGains& gains);

struct GridRange {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;
};

/// Cartesian product of inclusive progressions lo, lo + step, ..., hi. The
/// last dimension varies fastest.
std::vector<Vec> make_extrapolation_grid(std::span<const GridRange> ranges);

struct ControlOutput {
  double u = 0.0;   // applied input
  double u0 = 0.0;  // learned nominal part
  bool g_clamped = false;
};

/// Actor-critic learner bound to one nominal model and basis.
class Learner {
 public:
  Learner(BasisSet basis, plant::NominalDynamics nominal, Mat A, Vec B, LearnGains gains);

  const BasisSet& basis() const { return basis_; }
  const LearnGains& gains() const { return gains_; }
  const Mat& A() const { return A_; }
  const Vec& B() const { return B_; }
  int n() const { return static_cast<int>(B_.size()); }

  double policy(const Vec& Wa, const Vec& x) const;

  /// zeta = phi_x(x) [A x + B (f0 + g0 u0(x; Wa))]
  Vec regressor(const LearnerState& ls, const Vec& x) const;

  /// HJB residual Wv^T zeta + x^T Q x + R u0^2 with u0 from the actor.
  double bellman_error(const LearnerState& ls, const Vec& x) const;

  BellmanSample sample(const Vec& Wv, const Vec& Wa, const Mat& Psi, const Vec& x) const;

  double bellman_error_instant(const LearnerState& ls, const Vec& x_bar) const {
    return bellman_error(ls, x_bar);
  }
  double bellman_error_extrapolated(const LearnerState& ls, const Vec& xi) const {
    return bellman_error(ls, xi);
  }

  /// Packed derivative of [Wv; Wa; vec(Psi)] with the trajectory point fixed.
  Vec learning_derivative(const Vec& packed, const Vec& x_bar,
                          const std::vector<Vec>& grid) const;

  /// Integrates critic, actor and gain matrix over one step of length dt.
  void train_step(LearnerState& ls, const Vec& x_bar, double dt) const;

  /// u = u0(x_bar; Wa) - x_bar_{n+1} / g0(x_bar)
  ControlOutput composite_control(const LearnerState& ls, const eso::ObserverState& obs) const;

  Vec pack(const LearnerState& ls) const;
  void unpack(const Vec& packed, LearnerState& ls) const;

 private:
  BasisSet basis_;
  plant::NominalDynamics nominal_;
  Mat A_;
  Vec B_;
  LearnGains gains_;
};

}  // namespace etadp::adp
