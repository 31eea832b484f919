#pragma once

#include <string>
#include <vector>

#include "etadp/config.hpp"
#include "etadp/etm.hpp"

namespace etadp {

/// One logged instant. u, u0, Wv, Wa and Psi are the values in force on
/// [t, t + dt); they only change on rows with triggered == true.
struct TrajectoryRow {
  double t = 0.0;
  Vec x;
  Vec z;
  Vec hat_x;
  Vec bar_x;
  double d = 0.0;  // true lumped disturbance under the applied u
  double u = 0.0;
  double u0 = 0.0;
  double eps_t = 0.0;
  Vec Wv;
  Vec Wa;
  Mat Psi;
  bool triggered = false;
  double J = 0.0;
};

struct TrajectoryRecord {
  int n = 0;
  int p = 0;
  std::vector<TrajectoryRow> rows;
  std::vector<etm::TriggerEvaluation> evaluations;
  std::vector<double> event_times;
};

struct RunSummary {
  double final_state_norm = 0.0;
  double saving_ratio = 0.0;
  std::size_t event_count = 0;
  double cost_total = 0.0;
  double max_control = 0.0;
  double eso_mean_abs_err = 0.0;
  double wall_seconds = 0.0;

  double max_state_norm = 0.0;
  double max_observer_norm = 0.0;
  double max_weight_norm = 0.0;
  double min_inter_event = 0.0;
  double gain_mismatch = 0.0;
  double g_max = 0.0;
  double L_a = 0.0;
  double tau_min = 0.0;
  std::size_t g_clamp_count = 0;
  bool guards_ok = true;
  Vec Wv_final;
  Vec Wa_final;
};

struct Episode {
  TrajectoryRecord record;
  RunSummary summary;
  SimConfig config;
  // False for the partial record carried by EpisodeAborted.
  bool completed = false;
};

/// Raised when a run hits an integration fault; carries everything logged
/// up to the fault.
class EpisodeAborted : public IntegrationFault {
 public:
  EpisodeAborted(const IntegrationFault& cause, Episode partial)
      : IntegrationFault(cause), partial_(std::move(partial)) {}
  const Episode& partial() const { return partial_; }

 private:
  Episode partial_;
};

/// Online loop: observer, trigger check, learning and control update on
/// events, zero-order hold otherwise, plant advance.
Episode run_episode(const SimConfig& cfg);

struct Comparison {
  Episode event_triggered;
  Episode time_triggered;
};

/// Same config twice with the trigger gate on and off.
Comparison run_comparison(const SimConfig& cfg);

struct OracleReport {
  Mat P;                  // Riccati solution
  Vec W_star;             // P mapped onto the quadratic basis
  Vec Wv_learned;
  Vec Wa_learned;
  double max_rel_weight_error = 0.0;
  double max_hjb_residual = 0.0;  // at W_star, over random states
  double are_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Solves the Riccati equation of a linear chain plant by Newton-Kleinman
/// iteration, then trains the learner on the same plant and compares.
OracleReport run_lqr_oracle(const SimConfig& cfg);

struct KleinmanResult {
  Mat P;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

/// Newton-Kleinman iteration for A^T P + P A - P B R^-1 B^T P + Q = 0 from
/// a stabilizing gain K0.
KleinmanResult solve_care_kleinman(const Mat& A, const Vec& B, const Mat& Q, double R,
                                   const Eigen::RowVectorXd& K0, double tol = 1e-10,
                                   int max_iter = 100);

/// Solves A^T P + P A + Q = 0 via the Kronecker form.
Mat solve_lyapunov(const Mat& A, const Mat& Q);

/// Writes trajectory.csv, events.csv, summary.txt, config.cfg and plot.py
/// into `dir`, then a DONE marker if the episode completed.
void emit_outputs(const Episode& ep, const std::string& dir);

/// Writes et/ and tt/ run directories plus compare.csv, compare_summary.txt,
/// plot_compare.py and DONE.
void emit_comparison(const Comparison& cmp, const std::string& dir);

std::string trajectory_header(int n, int p);
std::string summary_text(const RunSummary& s);

}  // namespace etadp
