// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "etadp/adp.hpp"
#include "etadp/config.hpp"
#include "etadp/eso.hpp"
#include "etadp/numkit.hpp"
#include "etadp/simulation.hpp"

namespace fs = std::filesystem;
using etadp::Mat;
using etadp::Vec;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Outcome {
  int id;
  std::string name;
  Verdict verdict;
  double seconds;
  double budget;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome timed(int id, const std::string& name, double budget, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {id, name, v, s, budget};
}

bool roots_in_open_lhp(const Vec& l) {
  const auto k = l.size();
  Mat comp = Mat::Zero(k, k);
  for (Eigen::Index j = 0; j < k; ++j) comp(0, j) = -l(j);
  for (Eigen::Index i = 1; i < k; ++i) comp(i, i - 1) = 1.0;
  Eigen::EigenSolver<Mat> es(comp, false);
  for (Eigen::Index i = 0; i < k; ++i) {
    if (es.eigenvalues()(i).real() >= 0.0) return false;
  }
  return true;
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ZOH and MIET on one run's log.
Verdict check_hold(const etadp::Episode& ep, const std::string& label) {
  const auto& rows = ep.record.rows;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (rows[k].triggered) continue;
    if (rows[k].u != rows[k - 1].u || rows[k].Wv != rows[k - 1].Wv ||
        rows[k].Wa != rows[k - 1].Wa || rows[k].Psi != rows[k - 1].Psi) {
      return {false, fmt("%s: held values changed at t=%.3f", label.c_str(), rows[k].t)};
    }
  }
  const double gap = ep.summary.min_inter_event;
  if (gap < ep.summary.tau_min - 1e-9) {
    return {false, fmt("%s: gap %.3g < tau_min %.3g", label.c_str(), gap, ep.summary.tau_min)};
  }
  return {true, fmt("%s gap %.3g", label.c_str(), gap)};
}

struct ExampleRuns {
  etadp::Episode et;
  etadp::Episode tt;
  etadp::Episode zero_threshold;
};

}  // namespace

int main() {
  const fs::path scratch = fs::temp_directory_path() / "etadp_acceptance";
  fs::remove_all(scratch);
  std::vector<Outcome> results;

  results.push_back(timed(1, "Hurwitz gate", 1.0, [] {
    Vec good(3), a(3), b(3);
    good << 2, 2, 1;
    a << 0, 0, 1;
    b << 1, 1, 1;
    const bool ok = etadp::numkit::is_hurwitz(good, 3) && !etadp::numkit::is_hurwitz(a, 3) &&
                    !etadp::numkit::is_hurwitz(b, 3) && roots_in_open_lhp(good) &&
                    !roots_in_open_lhp(a);
    return Verdict{ok, "[2,2,1] accepted, [0,0,1] and [1,1,1] rejected"};
  }));

  results.push_back(timed(2, "Saturation suite", 1.0, [] {
    const double eps_sat = 0.1;
    const double h = 1e-6;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    double min_slope = 1e9, max_slope = -1e9, max_gap = 0.0;
    for (int k = 0; k < 10000; ++k) {
      const double v = u(rng);
      const double s = (etadp::eso::smooth_sat(v + h, eps_sat) - etadp::eso::smooth_sat(v, eps_sat)) / h;
      min_slope = std::min(min_slope, s);
      max_slope = std::max(max_slope, s);
      max_gap = std::max(max_gap, std::abs(etadp::eso::smooth_sat(v, eps_sat) - std::clamp(v, -1.0, 1.0)));
    }
    double branch = 0.0;
    for (double p : {1.0, 1.0 + eps_sat}) {
      const double hb = 1e-8;
      const double left = (etadp::eso::smooth_sat(p, eps_sat) - etadp::eso::smooth_sat(p - hb, eps_sat)) / hb;
      const double right = (etadp::eso::smooth_sat(p + hb, eps_sat) - etadp::eso::smooth_sat(p, eps_sat)) / hb;
      branch = std::max(branch, std::abs(left - right));
    }
    // a decreasing difference quotient would show up as a negative slope
    const bool ok = min_slope >= -1e-9 && max_slope <= 1.0 + 1e-6 &&
                    max_gap <= eps_sat / 2.0 + 1e-12 && branch <= 1e-6;
    return Verdict{ok, fmt("slope in [%.3g, %.6f], |s-sat| <= %.4f, branch mismatch %.2e", min_slope,
                           max_slope, max_gap, branch)};
  }));

  results.push_back(timed(3, "RK4 order", 1.0, [] {
    auto err = [](double dt) {
      etadp::numkit::DynamicsField f = [](double, const Vec& x) { return Vec(x); };
      Vec x = Vec::Ones(1);
      const int steps = static_cast<int>(std::lround(1.0 / dt));
      for (int k = 0; k < steps; ++k) x = etadp::numkit::rk4_step(f, k * dt, x, dt);
      return std::abs(x(0) - std::exp(1.0));
    };
    const double e1 = err(1e-2), e2 = err(5e-3), e3 = err(2.5e-3);
    const double p1 = std::log2(e1 / e2), p2 = std::log2(e2 / e3);
    const bool ok = p1 >= 3.8 && p1 <= 4.2 && p2 >= 3.8 && p2 <= 4.2;
    return Verdict{ok, fmt("observed orders %.4f, %.4f", p1, p2)};
  }));

  results.push_back(timed(4, "LQR oracle", 30.0, [] {
    const etadp::OracleReport r = etadp::run_lqr_oracle(etadp::default_config("double_integrator"));
    const bool ok = r.converged && r.max_hjb_residual <= 1e-8 && r.max_rel_weight_error <= 0.05;
    return Verdict{ok, fmt("HJB residual %.2e, Wv = [%.4f, %.4f, %.4f], max rel err %.2e",
                           r.max_hjb_residual, r.Wv_learned(0), r.Wv_learned(1), r.Wv_learned(2),
                           r.max_rel_weight_error)};
  }));

  results.push_back(timed(5, "ESO tracking (example2)", 30.0, [] {
    etadp::SimConfig cfg = etadp::default_config("example2");
    cfg.eso.eps = 0.03;
    cfg.eso.L << 2, 2, 1;
    cfg.duration = 10.0;
    const etadp::Episode ep = etadp::run_episode(cfg);
    double sum = 0.0, worst_state = 0.0;
    int count = 0;
    for (const auto& row : ep.record.rows) {
      if (row.t < 2.0 - 1e-12) continue;
      sum += std::abs(row.d - row.hat_x(2));
      ++count;
      for (int i = 0; i < 2; ++i) worst_state = std::max(worst_state, std::abs(row.x(i) - row.hat_x(i)));
    }
    const double mean = sum / count;
    return Verdict{mean <= 0.1 && worst_state <= 0.05,
                   fmt("mean |d - xhat3| = %.4f, max |x - xhat| = %.4f", mean, worst_state)};
  }));

  ExampleRuns runs[2];
  const char* names[2] = {"example1", "example2"};
  for (int i = 0; i < 2; ++i) {
    const etadp::SimConfig cfg = etadp::default_config(names[i]);
    results.push_back(timed(6, fmt("Stabilization (%s)", names[i]), 60.0, [&] {
      runs[i].et = etadp::run_episode(cfg);
      const auto& s = runs[i].et.summary;
      return Verdict{s.final_state_norm <= 0.05 && s.guards_ok,
                     fmt("|x(20)| = %.4g, max |x| = %.3g, max |u| = %.3g", s.final_state_norm,
                         s.max_state_norm, s.max_control)};
    }));
  }
  const double anchors[2] = {0.72, 0.56};
  const double lo[2] = {0.50, 0.40};
  const double hi[2] = {0.90, 0.80};
  for (int i = 0; i < 2; ++i) {
    const auto& s = runs[i].et.summary;
    // timed on the run that produced the ratio
    results.push_back({7, fmt("Update saving (%s)", names[i]),
                       {s.saving_ratio >= lo[i] && s.saving_ratio <= hi[i],
                        fmt("ratio %.4f (band [%.2f, %.2f], anchor %.2f), %zu events", s.saving_ratio,
                            lo[i], hi[i], anchors[i], s.event_count)},
                       s.wall_seconds,
                       60.0});
  }

  results.push_back(timed(8, "ET vs TT quality", 120.0, [&] {
    std::string detail;
    bool ok = true;
    for (int i = 0; i < 2; ++i) {
      etadp::SimConfig cfg = etadp::default_config(names[i]);
      cfg.etm.cfg.enabled = false;
      runs[i].tt = etadp::run_episode(cfg);
      const double ratio = runs[i].et.summary.cost_total / runs[i].tt.summary.cost_total;
      ok = ok && ratio <= 1.5;

      cfg.etm.cfg.enabled = true;
      cfg.etm.threshold_scale = 0.0;
      runs[i].zero_threshold = etadp::run_episode(cfg);
      const fs::path a = scratch / names[i] / "zero";
      const fs::path b = scratch / names[i] / "tt";
      etadp::emit_outputs(runs[i].zero_threshold, a.string());
      etadp::emit_outputs(runs[i].tt, b.string());
      const bool same = slurp(a / "trajectory.csv") == slurp(b / "trajectory.csv");
      ok = ok && same;
      detail += fmt("%sJ_ET/J_TT %.3f (%s), zero threshold %s", i ? "; " : "", ratio, names[i],
                    same ? "== TT" : "!= TT");
    }
    return Verdict{ok, detail};
  }));

  results.push_back(timed(9, "Zeno exclusion + ZOH", 10.0, [&] {
    std::string detail;
    bool ok = true;
    for (int i = 0; i < 2; ++i) {
      for (const auto* ep : {&runs[i].et, &runs[i].tt, &runs[i].zero_threshold}) {
        if (ep->record.rows.empty()) return Verdict{false, "missing run"};
        const std::string label = fmt("%s/%s", names[i],
                                      ep == &runs[i].et ? "ET" : ep == &runs[i].tt ? "TT" : "ET0");
        const Verdict v = check_hold(*ep, label);
        ok = ok && v.pass;
        if (!v.pass || ep == &runs[i].et) detail += (detail.empty() ? "" : ", ") + v.detail;
      }
    }
    return Verdict{ok, detail};
  }));

  results.push_back(timed(10, "Gradient check", 1.0, [] {
    const etadp::adp::BasisSet b = etadp::adp::polynomial_basis(2, 2);
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      Vec x(2);
      x << u(rng), u(rng);
      const Mat jac = b.phi_x(x);
      for (int j = 0; j < 2; ++j) {
        const double h = 1e-5;
        Vec xp = x, xm = x;
        xp(j) += h;
        xm(j) -= h;
        const Vec fd = (b.phi(xp) - b.phi(xm)) / (2.0 * h);
        for (int i = 0; i < b.q; ++i) {
          worst = std::max(worst, std::abs(jac(i, j) - fd(i)) / std::max(1.0, std::abs(fd(i))));
        }
      }
    }
    return Verdict{worst <= 1e-6, fmt("max rel err %.2e over 100 points", worst)};
  }));

  results.push_back(timed(11, "Determinism", 120.0, [&] {
    bool ok = true;
    std::string detail;
    for (int i = 0; i < 2; ++i) {
      const fs::path a = scratch / names[i] / "first";
      const fs::path b = scratch / names[i] / "second";
      etadp::emit_outputs(runs[i].et, a.string());
      etadp::emit_outputs(etadp::run_episode(etadp::default_config(names[i])), b.string());
      const bool same = slurp(a / "trajectory.csv") == slurp(b / "trajectory.csv");
      ok = ok && same;
      detail += fmt("%s%s %s", i ? ", " : "", names[i], same ? "identical" : "differs");
    }
    return Verdict{ok, detail};
  }));

  int failed = 0;
  for (const auto& r : results) {
    const bool in_time = r.seconds < r.budget;
    const bool pass = r.verdict.pass && in_time;
    failed += pass ? 0 : 1;
    std::printf("[%s] %2d %-28s %s (%.2f s%s)\n", pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.verdict.detail.c_str(), r.seconds, in_time ? "" : ", over budget");
  }
  std::printf("%d of %zu checks passed\n", static_cast<int>(results.size()) - failed, results.size());
  fs::remove_all(scratch);
  return failed == 0 ? 0 : 1;
}
