#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "etadp/simulation.hpp"

namespace etadp {

namespace fs = std::filesystem;

namespace {

void put(std::string& line, double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  line.append(buf, static_cast<std::size_t>(len));
}

void put_vec(std::string& line, const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    line += ',';
    put(line, v(i));
  }
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void check(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

const char* kPlotScript = R"PY(#!/usr/bin/env python3
# Regenerates state/estimate, control and event-raster plots from this run.
import csv, sys, os
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
with open(os.path.join(here, "trajectory.csv")) as f:
    rows = list(csv.DictReader(f))
t = [float(r["t"]) for r in rows]
n = sum(1 for k in rows[0] if k.startswith("x") and k[1:].isdigit())

fig, axes = plt.subplots(n + 1, 1, sharex=True, figsize=(7, 2.2 * (n + 1)))
for i in range(n):
    axes[i].plot(t, [float(r[f"x{i+1}"]) for r in rows], label=f"x{i+1}")
    axes[i].plot(t, [float(r[f"xhat{i+1}"]) for r in rows], "--", label=f"xhat{i+1}")
    axes[i].legend(loc="upper right")
axes[n].plot(t, [float(r["d"]) for r in rows], label="lumped disturbance")
axes[n].plot(t, [float(r[f"xhat{n+1}"]) for r in rows], "--", label=f"xhat{n+1}")
axes[n].legend(loc="upper right")
axes[n].set_xlabel("t [s]")
fig.tight_layout()
fig.savefig(os.path.join(here, "states.png"), dpi=150)

fig, ax = plt.subplots(2, 1, sharex=True, figsize=(7, 4))
ax[0].step(t, [float(r["u"]) for r in rows], where="post")
ax[0].set_ylabel("u")
ev = [float(r["t"]) for r in rows if r["triggered"] == "1"]
ax[1].plot(ev, [1] * len(ev), "x", markersize=3)
ax[1].set_yticks([])
ax[1].set_xlabel("t [s]")
fig.tight_layout()
fig.savefig(os.path.join(here, "control_events.png"), dpi=150)
)PY";

const char* kComparePlotScript = R"PY(#!/usr/bin/env python3
# Event-triggered vs time-triggered states and control from compare.csv.
import csv, os
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
with open(os.path.join(here, "compare.csv")) as f:
    rows = list(csv.DictReader(f))
t = [float(r["t"]) for r in rows]
n = sum(1 for k in rows[0] if k.startswith("x") and k.endswith("_et"))
fig, axes = plt.subplots(n + 1, 1, sharex=True, figsize=(7, 2.2 * (n + 1)))
for i in range(n):
    axes[i].plot(t, [float(r[f"x{i+1}_et"]) for r in rows], label="ET")
    axes[i].plot(t, [float(r[f"x{i+1}_tt"]) for r in rows], "r--", label="TT")
    axes[i].set_ylabel(f"x{i+1}")
    axes[i].legend(loc="upper right")
axes[n].step(t, [float(r["u_et"]) for r in rows], where="post", label="ET")
axes[n].step(t, [float(r["u_tt"]) for r in rows], "r--", where="post", label="TT")
axes[n].set_ylabel("u")
axes[n].set_xlabel("t [s]")
axes[n].legend(loc="upper right")
fig.tight_layout()
fig.savefig(os.path.join(here, "compare.png"), dpi=150)
)PY";

}  // namespace

std::string trajectory_header(int n, int p) {
  std::string h = "t";
  for (int i = 1; i <= n; ++i) h += ",x" + std::to_string(i);
  for (int i = 1; i <= p; ++i) h += ",z" + std::to_string(i);
  for (int i = 1; i <= n + 1; ++i) h += ",xhat" + std::to_string(i);
  for (int i = 1; i <= n + 1; ++i) h += ",xbar" + std::to_string(i);
  h += ",d,u,eps_t,Wv_norm,Wa_norm,triggered,J";
  return h;
}

std::string summary_text(const RunSummary& s) {
  std::ostringstream os;
  os.precision(17);
  os << "final_state_norm = " << s.final_state_norm << "\n"
     << "saving_ratio = " << s.saving_ratio << "\n"
     << "event_count = " << s.event_count << "\n"
     << "cost_total = " << s.cost_total << "\n"
     << "max_control = " << s.max_control << "\n"
     << "eso_mean_abs_err = " << s.eso_mean_abs_err << "\n"
     << "wall_seconds = " << s.wall_seconds << "\n"
     << "max_state_norm = " << s.max_state_norm << "\n"
     << "max_observer_norm = " << s.max_observer_norm << "\n"
     << "max_weight_norm = " << s.max_weight_norm << "\n"
     << "min_inter_event = " << s.min_inter_event << "\n"
     << "tau_min = " << s.tau_min << "\n"
     << "g_max = " << s.g_max << "\n"
     << "L_a = " << s.L_a << "\n"
     << "gain_mismatch = " << s.gain_mismatch << "\n"
     << "g_clamp_count = " << s.g_clamp_count << "\n"
     << "guards_ok = " << (s.guards_ok ? "true" : "false") << "\n";
  auto vec = [&](const char* key, const Vec& v) {
    os << key << " = [";
    for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v(i);
    os << "]\n";
  };
  vec("Wv_final", s.Wv_final);
  vec("Wa_final", s.Wa_final);
  return os.str();
}

void emit_outputs(const Episode& ep, const std::string& dir) {
  const fs::path root(dir);
  fs::create_directories(root);
  fs::remove(root / "DONE");
  const TrajectoryRecord& rec = ep.record;

  {
    const fs::path path = root / "trajectory.csv";
    auto out = open_out(path);
    out << trajectory_header(rec.n, rec.p) << "\n";
    std::string line;
    for (const auto& r : rec.rows) {
      line.clear();
      put(line, r.t);
      put_vec(line, r.x);
      put_vec(line, r.z);
      put_vec(line, r.hat_x);
      put_vec(line, r.bar_x);
      for (double v : {r.d, r.u, r.eps_t, r.Wv.norm(), r.Wa.norm()}) {
        line += ',';
        put(line, v);
      }
      line += r.triggered ? ",1," : ",0,";
      put(line, r.J);
      line += '\n';
      out << line;
    }
    check(out, path);
  }
  {
    const fs::path path = root / "events.csv";
    auto out = open_out(path);
    out << "t,e_norm,delta,triggered\n";
    std::string line;
    for (const auto& ev : rec.evaluations) {
      line.clear();
      put(line, ev.t);
      line += ',';
      put(line, ev.e_norm);
      line += ',';
      put(line, ev.delta);
      line += ev.triggered ? ",1\n" : ",0\n";
      out << line;
    }
    check(out, path);
  }
  {
    const fs::path path = root / "summary.txt";
    auto out = open_out(path);
    out << summary_text(ep.summary);
    check(out, path);
  }
  {
    const fs::path path = root / "config.cfg";
    auto out = open_out(path);
    out << to_text(ep.config);
    check(out, path);
  }
  {
    const fs::path path = root / "plot.py";
    auto out = open_out(path);
    out << kPlotScript;
    check(out, path);
  }
  if (ep.completed) std::ofstream(root / "DONE") << "ok\n";
}

void emit_comparison(const Comparison& cmp, const std::string& dir) {
  const fs::path root(dir);
  fs::create_directories(root);
  fs::remove(root / "DONE");
  emit_outputs(cmp.event_triggered, (root / "et").string());
  emit_outputs(cmp.time_triggered, (root / "tt").string());

  const auto& et = cmp.event_triggered.record;
  const auto& tt = cmp.time_triggered.record;
  if (et.rows.size() != tt.rows.size()) throw std::runtime_error("compare: runs have different lengths");
  {
    const fs::path path = root / "compare.csv";
    auto out = open_out(path);
    std::string h = "t";
    for (int i = 1; i <= et.n; ++i) h += ",x" + std::to_string(i) + "_et";
    for (int i = 1; i <= et.n; ++i) h += ",x" + std::to_string(i) + "_tt";
    h += ",u_et,u_tt,triggered_et\n";
    out << h;
    std::string line;
    for (std::size_t k = 0; k < et.rows.size(); ++k) {
      line.clear();
      put(line, et.rows[k].t);
      put_vec(line, et.rows[k].x);
      put_vec(line, tt.rows[k].x);
      line += ',';
      put(line, et.rows[k].u);
      line += ',';
      put(line, tt.rows[k].u);
      line += et.rows[k].triggered ? ",1\n" : ",0\n";
      out << line;
    }
    check(out, path);
  }
  {
    const fs::path path = root / "compare_summary.txt";
    auto out = open_out(path);
    out.precision(17);
    const auto& a = cmp.event_triggered.summary;
    const auto& b = cmp.time_triggered.summary;
    out << "# key = event_triggered, time_triggered\n"
        << "final_state_norm = " << a.final_state_norm << ", " << b.final_state_norm << "\n"
        << "saving_ratio = " << a.saving_ratio << ", " << b.saving_ratio << "\n"
        << "event_count = " << a.event_count << ", " << b.event_count << "\n"
        << "cost_total = " << a.cost_total << ", " << b.cost_total << "\n"
        << "max_control = " << a.max_control << ", " << b.max_control << "\n"
        << "eso_mean_abs_err = " << a.eso_mean_abs_err << ", " << b.eso_mean_abs_err << "\n"
        << "cost_ratio = " << a.cost_total / b.cost_total << "\n";
    check(out, path);
  }
  {
    const fs::path path = root / "plot_compare.py";
    auto out = open_out(path);
    out << kComparePlotScript;
    check(out, path);
  }
  std::ofstream(root / "DONE") << "ok\n";
}

}  // namespace etadp
