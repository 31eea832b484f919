// Command-line front end: run, compare, oracle, sweep.
//
// Exit codes: 0 success, 2 validation error, 3 integration fault.

#include <cstdlib>
#include <filesystem>
#include <future>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "etadp/config.hpp"
#include "etadp/simulation.hpp"

namespace fs = std::filesystem;
using namespace etadp;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitFault = 3;

KeyValues parse_overrides(const std::vector<std::string>& sets) {
  KeyValues kv;
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
    kv.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  return kv;
}

// A path to a config file, or the name of a builtin plant.
SimConfig resolve_config(const std::string& source, const KeyValues& overrides) {
  if (fs::exists(source)) return load_config(source, overrides);
  if (source == "example1" || source == "example2" || source == "double_integrator") {
    return build_config({{"plant", source}}, overrides);
  }
  throw ConfigError("config '" + source + "' is neither a file nor a builtin plant name");
}

std::string output_root(const SimConfig& cfg, const std::string& flag, const std::string& tag) {
  if (!flag.empty()) return flag;
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  const char* env = std::getenv("ETRL_OUT_DIR");
  const fs::path base = env && *env ? fs::path(env) : fs::path("out");
  return (base / (cfg.plant.name + "_" + tag)).string();
}

void print_summary(const std::string& label, const RunSummary& s) {
  std::cout << label << ": final |x| = " << s.final_state_norm << ", saving = " << s.saving_ratio
            << ", events = " << s.event_count << ", J = " << s.cost_total
            << ", max |u| = " << s.max_control << ", eso err = " << s.eso_mean_abs_err
            << (s.guards_ok ? "" : "  [GUARD EXCEEDED]") << "\n";
}

int run_one(const SimConfig& cfg, const std::string& dir) {
  try {
    const Episode ep = run_episode(cfg);
    emit_outputs(ep, dir);
    print_summary(dir, ep.summary);
    return 0;
  } catch (const EpisodeAborted& ab) {
    std::cerr << "integration fault at t=" << ab.time() << ": " << ab.what() << "\n";
    try {
      emit_outputs(ab.partial(), dir);
    } catch (const std::exception& io) {
      std::cerr << "could not flush partial record: " << io.what() << "\n";
    }
    return kExitFault;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-triggered ESO + actor-critic ADP simulation laboratory"};
  app.require_subcommand(1);

  std::vector<std::string> sets;
  std::string out_dir;

  std::string run_cfg;
  auto* run = app.add_subcommand("run", "Simulate one episode and write CSV outputs");
  run->add_option("config", run_cfg, "Config file or builtin plant name")->required();

  std::string cmp_cfg;
  auto* compare = app.add_subcommand("compare", "Event-triggered vs time-triggered on one config");
  compare->add_option("config", cmp_cfg, "Config file or builtin plant name")->required();

  std::string oracle_cfg = "double_integrator";
  auto* oracle = app.add_subcommand("oracle", "Riccati oracle check on a linear chain plant");
  oracle->add_option("config", oracle_cfg, "Config file or builtin plant name");

  std::string sweep_cfg, sweep_key, sweep_values;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* sweep = app.add_subcommand("sweep", "Run one episode per value of a config key");
  sweep->add_option("config", sweep_cfg, "Config file or builtin plant name")->required();
  sweep->add_option("--key", sweep_key, "Dotted config key to vary")->required();
  sweep->add_option("--values", sweep_values, "Comma-separated values")->required();
  sweep->add_option("--jobs", jobs, "Parallel workers");

  for (auto* sub : {run, compare, oracle, sweep}) {
    sub->add_option("--set", sets, "Override a config key (key=value), repeatable");
    sub->add_option("--out", out_dir, "Output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    const KeyValues overrides = parse_overrides(sets);

    if (*run) {
      const SimConfig cfg = resolve_config(run_cfg, overrides);
      cfg.validate();
      return run_one(cfg, output_root(cfg, out_dir, "run"));
    }

    if (*compare) {
      const SimConfig cfg = resolve_config(cmp_cfg, overrides);
      cfg.validate();
      const std::string dir = output_root(cfg, out_dir, "compare");
      const Comparison cmp = run_comparison(cfg);
      emit_comparison(cmp, dir);
      print_summary("event-triggered", cmp.event_triggered.summary);
      print_summary("time-triggered ", cmp.time_triggered.summary);
      std::cout << "J_ET / J_TT = "
                << cmp.event_triggered.summary.cost_total / cmp.time_triggered.summary.cost_total
                << "\noutputs in " << dir << "\n";
      return 0;
    }

    if (*oracle) {
      const SimConfig cfg = resolve_config(oracle_cfg, overrides);
      cfg.validate();
      const OracleReport rep = run_lqr_oracle(cfg);
      std::cout.precision(10);
      std::cout << "kleinman converged = " << (rep.converged ? "yes" : "no")
                << " after " << rep.iterations << " iterations, ARE residual " << rep.are_residual
                << "\nP* =\n" << rep.P << "\n";
      if (!rep.converged) return 1;
      std::cout << "W* = " << rep.W_star.transpose() << "\n"
                << "learned Wv = " << rep.Wv_learned.transpose() << "\n"
                << "learned Wa = " << rep.Wa_learned.transpose() << "\n"
                << "max relative weight error = " << rep.max_rel_weight_error << "\n"
                << "max HJB residual at W* = " << rep.max_hjb_residual << "\n";
      return 0;
    }

    if (*sweep) {
      const SimConfig base = resolve_config(sweep_cfg, overrides);
      std::vector<std::string> values;
      std::stringstream ss(sweep_values);
      for (std::string v; std::getline(ss, v, ',');) values.push_back(v);
      if (values.empty()) throw ConfigError("--values is empty");

      const std::string root = output_root(base, out_dir, "sweep");
      std::vector<SimConfig> cfgs;
      for (const auto& v : values) {
        SimConfig c = base;
        apply_setting(c, sweep_key, v);
        c.validate();
        cfgs.push_back(std::move(c));
      }

      // share-nothing workers; each run owns its directory
      std::vector<int> codes(cfgs.size(), 0);
      std::size_t next = 0;
      while (next < cfgs.size()) {
        std::vector<std::future<int>> batch;
        for (unsigned w = 0; w < jobs && next < cfgs.size(); ++w, ++next) {
          const std::string dir = (fs::path(root) / (sweep_key + "=" + values[next])).string();
          batch.push_back(std::async(std::launch::async, run_one, cfgs[next], dir));
        }
        for (std::size_t b = 0; b < batch.size(); ++b) codes[next - batch.size() + b] = batch[b].get();
      }
      int worst = 0;
      for (int c : codes) worst = std::max(worst, c);
      return worst;
    }
  } catch (const EpisodeAborted& ab) {
    std::cerr << "integration fault at t=" << ab.time() << ": " << ab.what() << "\n";
    return kExitFault;
  } catch (const IntegrationFault& f) {
    std::cerr << "integration fault: " << f.what() << "\n";
    return kExitFault;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
