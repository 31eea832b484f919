#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "etadp/adp.hpp"
#include "etadp/eso.hpp"
#include "etadp/etm.hpp"

namespace etadp {

struct PlantSettings {
  std::string name = "example1";
  double eta_amplitude = 0.5;
  double eta_frequency = 1.0;
  Vec x0;
  Vec z0;
  // Std-dev of additive Gaussian noise on y; 0 disables it.
  double noise_std = 0.0;
};

struct AdpSettings {
  int basis_degree = 2;
  adp::LearnGains gains;
  std::vector<adp::GridRange> grid;
  // Empty means ones on the quadratic block, zeros on higher-degree terms.
  Vec Wv0;
  Vec Wa0;
  double psi_scale = 100.0;
};

struct EtmSettings {
  etm::EtmConfig cfg;
  // Unset means "equal to dt".
  std::optional<double> tau_min;
  // Unset means estimated over the extrapolation grid at startup.
  std::optional<double> g_max;
  std::optional<double> L_a;
  // Multiplies the threshold; 0 forces an event at every evaluation.
  double threshold_scale = 1.0;
};

struct SimConfig {
  PlantSettings plant;
  double duration = 20.0;
  double dt = 1e-3;
  std::uint64_t seed = 1;
  eso::EsoConfig eso;
  AdpSettings adp;
  EtmSettings etm;
  std::string output_dir;
  double guard_state = 10.0;
  double guard_control = 100.0;
  // Start of the window for the observer error average.
  double eso_settle = 2.0;

  std::size_t step_count() const;
  void validate() const;
};

/// Builtin defaults for "example1", "example2" or "double_integrator".
SimConfig default_config(const std::string& plant_name);

/// Applies one dotted key. Throws ConfigError on unknown keys or bad values.
void apply_setting(SimConfig& cfg, const std::string& key, const std::string& value);

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Parses `key = value` lines; '#' starts a comment.
KeyValues parse_key_values(const std::string& text);

/// Defaults for the `plant` key (example1 if absent), then every other key in
/// file order, then the overrides.
SimConfig build_config(const KeyValues& kv, const KeyValues& overrides = {});

SimConfig load_config(const std::string& path, const KeyValues& overrides = {});

/// Round-trippable text form of the config.
std::string to_text(const SimConfig& cfg);

}  // namespace etadp
