#include "etadp/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace etadp {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string strip_brackets(std::string s) {
  s = trim(s);
  if (!s.empty() && s.front() == '[') s.erase(0, 1);
  if (!s.empty() && s.back() == ']') s.pop_back();
  return trim(s);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  }
  if (used != s.size() || !std::isfinite(v)) {
    throw ConfigError(key + ": expected a finite number, got '" + text + "'");
  }
  return v;
}

Vec parse_vector(const std::string& key, const std::string& text) {
  std::string body = strip_brackets(text);
  for (char& c : body) {
    if (c == ' ' || c == '\t') c = ',';
  }
  std::vector<double> vals;
  for (const auto& tok : split(body, ',')) {
    if (!tok.empty()) vals.push_back(parse_double(key, tok));
  }
  if (vals.empty()) throw ConfigError(key + ": empty vector");
  return Eigen::Map<Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

Mat parse_matrix(const std::string& key, const std::string& text, int n) {
  const std::string body = strip_brackets(text);
  const auto rows = split(body, ';');
  if (rows.size() == 1 && parse_vector(key, rows[0]).size() == 1) {
    return parse_double(key, rows[0]) * Mat::Identity(n, n);
  }
  Mat m(static_cast<Eigen::Index>(rows.size()), 0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Vec row = parse_vector(key, rows[r]);
    if (r == 0) m.resize(static_cast<Eigen::Index>(rows.size()), row.size());
    if (row.size() != m.cols()) throw ConfigError(key + ": ragged matrix rows");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

std::vector<adp::GridRange> parse_grid(const std::string& key, const std::string& text) {
  std::vector<adp::GridRange> out;
  for (const auto& item : split(strip_brackets(text), ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 3) throw ConfigError(key + ": each axis must be lo:step:hi");
    adp::GridRange r{parse_double(key, parts[0]), parse_double(key, parts[2]),
                     parse_double(key, parts[1])};
    if (!(r.step > 0.0) || r.lo > r.hi) throw ConfigError(key + ": empty axis '" + item + "'");
    out.push_back(r);
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + text + "'");
}

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_vec(const Vec& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt_num(v(i));
  return s + "]";
}

std::string fmt_mat(const Mat& m) {
  std::string s = "[";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (r) s += "; ";
    for (Eigen::Index c = 0; c < m.cols(); ++c) s += (c ? ", " : "") + fmt_num(m(r, c));
  }
  return s + "]";
}

}  // namespace

std::size_t SimConfig::step_count() const {
  return static_cast<std::size_t>(std::llround(duration / dt));
}

void SimConfig::validate() const {
  if (!(duration > 0.0)) throw ConfigError("duration must be positive");
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (duration / dt > 1e7) throw ConfigError("duration/dt exceeds 1e7 steps");
  if (std::abs(duration / dt - static_cast<double>(step_count())) > 1e-6) {
    throw ConfigError("duration must be an integer multiple of dt");
  }
  const plant::PlantModel m = plant::make_builtin(plant.name);
  if (plant.x0.size() != m.n) throw ConfigError("plant.x0 must have n entries");
  if (plant.z0.size() != m.p) throw ConfigError("plant.z0 must have p entries");
  if (plant.noise_std < 0.0) throw ConfigError("plant.noise_std must be non-negative");
  eso.validate(m.n);
  if (adp.grid.size() != static_cast<std::size_t>(m.n)) {
    throw ConfigError("adp.grid needs one axis per state");
  }
  adp.gains.validate(m.n);
  if (!(adp.psi_scale > 0.0)) throw ConfigError("adp.init.Psi_scale must be positive");
  etm::EtmConfig probe = etm.cfg;
  probe.tau_min = etm.tau_min.value_or(dt);
  if (etm.g_max) probe.g_max = *etm.g_max;
  if (etm.L_a) probe.L_a = *etm.L_a;
  probe.validate();
  if (etm.threshold_scale < 0.0) throw ConfigError("etm.threshold_scale must be non-negative");
  if (!(guard_state > 0.0) || !(guard_control > 0.0)) throw ConfigError("guards must be positive");
}

SimConfig default_config(const std::string& plant_name) {
  SimConfig cfg;
  cfg.plant.name = plant_name;
  const plant::PlantModel m = plant::make_builtin(plant_name);
  cfg.plant.x0 = m.x0;
  cfg.plant.z0 = m.z0;

  cfg.eso.L = Vec::Ones(m.n + 1);
  cfg.eso.L << 2.0, 2.0, 1.0;
  cfg.eso.eps = 0.03;
  cfg.eso.eps_sat = 0.1;
  cfg.adp.gains.Q = Mat::Identity(m.n, m.n);

  if (plant_name == "example1") {
    cfg.plant.eta_amplitude = 0.5;
    cfg.plant.eta_frequency = 1.0;
    cfg.eso.M = Vec::Constant(3, 3.0);
    cfg.eso.Mf = 7.0;
    cfg.eso.Mg = 3.0;
    cfg.adp.grid = {{-2.0, 2.0, 0.5}, {-2.0, 2.0, 0.5}};
    // [1,1,1] is not admissible for the linearization at the origin.
    cfg.adp.Wv0 = Vec::Constant(3, 2.0);
    cfg.adp.Wa0 = Vec::Constant(3, 2.0);
  } else if (plant_name == "example2") {
    cfg.plant.eta_amplitude = 0.2;
    cfg.plant.eta_frequency = 0.5;
    cfg.eso.M = Vec(3);
    cfg.eso.M << 1.0, 1.0, 3.0;
    cfg.eso.Mf = 7.0;
    cfg.eso.Mg = 7.0;
    cfg.adp.grid = {{-2.0, 2.0, 0.5}, {-5.0, 5.0, 1.0}};
  } else {
    cfg.plant.eta_amplitude = 0.0;
    cfg.eso.M = Vec::Constant(3, 5.0);
    cfg.eso.Mf = 1e3;
    cfg.eso.Mg = 1e3;
    cfg.adp.grid = {{-2.0, 2.0, 0.5}, {-2.0, 2.0, 0.5}};
    cfg.etm.cfg.enabled = false;
  }
  return cfg;
}

void apply_setting(SimConfig& cfg, const std::string& raw_key, const std::string& value) {
  const std::string key = trim(raw_key);
  const int n = static_cast<int>(cfg.plant.x0.size());
  auto& g = cfg.adp.gains;

  if (key == "plant") {
    if (trim(value) != cfg.plant.name) {
      throw ConfigError("plant must be set before any other key (use build_config)");
    }
  } else if (key == "plant.eta_amplitude") {
    cfg.plant.eta_amplitude = parse_double(key, value);
  } else if (key == "plant.eta_frequency") {
    cfg.plant.eta_frequency = parse_double(key, value);
  } else if (key == "plant.x0") {
    cfg.plant.x0 = parse_vector(key, value);
  } else if (key == "plant.z0") {
    cfg.plant.z0 = parse_vector(key, value);
  } else if (key == "plant.noise_std") {
    cfg.plant.noise_std = parse_double(key, value);
  } else if (key == "duration") {
    cfg.duration = parse_double(key, value);
  } else if (key == "dt") {
    cfg.dt = parse_double(key, value);
  } else if (key == "seed") {
    const double s = parse_double(key, value);
    if (s < 0 || s != std::floor(s)) throw ConfigError("seed must be a non-negative integer");
    cfg.seed = static_cast<std::uint64_t>(s);
  } else if (key == "output_dir") {
    cfg.output_dir = trim(value);
  } else if (key == "eso.L") {
    cfg.eso.L = parse_vector(key, value);
  } else if (key == "eso.eps") {
    cfg.eso.eps = parse_double(key, value);
  } else if (key == "eso.M") {
    cfg.eso.M = parse_vector(key, value);
  } else if (key == "eso.eps_sat") {
    cfg.eso.eps_sat = parse_double(key, value);
  } else if (key == "eso.Mf") {
    cfg.eso.Mf = parse_double(key, value);
  } else if (key == "eso.Mg") {
    cfg.eso.Mg = parse_double(key, value);
  } else if (key == "eso.g_min") {
    cfg.eso.g_min = parse_double(key, value);
  } else if (key == "adp.basis_degree") {
    cfg.adp.basis_degree = static_cast<int>(parse_double(key, value));
  } else if (key == "adp.Q") {
    g.Q = parse_matrix(key, value, n);
  } else if (key == "adp.R") {
    g.R = parse_double(key, value);
  } else if (key == "adp.gains.alpha_v1") {
    g.alpha_v1 = parse_double(key, value);
  } else if (key == "adp.gains.alpha_v2") {
    g.alpha_v2 = parse_double(key, value);
  } else if (key == "adp.gains.alpha_c1") {
    g.alpha_c1 = parse_double(key, value);
  } else if (key == "adp.gains.alpha_c2") {
    g.alpha_c2 = parse_double(key, value);
  } else if (key == "adp.gains.gamma") {
    g.gamma = parse_double(key, value);
  } else if (key == "adp.gains.rho") {
    g.rho = parse_double(key, value);
  } else if (key == "adp.gains.delta1") {
    g.delta1 = parse_double(key, value);
  } else if (key == "adp.grid") {
    cfg.adp.grid = parse_grid(key, value);
  } else if (key == "adp.init.Wv") {
    cfg.adp.Wv0 = parse_vector(key, value);
  } else if (key == "adp.init.Wa") {
    cfg.adp.Wa0 = parse_vector(key, value);
  } else if (key == "adp.init.Psi_scale") {
    cfg.adp.psi_scale = parse_double(key, value);
  } else if (key == "etm.beta") {
    cfg.etm.cfg.beta = parse_double(key, value);
  } else if (key == "etm.w_min") {
    cfg.etm.cfg.w_min = parse_double(key, value);
  } else if (key == "etm.tau_min") {
    cfg.etm.tau_min = parse_double(key, value);
  } else if (key == "etm.enabled") {
    cfg.etm.cfg.enabled = parse_bool(key, value);
  } else if (key == "etm.threshold_scale") {
    cfg.etm.threshold_scale = parse_double(key, value);
  } else if (key == "etm.g_max") {
    cfg.etm.g_max = parse_double(key, value);
  } else if (key == "etm.L_a") {
    cfg.etm.L_a = parse_double(key, value);
  } else if (key == "guard.state") {
    cfg.guard_state = parse_double(key, value);
  } else if (key == "guard.control") {
    cfg.guard_control = parse_double(key, value);
  } else if (key == "eso.settle_time") {
    cfg.eso_settle = parse_double(key, value);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return kv;
}

SimConfig build_config(const KeyValues& kv, const KeyValues& overrides) {
  std::string plant_name = "example1";
  for (const auto& [k, v] : kv) {
    if (k == "plant") plant_name = v;
  }
  for (const auto& [k, v] : overrides) {
    if (k == "plant") plant_name = v;
  }
  SimConfig cfg = default_config(plant_name);
  for (const auto& [k, v] : kv) {
    if (k != "plant") apply_setting(cfg, k, v);
  }
  for (const auto& [k, v] : overrides) {
    if (k != "plant") apply_setting(cfg, k, v);
  }
  return cfg;
}

SimConfig load_config(const std::string& path, const KeyValues& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return build_config(parse_key_values(ss.str()), overrides);
}

std::string to_text(const SimConfig& cfg) {
  std::ostringstream os;
  const auto& g = cfg.adp.gains;
  os << "plant = " << cfg.plant.name << "\n"
     << "plant.eta_amplitude = " << fmt_num(cfg.plant.eta_amplitude) << "\n"
     << "plant.eta_frequency = " << fmt_num(cfg.plant.eta_frequency) << "\n"
     << "plant.x0 = " << fmt_vec(cfg.plant.x0) << "\n";
  if (cfg.plant.z0.size() > 0) os << "plant.z0 = " << fmt_vec(cfg.plant.z0) << "\n";
  os << "plant.noise_std = " << fmt_num(cfg.plant.noise_std) << "\n"
     << "duration = " << fmt_num(cfg.duration) << "\n"
     << "dt = " << fmt_num(cfg.dt) << "\n"
     << "seed = " << cfg.seed << "\n";
  if (!cfg.output_dir.empty()) os << "output_dir = " << cfg.output_dir << "\n";
  os << "eso.L = " << fmt_vec(cfg.eso.L) << "\n"
     << "eso.eps = " << fmt_num(cfg.eso.eps) << "\n"
     << "eso.M = " << fmt_vec(cfg.eso.M) << "\n"
     << "eso.eps_sat = " << fmt_num(cfg.eso.eps_sat) << "\n"
     << "eso.Mf = " << fmt_num(cfg.eso.Mf) << "\n"
     << "eso.Mg = " << fmt_num(cfg.eso.Mg) << "\n"
     << "eso.g_min = " << fmt_num(cfg.eso.g_min) << "\n"
     << "eso.settle_time = " << fmt_num(cfg.eso_settle) << "\n"
     << "adp.basis_degree = " << cfg.adp.basis_degree << "\n"
     << "adp.Q = " << fmt_mat(g.Q) << "\n"
     << "adp.R = " << fmt_num(g.R) << "\n"
     << "adp.gains.alpha_v1 = " << fmt_num(g.alpha_v1) << "\n"
     << "adp.gains.alpha_v2 = " << fmt_num(g.alpha_v2) << "\n"
     << "adp.gains.alpha_c1 = " << fmt_num(g.alpha_c1) << "\n"
     << "adp.gains.alpha_c2 = " << fmt_num(g.alpha_c2) << "\n"
     << "adp.gains.gamma = " << fmt_num(g.gamma) << "\n"
     << "adp.gains.rho = " << fmt_num(g.rho) << "\n"
     << "adp.gains.delta1 = " << fmt_num(g.delta1) << "\n";
  os << "adp.grid = ";
  for (std::size_t i = 0; i < cfg.adp.grid.size(); ++i) {
    const auto& r = cfg.adp.grid[i];
    os << (i ? ", " : "") << fmt_num(r.lo) << ":" << fmt_num(r.step) << ":" << fmt_num(r.hi);
  }
  os << "\n";
  if (cfg.adp.Wv0.size() > 0) os << "adp.init.Wv = " << fmt_vec(cfg.adp.Wv0) << "\n";
  if (cfg.adp.Wa0.size() > 0) os << "adp.init.Wa = " << fmt_vec(cfg.adp.Wa0) << "\n";
  os << "adp.init.Psi_scale = " << fmt_num(cfg.adp.psi_scale) << "\n"
     << "etm.enabled = " << (cfg.etm.cfg.enabled ? "true" : "false") << "\n"
     << "etm.beta = " << fmt_num(cfg.etm.cfg.beta) << "\n"
     << "etm.w_min = " << fmt_num(cfg.etm.cfg.w_min) << "\n"
     << "etm.threshold_scale = " << fmt_num(cfg.etm.threshold_scale) << "\n";
  if (cfg.etm.tau_min) os << "etm.tau_min = " << fmt_num(*cfg.etm.tau_min) << "\n";
  if (cfg.etm.g_max) os << "etm.g_max = " << fmt_num(*cfg.etm.g_max) << "\n";
  if (cfg.etm.L_a) os << "etm.L_a = " << fmt_num(*cfg.etm.L_a) << "\n";
  os << "guard.state = " << fmt_num(cfg.guard_state) << "\n"
     << "guard.control = " << fmt_num(cfg.guard_control) << "\n";
  return os.str();
}

}  // namespace etadp
