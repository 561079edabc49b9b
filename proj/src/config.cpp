#include "ccc/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ccc/errors.hpp"
#include "ccc/presets.hpp"

namespace ccc {

namespace pt = boost::property_tree;

void BoundarySpec::validate() const {
  if (!(x_max > x_min) || !(y_max > y_min)) throw ConfigError("boundary ranges must be increasing");
  if (!(omega_min > 0.0) || !(omega_max > omega_min) || omega_points < 2) {
    throw ConfigError("boundary frequency grid needs 0 < omega_min < omega_max and 2+ points");
  }
  if (K_count == 0) throw ConfigError("wave-number grid is empty (K_count = 0)");
  if (!(Omega_max > 0.0) || Omega_points < 2) throw ConfigError("plant boundary grid is invalid");
}

RunConfig default_config() {
  RunConfig cfg;
  cfg.chain.hvs = {presets::human_driver()};
  cfg.chain.cav = presets::cav(presets::kSafeGains, 0.2, 1);
  cfg.cbf = presets::barrier();
  cfg.envelope = SafetyEnvelope{presets::kSpeedDifferenceBound, presets::kAccelMin,
                                presets::kAccelMax, std::nullopt};
  BrakeResume br;
  br.v_pert = presets::kSpeedPerturbation;
  br.a_brake = presets::kAccelMin;
  br.a_resume = presets::kAccelMax;
  cfg.scenario.head = br;
  cfg.scenario.n_hv = 1;
  cfg.chart.plane = Plane::B1_BN;
  cfg.chart.fixed = presets::kSafeGains.A;
  cfg.boundaries.fixed = presets::kSafeGains.B_head;
  return cfg;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string where(const std::string& section, const std::string& key) { return "[" + section + "] " + key; }

double to_double(const std::string& section, const std::string& key, const std::string& raw) {
  const std::string_view v = trim(raw);
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(where(section, key) + ": expected a number, got '" + raw + "'");
  }
  return out;
}

long to_integer(const std::string& section, const std::string& key, const std::string& raw) {
  const std::string_view v = trim(raw);
  long out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(where(section, key) + ": expected an integer, got '" + raw + "'");
  }
  return out;
}

std::size_t to_count(const std::string& section, const std::string& key, const std::string& raw) {
  const long v = to_integer(section, key, raw);
  if (v < 0) throw ConfigError(where(section, key) + ": must be non-negative");
  return static_cast<std::size_t>(v);
}

bool to_bool(const std::string& section, const std::string& key, const std::string& raw) {
  const std::string v(trim(raw));
  if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "off" || v == "no" || v == "0") return false;
  throw ConfigError(where(section, key) + ": expected true or false, got '" + raw + "'");
}

std::vector<std::string> split_list(const std::string& raw) {
  std::vector<std::string> out;
  std::string_view rest(raw);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = trim(rest.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

/// Index k of a key such as "B3" with the given prefix; nullopt otherwise.
std::optional<int> gain_index(const std::string& key, char prefix) {
  if (key.size() < 2 || key[0] != prefix) return std::nullopt;
  int k = 0;
  auto [ptr, ec] = std::from_chars(key.data() + 1, key.data() + key.size(), k);
  if (ec != std::errc() || ptr != key.data() + key.size() || k < 1) return std::nullopt;
  return k;
}

using Handler = std::function<void(const std::string& key, const std::string& value)>;

void apply_hv_key(HvParams& hv, const std::string& section, const std::string& key,
                  const std::string& value) {
  static const std::map<std::string, double HvParams::*> fields{
      {"A_h", &HvParams::A_h}, {"B_h", &HvParams::B_h},   {"kappa_h", &HvParams::kappa_h},
      {"tau", &HvParams::tau}, {"D_st", &HvParams::D_st}, {"v_max", &HvParams::v_max}};
  const auto it = fields.find(key);
  if (it == fields.end()) throw ConfigError("unknown key " + where(section, key));
  hv.*(it->second) = to_double(section, key, value);
}

struct Pending {
  HvParams shared = presets::human_driver();
  long count = 1;
  std::map<long, std::vector<std::pair<std::string, std::string>>> overrides;
  std::optional<std::vector<int>> connected;
  std::map<int, double> B, C;
  bool B_given = false;
  std::optional<double> v_star;
  std::string profile = "brake-resume";
  std::optional<std::string> data_file;
  bool clamp = false;
  double decel_max = presets::kAccelMin;
  double accel_max = presets::kAccelMax;
};

}  // namespace

RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }

  RunConfig cfg = default_config();
  Pending pend;
  BrakeResume br = std::get<BrakeResume>(cfg.scenario.head);

  auto numbers = [](std::map<std::string, double*> m) { return m; };

  for (const auto& [section, body] : tree) {
    if (!body.data().empty()) throw ConfigError("key '" + section + "' must be inside a section");
    std::map<std::string, double*> reals;
    Handler other;
    if (section == "hv") {
      reals = numbers({{"A_h", &pend.shared.A_h},
                       {"B_h", &pend.shared.B_h},
                       {"kappa_h", &pend.shared.kappa_h},
                       {"tau", &pend.shared.tau},
                       {"D_st", &pend.shared.D_st},
                       {"v_max", &pend.shared.v_max}});
      other = [&](const std::string& k, const std::string& v) {
        if (k != "count") throw ConfigError("unknown key " + where(section, k));
        pend.count = to_integer(section, k, v);
      };
    } else if (section.rfind("hv.", 0) == 0) {
      const long idx = to_integer(section, "section index", section.substr(3));
      other = [&, idx](const std::string& k, const std::string& v) {
        HvParams probe;
        apply_hv_key(probe, section, k, v);  // rejects unknown keys early
        pend.overrides[idx].emplace_back(k, v);
      };
    } else if (section == "cav") {
      CavParams& cav = cfg.chain.cav;
      reals = numbers({{"A", &cav.A},
                       {"kappa", &cav.kappa},
                       {"xi", &cav.xi},
                       {"D_st", &cav.D_st},
                       {"v_max", &cav.v_max}});
      other = [&](const std::string& k, const std::string& v) {
        if (k == "connected") {
          std::vector<int> list;
          for (const auto& item : split_list(v)) {
            list.push_back(static_cast<int>(to_integer(section, k, item)));
          }
          pend.connected = list;
        } else if (auto b = gain_index(k, 'B')) {
          pend.B[*b] = to_double(section, k, v);
          pend.B_given = true;
        } else if (auto c = gain_index(k, 'C')) {
          pend.C[*c] = to_double(section, k, v);
        } else {
          throw ConfigError("unknown key " + where(section, k));
        }
      };
    } else if (section == "cbf") {
      reals = numbers({{"kappa_sf", &cfg.cbf.kappa_sf},
                       {"D_sf", &cfg.cbf.D_sf},
                       {"gamma", &cfg.cbf.gamma},
                       {"gamma_e", &cfg.cbf.gamma_e}});
    } else if (section == "envelope") {
      reals = numbers({{"v_bar", &cfg.envelope.v_bar},
                       {"a_min", &cfg.envelope.a_min},
                       {"a_bar", &cfg.envelope.a_bar}});
      other = [&](const std::string& k, const std::string& v) {
        if (k != "gamma") throw ConfigError("unknown key " + where(section, k));
        cfg.envelope.gamma = to_double(section, k, v);
      };
    } else if (section == "scenario") {
      reals = numbers({{"v_eq", &br.v_eq},
                       {"v_pert", &br.v_pert},
                       {"a_brake", &br.a_brake},
                       {"a_resume", &br.a_resume},
                       {"t_start", &br.t_start},
                       {"t_final", &cfg.scenario.t_final},
                       {"dt", &cfg.scenario.dt},
                       {"decel_max", &pend.decel_max},
                       {"accel_max", &pend.accel_max}});
      other = [&](const std::string& k, const std::string& v) {
        if (k == "v_star") {
          pend.v_star = to_double(section, k, v);
        } else if (k == "profile") {
          pend.profile = std::string(trim(v));
          if (pend.profile != "brake-resume" && pend.profile != "data") {
            throw ConfigError(where(section, k) + ": expected brake-resume or data");
          }
        } else if (k == "data_file") {
          pend.data_file = std::string(trim(v));
        } else if (k == "prescribe_hvs") {
          cfg.prescribe_hvs = to_bool(section, k, v);
        } else if (k == "clamp_input") {
          pend.clamp = to_bool(section, k, v);
        } else if (k == "variants") {
          cfg.variants.clear();
          for (const auto& item : split_list(v)) cfg.variants.push_back(controller_from_string(item));
          if (cfg.variants.empty()) throw ConfigError(where(section, k) + ": empty list");
        } else {
          throw ConfigError("unknown key " + where(section, k));
        }
      };
    } else if (section == "chart") {
      ChartSpec& c = cfg.chart;
      reals = numbers({{"fixed", &c.fixed},
                       {"x_min", &c.x_min},
                       {"x_max", &c.x_max},
                       {"y_min", &c.y_min},
                       {"y_max", &c.y_max},
                       {"omega_min", &c.frequencies.omega_min},
                       {"omega_max", &c.frequencies.omega_max}});
      other = [&](const std::string& k, const std::string& v) {
        if (k == "plane") c.plane = plane_from_string(std::string(trim(v)));
        else if (k == "nx") c.nx = to_count(section, k, v);
        else if (k == "ny") c.ny = to_count(section, k, v);
        else if (k == "omega_points") c.frequencies.points = to_count(section, k, v);
        else if (k == "refine") c.frequencies.refine = to_bool(section, k, v);
        else if (k == "threads") c.threads = static_cast<unsigned>(to_count(section, k, v));
        else throw ConfigError("unknown key " + where(section, k));
      };
    } else if (section == "boundaries") {
      BoundarySpec& b = cfg.boundaries;
      reals = numbers({{"fixed", &b.fixed},
                       {"x_min", &b.x_min},
                       {"x_max", &b.x_max},
                       {"y_min", &b.y_min},
                       {"y_max", &b.y_max},
                       {"omega_min", &b.omega_min},
                       {"omega_max", &b.omega_max},
                       {"Omega_max", &b.Omega_max}});
      other = [&](const std::string& k, const std::string& v) {
        if (k == "plane") b.plane = plane_from_string(std::string(trim(v)));
        else if (k == "omega_points") b.omega_points = to_count(section, k, v);
        else if (k == "K_count") b.K_count = to_count(section, k, v);
        else if (k == "Omega_points") b.Omega_points = to_count(section, k, v);
        else throw ConfigError("unknown key " + where(section, k));
      };
    } else if (section == "output") {
      other = [&](const std::string& k, const std::string& v) {
        if (k != "dir") throw ConfigError("unknown key " + where(section, k));
        const std::filesystem::path p(std::string(trim(v)));
        cfg.output_dir = p.is_absolute() ? p : base_dir / p;
      };
    } else {
      throw ConfigError("unknown section [" + section + "]");
    }

    for (const auto& [key, node] : body) {
      if (!node.empty()) throw ConfigError("nested keys are not supported: " + where(section, key));
      const std::string value = node.data();
      if (auto it = reals.find(key); it != reals.end()) {
        *it->second = to_double(section, key, value);
      } else if (other) {
        other(key, value);
      } else {
        throw ConfigError("unknown key " + where(section, key));
      }
    }
  }

  // Drivers
  if (pend.count < 0) throw ConfigError("[hv] count must be non-negative");
  cfg.chain.hvs.assign(static_cast<std::size_t>(pend.count), pend.shared);
  for (const auto& [idx, entries] : pend.overrides) {
    if (idx < 1 || idx > pend.count) {
      throw ConfigError("[hv." + std::to_string(idx) + "] refers to a driver outside 1.." +
                        std::to_string(pend.count));
    }
    for (const auto& [k, v] : entries) {
      apply_hv_key(cfg.chain.hvs[static_cast<std::size_t>(idx - 1)], "hv." + std::to_string(idx), k, v);
    }
  }
  const int n = static_cast<int>(pend.count);
  cfg.scenario.n_hv = n;

  // Connections and gains
  CavParams& cav = cfg.chain.cav;
  cav.phi = pend.connected.value_or(n >= 1 ? std::vector<int>{n + 1} : std::vector<int>{});
  std::sort(cav.phi.begin(), cav.phi.end());
  if (pend.B_given) {
    const double B1 = pend.B.count(1) ? pend.B.at(1) : presets::kSafeGains.B1;
    cav.B.clear();
    cav.B[1] = B1;
    for (const auto& [k, g] : pend.B) cav.B[k] = g;
  } else {
    cav.B.clear();
    cav.B[1] = presets::kSafeGains.B1;
  }
  for (int k : cav.phi) {
    if (!cav.B.count(k)) cav.B[k] = k == n + 1 ? presets::kSafeGains.B_head : 0.0;
  }
  cav.C = pend.C;
  cfg.chain.validate();

  // Scenario
  if (pend.profile == "data") {
    if (!pend.data_file) throw ConfigError("[scenario] profile = data needs data_file");
    const std::filesystem::path p(*pend.data_file);
    cfg.data_file = p.is_absolute() ? p : base_dir / p;
  } else if (pend.data_file) {
    throw ConfigError("[scenario] data_file is only used with profile = data");
  }
  cfg.scenario.head = br;
  cfg.scenario.init = Equilibrium{pend.v_star.value_or(br.v_eq)};
  cfg.v_star_from_data = !pend.v_star && pend.profile == "data";
  if (pend.clamp) cfg.sim_options.limits = InputLimits{pend.decel_max, pend.accel_max};

  cfg.cbf.validate();
  cfg.envelope.validate();
  cfg.chart.validate();
  cfg.boundaries.validate();
  if (!(cfg.scenario.dt > 0.0) || !(cfg.scenario.t_final > 0.0)) {
    throw ConfigError("[scenario] dt and t_final must be positive");
  }
  return cfg;
}

void resolve_data(RunConfig& cfg) {
  if (!cfg.data_file) return;
  if (!std::filesystem::exists(*cfg.data_file)) {
    throw IoError("speed data file not found: " + cfg.data_file->string());
  }
  DataDriven data = load_speed_csv(*cfg.data_file, cfg.scenario.dt);
  if (!cfg.prescribe_hvs) data.hvs.clear();
  if (cfg.v_star_from_data) cfg.scenario.init = Equilibrium{data.head.speed(0.0)};
  cfg.scenario.head = std::move(data);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  RunConfig cfg = parse_config(in, path.parent_path().empty() ? "." : path.parent_path());
  resolve_data(cfg);
  return cfg;
}

}  // namespace ccc
