#include <fstream>
#include <sstream>

#include "irsce/harness.hpp"

namespace irsce {

namespace {

std::string trim(const std::string& s) {
  const char* ws = " \t\r\n";
  auto begin = s.find_first_not_of(ws);
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(ws);
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream stream(s);
  while (std::getline(stream, item, sep)) parts.push_back(trim(item));
  if (!s.empty() && s.back() == sep) parts.push_back("");
  return parts;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': cannot parse number from '" + value + "'");
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': cannot parse integer from '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("key '" + key + "': cannot parse boolean from '" + value + "'");
}

Vec3 parse_vec3(const std::string& key, const std::string& value) {
  auto parts = split(value, ',');
  if (parts.size() != 3) {
    throw ConfigError("key '" + key + "': expected 'x,y,z' but got '" + value + "'");
  }
  return Vec3(parse_double(key, parts[0]), parse_double(key, parts[1]),
              parse_double(key, parts[2]));
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig config;
  config.geometry.user_positions.clear();
  bool n_declared = false;
  long long declared_n = 0;

  std::istringstream stream(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    std::string line = raw;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }

    if (key == "m") {
      config.m = static_cast<int>(parse_int(key, value));
    } else if (key == "n") {
      n_declared = true;
      declared_n = parse_int(key, value);
    } else if (key == "k") {
      config.k = static_cast<int>(parse_int(key, value));
    } else if (key == "irs_rows") {
      config.geometry.irs_rows = static_cast<int>(parse_int(key, value));
    } else if (key == "irs_cols") {
      config.geometry.irs_cols = static_cast<int>(parse_int(key, value));
    } else if (key == "element_spacing") {
      config.geometry.element_spacing = parse_double(key, value);
    } else if (key == "bs_position") {
      config.geometry.bs_position = parse_vec3(key, value);
    } else if (key == "irs_center") {
      config.geometry.irs_center = parse_vec3(key, value);
    } else if (key == "anchor1_position") {
      config.geometry.anchor1_position = parse_vec3(key, value);
    } else if (key == "anchor2_position") {
      config.geometry.anchor2_position = parse_vec3(key, value);
    } else if (key == "anchor_los_position") {
      config.geometry.anchor_los_position = parse_vec3(key, value);
    } else if (key == "user_positions") {
      for (const std::string& triple : split(value, ';')) {
        if (!triple.empty()) {
          config.geometry.user_positions.push_back(parse_vec3(key, triple));
        }
      }
    } else if (key == "user_disk_center") {
      config.user_disk_center = parse_vec3(key, value);
    } else if (key == "user_disk_radius") {
      config.user_disk_radius = parse_double(key, value);
    } else if (key == "carrier_wavelength") {
      config.path_loss.carrier_wavelength = parse_double(key, value);
    } else if (key == "reference_gain_db") {
      config.path_loss.reference_gain_db = parse_double(key, value);
    } else if (key == "reference_distance") {
      config.path_loss.reference_distance = parse_double(key, value);
    } else if (key == "exponent_nlos") {
      config.path_loss.exponent_nlos = parse_double(key, value);
    } else if (key == "exponent_los") {
      config.path_loss.exponent_los = parse_double(key, value);
    } else if (key == "p_online_dbm") {
      config.p_online_dbm = parse_double(key, value);
    } else if (key == "p_offline_dbm") {
      config.p_offline_dbm = parse_double(key, value);
    } else if (key == "noise_power_dbm") {
      config.noise_power_dbm = parse_double(key, value);
    } else if (key == "trials") {
      config.trials = static_cast<int>(parse_int(key, value));
    } else if (key == "master_seed") {
      config.master_seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "schemes") {
      config.schemes.clear();
      for (const std::string& name : split(value, ',')) {
        if (name == "all") {
          config.schemes = {SchemeId::kProposedGeneral, SchemeId::kProposedLos,
                            SchemeId::kBenchmark};
        } else {
          config.schemes.push_back(parse_scheme(name));
        }
      }
    } else if (key == "t_bs") {
      config.t_bs = parse_int(key, value);
    } else if (key == "t_su") {
      config.t_su = parse_int(key, value);
    } else if (key == "sweep_axis") {
      if (value == "m") config.sweep_axis = SweepAxis::kM;
      else if (value == "k") config.sweep_axis = SweepAxis::kK;
      else if (value == "p") config.sweep_axis = SweepAxis::kPOnline;
      else throw ConfigError("key 'sweep_axis': expected m, k or p");
    } else if (key == "sweep_grid") {
      config.sweep_grid.clear();
      for (const std::string& item : split(value, ',')) {
        config.sweep_grid.push_back(parse_double(key, item));
      }
    } else if (key == "theta") {
      config.theta = parse_double(key, value);
    } else if (key == "failure_rate_threshold") {
      config.failure_rate_threshold = parse_double(key, value);
    } else if (key == "noise_off") {
      config.noise_off = parse_bool(key, value);
    } else if (key == "shared_noise") {
      config.shared_noise = parse_bool(key, value);
    } else if (key == "genie_direct") {
      config.genie_direct = parse_bool(key, value);
    } else if (key == "strict_reference_row") {
      config.strict_reference_row = parse_bool(key, value);
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }

  if (n_declared && declared_n != config.geometry.num_elements()) {
    throw ConfigError("n = " + std::to_string(declared_n) +
                      " contradicts irs_rows * irs_cols = " +
                      std::to_string(config.geometry.num_elements()));
  }
  config.validate();
  return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse_config_text(buffer.str());
}

std::string describe_config(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "m = " << config.m << "\n";
  out << "n = " << config.n() << " (irs_rows = " << config.geometry.irs_rows
      << ", irs_cols = " << config.geometry.irs_cols << ")\n";
  out << "k = " << config.k << "\n";
  out << "p_online_dbm = " << config.p_online_dbm << "\n";
  out << "p_offline_dbm = " << config.p_offline_dbm << "\n";
  out << "noise_power_dbm = " << config.noise_power_dbm
      << (config.noise_off ? " (noise disabled)" : "") << "\n";
  out << "trials = " << config.trials << "\n";
  out << "master_seed = " << config.master_seed << "\n";
  out << "t_bs = " << config.t_bs << ", t_su = " << config.t_su << "\n";
  out << "schemes =";
  for (SchemeId s : config.schemes) out << " " << scheme_name(s);
  out << "\n";
  if (config.geometry.user_positions.empty()) {
    out << "user_positions = random disk around (" << config.user_disk_center.x() << ", "
        << config.user_disk_center.y() << ", " << config.user_disk_center.z()
        << "), radius " << config.user_disk_radius
        << " m, redrawn per trial (default placement; not given by the scenario)\n";
  } else {
    out << "user_positions = " << config.geometry.user_positions.size()
        << " fixed position(s)\n";
  }
  switch (config.sweep_axis) {
    case SweepAxis::kNone: out << "sweep = none\n"; break;
    case SweepAxis::kM: out << "sweep = m\n"; break;
    case SweepAxis::kK: out << "sweep = k\n"; break;
    case SweepAxis::kPOnline: out << "sweep = p\n"; break;
  }
  return out.str();
}

}  // namespace irsce
