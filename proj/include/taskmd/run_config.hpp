#pragma once

#include <charconv>
#include <cstdint>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "taskmd/engine.hpp"
#include "taskmd/generators.hpp"

namespace taskmd {

// Run configuration file: flat "key = value" lines with dotted section
// prefixes, full-line # comments, and blank lines. Unknown keys are
// rejected; parse and type errors cite the line and key.

struct SystemSpec {
  std::string generator;  // lattice, spherical, melt, random

  std::int64_t n = 0;            // lattice, random
  double rho = 0.0;              // lattice, melt, random
  double temperature = 0.0;      // all but melt
  double box_length = 0.0;       // spherical
  double diameter_fraction = 0.0;  // spherical
  double rho_in = 0.0;           // spherical
  double alpha = 0.0;            // spherical
  std::int64_t chains = 0;       // melt
  std::int64_t chain_length = 0;  // melt
  double bond_length = 0.97;     // melt
  double min_distance = 0.8;     // random
};

struct OutputSpec {
  std::string timing_path;      // empty: no timing file
  std::string timing_mode = "summary";  // summary or per_step
  std::string trajectory_path;  // empty: no trajectory
  std::int64_t trajectory_stride = 100;
  std::int64_t observable_stride = 100;
};

struct RunConfig {
  std::uint64_t seed = 0;
  SystemSpec system;
  Interactions inter;
  double r_skin = 0.3;
  EngineConfig engine;
  bool n_sub_auto = false;
  OutputSpec output;
  std::int64_t probe_steps = 20;
  bool full_sweep = false;
};

namespace config_detail {

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
};

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<Entry> parse_kv_lines(const std::string& text) {
  std::vector<Entry> entries;
  std::unordered_set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    line += 1;
    const std::string stripped = trim(raw);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line) +
                        ": expected 'key = value'");
    }
    Entry e;
    e.key = trim(stripped.substr(0, eq));
    e.value = trim(stripped.substr(eq + 1));
    e.line = line;
    if (e.key.empty()) {
      throw ConfigError("config line " + std::to_string(line) +
                        ": empty key");
    }
    if (!seen.insert(e.key).second) {
      throw ConfigError("config line " + std::to_string(line) +
                        ": duplicate key '" + e.key + "'");
    }
    entries.push_back(e);
  }
  return entries;
}

inline ConfigError bad_value(const Entry& e, const char* want) {
  return ConfigError("config line " + std::to_string(e.line) + ", key '" +
                     e.key + "': expected " + want + ", got '" + e.value +
                     "'");
}

inline double to_double(const Entry& e) {
  const char* begin = e.value.data();
  const char* end = begin + e.value.size();
  double v = 0.0;
  const auto r = std::from_chars(begin, end, v);
  if (r.ec != std::errc{} || r.ptr != end) throw bad_value(e, "a number");
  return v;
}

inline std::int64_t to_int(const Entry& e) {
  const char* begin = e.value.data();
  const char* end = begin + e.value.size();
  std::int64_t v = 0;
  const auto r = std::from_chars(begin, end, v);
  if (r.ec != std::errc{} || r.ptr != end) throw bad_value(e, "an integer");
  return v;
}

inline std::uint64_t to_uint(const Entry& e) {
  const char* begin = e.value.data();
  const char* end = begin + e.value.size();
  std::uint64_t v = 0;
  const auto r = std::from_chars(begin, end, v);
  if (r.ec != std::errc{} || r.ptr != end) {
    throw bad_value(e, "a non-negative integer");
  }
  return v;
}

inline bool to_bool(const Entry& e) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  throw bad_value(e, "true or false");
}

}  // namespace config_detail

inline RunConfig parse_run_config(const std::string& text) {
  using config_detail::Entry;
  const std::vector<Entry> entries = config_detail::parse_kv_lines(text);

  RunConfig c;
  std::unordered_set<std::string> present;
  double fene_k = 0.0, fene_r_max = 0.0;
  double angle_k = 0.0, angle_theta0 = 0.0;
  double th_gamma = 0.0, th_temperature = 0.0;

  for (const Entry& e : entries) {
    present.insert(e.key);
    if (e.key == "seed") {
      c.seed = config_detail::to_uint(e);
    } else if (e.key == "system.generator") {
      c.system.generator = e.value;
    } else if (e.key == "system.n") {
      c.system.n = config_detail::to_int(e);
    } else if (e.key == "system.rho") {
      c.system.rho = config_detail::to_double(e);
    } else if (e.key == "system.temperature") {
      c.system.temperature = config_detail::to_double(e);
    } else if (e.key == "system.box_length") {
      c.system.box_length = config_detail::to_double(e);
    } else if (e.key == "system.diameter_fraction") {
      c.system.diameter_fraction = config_detail::to_double(e);
    } else if (e.key == "system.rho_in") {
      c.system.rho_in = config_detail::to_double(e);
    } else if (e.key == "system.alpha") {
      c.system.alpha = config_detail::to_double(e);
    } else if (e.key == "system.chains") {
      c.system.chains = config_detail::to_int(e);
    } else if (e.key == "system.chain_length") {
      c.system.chain_length = config_detail::to_int(e);
    } else if (e.key == "system.bond_length") {
      c.system.bond_length = config_detail::to_double(e);
    } else if (e.key == "system.min_distance") {
      c.system.min_distance = config_detail::to_double(e);
    } else if (e.key == "interaction.epsilon") {
      c.inter.lj.epsilon = config_detail::to_double(e);
    } else if (e.key == "interaction.sigma") {
      c.inter.lj.sigma = config_detail::to_double(e);
    } else if (e.key == "interaction.r_cut") {
      c.inter.lj.r_cut = config_detail::to_double(e);
    } else if (e.key == "interaction.energy_shifted") {
      c.inter.lj.energy_shifted = config_detail::to_bool(e);
    } else if (e.key == "interaction.r_skin") {
      c.r_skin = config_detail::to_double(e);
    } else if (e.key == "interaction.fene.k") {
      fene_k = config_detail::to_double(e);
    } else if (e.key == "interaction.fene.r_max") {
      fene_r_max = config_detail::to_double(e);
    } else if (e.key == "interaction.angle.k") {
      angle_k = config_detail::to_double(e);
    } else if (e.key == "interaction.angle.theta0") {
      angle_theta0 = config_detail::to_double(e);
    } else if (e.key == "engine.dt") {
      c.engine.dt = config_detail::to_double(e);
    } else if (e.key == "engine.steps") {
      c.engine.steps = config_detail::to_int(e);
    } else if (e.key == "engine.n_sub") {
      if (e.value == "auto") {
        c.n_sub_auto = true;
      } else {
        c.engine.n_sub = static_cast<int>(config_detail::to_int(e));
      }
    } else if (e.key == "engine.worker_threads") {
      c.engine.worker_threads =
          static_cast<int>(config_detail::to_int(e));
    } else if (e.key == "engine.thermostat.gamma") {
      th_gamma = config_detail::to_double(e);
    } else if (e.key == "engine.thermostat.temperature") {
      th_temperature = config_detail::to_double(e);
    } else if (e.key == "output.timing_path") {
      c.output.timing_path = e.value;
    } else if (e.key == "output.timing_mode") {
      if (e.value != "summary" && e.value != "per_step") {
        throw config_detail::bad_value(e, "summary or per_step");
      }
      c.output.timing_mode = e.value;
    } else if (e.key == "output.trajectory_path") {
      c.output.trajectory_path = e.value;
    } else if (e.key == "output.trajectory_stride") {
      c.output.trajectory_stride = config_detail::to_int(e);
    } else if (e.key == "output.observable_stride") {
      c.output.observable_stride = config_detail::to_int(e);
    } else if (e.key == "autotune.probe_steps") {
      c.probe_steps = config_detail::to_int(e);
    } else if (e.key == "autotune.full_sweep") {
      c.full_sweep = config_detail::to_bool(e);
    } else {
      throw ConfigError("config line " + std::to_string(e.line) +
                        ": unknown key '" + e.key + "'");
    }
  }

  auto require = [&](const char* key) {
    if (!present.count(key)) {
      throw ConfigError(std::string("config is missing required key '") +
                        key + "'");
    }
  };
  auto together = [&](const char* a, const char* b) {
    if (present.count(a) != present.count(b)) {
      throw ConfigError(std::string("keys '") + a + "' and '" + b +
                        "' must be given together");
    }
  };

  require("system.generator");
  const std::string& g = c.system.generator;
  if (g == "lattice" || g == "random") {
    require("system.n");
    require("system.rho");
    require("system.temperature");
  } else if (g == "spherical") {
    require("system.box_length");
    require("system.diameter_fraction");
    require("system.rho_in");
    require("system.alpha");
    require("system.temperature");
  } else if (g == "melt") {
    require("system.chains");
    require("system.chain_length");
    require("system.rho");
  } else {
    throw ConfigError("unknown generator '" + g +
                      "' (expected lattice, spherical, melt, or random)");
  }

  together("interaction.fene.k", "interaction.fene.r_max");
  together("interaction.angle.k", "interaction.angle.theta0");
  together("engine.thermostat.gamma", "engine.thermostat.temperature");

  if (present.count("interaction.fene.k")) {
    c.inter.fene = FeneParams{fene_k, fene_r_max};
  } else if (g == "melt") {
    c.inter.fene = FeneParams{};
  }
  if (present.count("interaction.angle.k")) {
    c.inter.angle = AngleParams{angle_k, angle_theta0};
  } else if (g == "melt") {
    c.inter.angle = AngleParams{};
  }
  if (present.count("engine.thermostat.gamma")) {
    c.engine.thermostat = LangevinParams{th_gamma, th_temperature, c.seed};
  }
  c.engine.observable_stride = c.output.observable_stride;

  if (c.output.trajectory_stride < 1) {
    throw ConfigError("trajectory stride must be at least 1");
  }
  if (c.output.observable_stride < 1) {
    throw ConfigError("observable stride must be at least 1");
  }
  if (c.probe_steps < 10) {
    throw ConfigError("autotune probe_steps must be at least 10");
  }
  if (c.engine.dt <= 0.0 || !std::isfinite(c.engine.dt)) {
    throw ConfigError("engine.dt must be positive and finite");
  }
  validate_engine_config(c.engine);
  validate_lj(c.inter.lj);
  if (c.inter.fene) validate_fene(*c.inter.fene);
  if (c.inter.angle) validate_angle(*c.inter.angle);
  if (!std::isfinite(c.r_skin) || c.r_skin < 0.0) {
    throw ConfigError("interaction.r_skin must be finite and non-negative");
  }
  return c;
}

// Canonical text for a RunConfig; parsing it back yields the same values.
inline std::string serialize_run_config(const RunConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "seed = " << c.seed << "\n\n";

  os << "system.generator = " << c.system.generator << "\n";
  const std::string& g = c.system.generator;
  if (g == "lattice" || g == "random") {
    os << "system.n = " << c.system.n << "\n";
    os << "system.rho = " << c.system.rho << "\n";
    os << "system.temperature = " << c.system.temperature << "\n";
  }
  if (g == "random") {
    os << "system.min_distance = " << c.system.min_distance << "\n";
  }
  if (g == "spherical") {
    os << "system.box_length = " << c.system.box_length << "\n";
    os << "system.diameter_fraction = " << c.system.diameter_fraction << "\n";
    os << "system.rho_in = " << c.system.rho_in << "\n";
    os << "system.alpha = " << c.system.alpha << "\n";
    os << "system.temperature = " << c.system.temperature << "\n";
  }
  if (g == "melt") {
    os << "system.chains = " << c.system.chains << "\n";
    os << "system.chain_length = " << c.system.chain_length << "\n";
    os << "system.rho = " << c.system.rho << "\n";
    os << "system.bond_length = " << c.system.bond_length << "\n";
  }
  os << "\n";

  os << "interaction.epsilon = " << c.inter.lj.epsilon << "\n";
  os << "interaction.sigma = " << c.inter.lj.sigma << "\n";
  os << "interaction.r_cut = " << c.inter.lj.r_cut << "\n";
  os << "interaction.energy_shifted = "
     << (c.inter.lj.energy_shifted ? "true" : "false") << "\n";
  os << "interaction.r_skin = " << c.r_skin << "\n";
  if (c.inter.fene) {
    os << "interaction.fene.k = " << c.inter.fene->k << "\n";
    os << "interaction.fene.r_max = " << c.inter.fene->r_max << "\n";
  }
  if (c.inter.angle) {
    os << "interaction.angle.k = " << c.inter.angle->k << "\n";
    os << "interaction.angle.theta0 = " << c.inter.angle->theta0 << "\n";
  }
  os << "\n";

  os << "engine.dt = " << c.engine.dt << "\n";
  os << "engine.steps = " << c.engine.steps << "\n";
  if (c.n_sub_auto) {
    os << "engine.n_sub = auto\n";
  } else {
    os << "engine.n_sub = " << c.engine.n_sub << "\n";
  }
  os << "engine.worker_threads = " << c.engine.worker_threads << "\n";
  if (c.engine.thermostat) {
    os << "engine.thermostat.gamma = " << c.engine.thermostat->gamma << "\n";
    os << "engine.thermostat.temperature = "
       << c.engine.thermostat->temperature << "\n";
  }
  os << "\n";

  if (!c.output.timing_path.empty()) {
    os << "output.timing_path = " << c.output.timing_path << "\n";
  }
  os << "output.timing_mode = " << c.output.timing_mode << "\n";
  if (!c.output.trajectory_path.empty()) {
    os << "output.trajectory_path = " << c.output.trajectory_path << "\n";
  }
  os << "output.trajectory_stride = " << c.output.trajectory_stride << "\n";
  os << "output.observable_stride = " << c.output.observable_stride << "\n";

  os << "autotune.probe_steps = " << c.probe_steps << "\n";
  os << "autotune.full_sweep = " << (c.full_sweep ? "true" : "false") << "\n";
  return os.str();
}

// Builds the initial snapshot the config describes.
inline FlatConfig generate_system(const RunConfig& c) {
  const SystemSpec& s = c.system;
  if (s.generator == "lattice") {
    if (s.n < 1) throw ConfigError("system.n must be at least 1");
    return gen_lattice(static_cast<std::size_t>(s.n), s.rho, s.temperature,
                       c.seed);
  }
  if (s.generator == "spherical") {
    return gen_spherical(s.box_length, s.diameter_fraction, s.rho_in,
                         s.alpha, s.temperature, c.seed);
  }
  if (s.generator == "melt") {
    if (s.chains < 1) throw ConfigError("system.chains must be at least 1");
    if (s.chain_length < 3) {
      throw ConfigError("system.chain_length must be at least 3");
    }
    return gen_polymer_melt(static_cast<std::size_t>(s.chains),
                            static_cast<std::size_t>(s.chain_length), s.rho,
                            c.seed, s.bond_length);
  }
  if (s.generator == "random") {
    if (s.n < 1) throw ConfigError("system.n must be at least 1");
    return gen_random(static_cast<std::size_t>(s.n), s.rho, s.min_distance,
                      s.temperature, c.seed);
  }
  throw ConfigError("unknown generator '" + s.generator + "'");
}

}  // namespace taskmd
