#include "habkeep/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "habkeep/rng.hpp"
#include "habkeep/wind_model.hpp"

namespace hab::harness {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Uniform access to every tunable: getter renders the current value,
// setter parses an override.
struct Entry {
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: bad numeric value for " + key + ": '" + v + "'");
  }
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const int i = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer value for " + key + ": '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config: bad boolean value for " + key + ": '" + v + "'");
}

#define NUM_ENTRY(key, field)                                               \
  {key,                                                                     \
   {[](const RunConfig& c) { return format_double(c.field); },              \
    [](RunConfig& c, const std::string& v) { c.field = parse_double(key, v); }}}

#define INT_ENTRY(key, field)                                               \
  {key,                                                                     \
   {[](const RunConfig& c) { return std::to_string(c.field); },             \
    [](RunConfig& c, const std::string& v) { c.field = parse_int(key, v); }}}

#define BOOL_ENTRY(key, field)                                              \
  {key,                                                                     \
   {[](const RunConfig& c) { return c.field ? std::string("true")           \
                                            : std::string("false"); },      \
    [](RunConfig& c, const std::string& v) { c.field = parse_bool(key, v); }}}

const std::map<std::string, Entry>& entries() {
  static const std::map<std::string, Entry> table = {
      INT_ENTRY("episode.steps", episode.steps),
      NUM_ENTRY("episode.dt", episode.dt),
      NUM_ENTRY("episode.dt_sub", episode.dt_sub),
      INT_ENTRY("episode.substeps", episode.substeps),
      NUM_ENTRY("episode.radius", episode.radius),
      NUM_ENTRY("episode.start_distance_max", episode.start_distance_max),
      NUM_ENTRY("episode.start_energy_min_frac", episode.start_energy_min_frac),
      NUM_ENTRY("episode.band_margin_frac", episode.band_margin_frac),

      NUM_ENTRY("balloon.m_dry", episode.params.m_dry),
      NUM_ENTRY("balloon.n_gas", episode.params.n_gas),
      NUM_ENTRY("balloon.n_max", episode.params.n_max),
      NUM_ENTRY("balloon.v_max", episode.params.V_max),
      NUM_ENTRY("balloon.c_d", episode.params.C_d),
      NUM_ENTRY("balloon.area", episode.params.area),
      NUM_ENTRY("balloon.gravity", episode.params.gravity),
      NUM_ENTRY("balloon.e_max", episode.params.E_max),
      NUM_ENTRY("balloon.p_load", episode.params.P_load),
      NUM_ENTRY("balloon.p_solar_max", episode.params.P_solar_max),
      NUM_ENTRY("balloon.k_vent", episode.params.k_vent),
      NUM_ENTRY("balloon.k_pump", episode.params.k_pump),
      NUM_ENTRY("balloon.acs_power", episode.params.acs_power),

      NUM_ENTRY("wind.band_lo", episode.wind.band_lo),
      NUM_ENTRY("wind.band_hi", episode.wind.band_hi),
      NUM_ENTRY("wind.rotation_min", episode.wind.rotation_min),
      NUM_ENTRY("wind.rotation_max", episode.wind.rotation_max),
      NUM_ENTRY("wind.inner_speed_min", episode.wind.inner_speed_min),
      NUM_ENTRY("wind.inner_speed_max", episode.wind.inner_speed_max),
      NUM_ENTRY("wind.outer_speed_min", episode.wind.outer_speed_min),
      NUM_ENTRY("wind.outer_speed_max", episode.wind.outer_speed_max),
      NUM_ENTRY("wind.drift_length_xy", episode.wind.drift_length_xy),
      NUM_ENTRY("wind.drift_length_t", episode.wind.drift_length_t),

      INT_ENTRY("noise.octaves", episode.noise.octaves),
      NUM_ENTRY("noise.amplitude", episode.noise.amplitude),
      NUM_ENTRY("noise.length_x", episode.noise.length_x),
      NUM_ENTRY("noise.length_y", episode.noise.length_y),
      NUM_ENTRY("noise.length_l", episode.noise.length_l),
      NUM_ENTRY("noise.length_t", episode.noise.length_t),
      NUM_ENTRY("noise.bias_min", episode.noise.bias_min),
      NUM_ENTRY("noise.bias_max", episode.noise.bias_max),

      NUM_ENTRY("gp.length_x", episode.fompc.gp.length_x),
      NUM_ENTRY("gp.length_y", episode.fompc.gp.length_y),
      NUM_ENTRY("gp.length_l", episode.fompc.gp.length_l),
      NUM_ENTRY("gp.length_t", episode.fompc.gp.length_t),
      NUM_ENTRY("gp.sigma_f", episode.fompc.gp.sigma_f),
      NUM_ENTRY("gp.sigma_n", episode.fompc.gp.sigma_n),
      INT_ENTRY("gp.capacity", episode.fompc.gp.capacity),

      INT_ENTRY("fompc.horizon", episode.fompc.horizon),
      INT_ENTRY("fompc.replan_interval", episode.fompc.replan_interval),
      NUM_ENTRY("fompc.discount", episode.fompc.discount),
      INT_ENTRY("fompc.num_inits", episode.fompc.num_inits),
      NUM_ENTRY("fompc.step_size", episode.fompc.step_size),
      INT_ENTRY("fompc.max_iters", episode.fompc.max_iters),
      NUM_ENTRY("fompc.tolerance", episode.fompc.tolerance),
      NUM_ENTRY("fompc.cost_radius", episode.fompc.cost_radius),
      NUM_ENTRY("fompc.coast_bound", episode.fompc.coast_bound),
      NUM_ENTRY("fompc.init_raw_magnitude", episode.fompc.init_raw_magnitude),
      NUM_ENTRY("fompc.perturb_sigma", episode.fompc.perturb_sigma),
      NUM_ENTRY("fompc.blend_alpha", episode.fompc.wind_model.blend_alpha),
      BOOL_ENTRY("fompc.use_column_cache", episode.fompc.use_column_cache),
      {"fompc.fidelity",
       {[](const RunConfig& c) {
          return std::to_string(static_cast<int>(c.episode.fompc.fidelity));
        },
        [](RunConfig& c, const std::string& v) {
          const int i = parse_int("fompc.fidelity", v);
          if (i < 0 || i > 4)
            throw ConfigError("config: fompc.fidelity must be 0..4");
          c.episode.fompc.fidelity = static_cast<Fidelity>(i);
        }}},
      {"fompc.wind_model",
       {[](const RunConfig& c) {
          return std::string(
              wind::wind_model_name(c.episode.fompc.wind_model.kind));
        },
        [](RunConfig& c, const std::string& v) {
          try {
            c.episode.fompc.wind_model.kind = wind::wind_model_from_name(v);
          } catch (const std::exception& e) {
            throw ConfigError(std::string("config: ") + e.what());
          }
        }}},

      INT_ENTRY("bench.workers", workers),
  };
  return table;
}

#undef NUM_ENTRY
#undef INT_ENTRY
#undef BOOL_ENTRY

}  // namespace

RunConfig default_run_config() { return RunConfig{}; }

void apply_config_override(RunConfig& cfg, const std::string& key,
                           const std::string& value) {
  const auto it = entries().find(key);
  if (it == entries().end()) throw ConfigError("config: unknown key '" + key + "'");
  it->second.set(cfg, value);
}

void apply_config_text(RunConfig& cfg, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(line_no) +
                        " is not 'key = value'");
    apply_config_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  RunConfig cfg = default_run_config();
  apply_config_text(cfg, buf.str());
  return cfg;
}

std::string canonical_config_text(const RunConfig& cfg) {
  std::string out;
  for (const auto& [key, entry] : entries()) {  // std::map: sorted keys
    out += key;
    out += " = ";
    out += entry.get(cfg);
    out += "\n";
  }
  return out;
}

std::uint64_t config_fingerprint(const RunConfig& cfg) {
  return fnv1a64(canonical_config_text(cfg));
}

}  // namespace hab::harness
