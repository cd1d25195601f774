#pragma once

#include <cstdint>
#include <string>

#include "habkeep/episode.hpp"

namespace hab::harness {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  EpisodeConfig episode;  // nests balloon, wind, noise, gp, fompc settings
  int workers = 1;
};

RunConfig default_run_config();

// One dotted key, e.g. "fompc.horizon" = "240". Unknown keys or malformed
// values raise ConfigError.
void apply_config_override(RunConfig& cfg, const std::string& key,
                           const std::string& value);

// key = value lines, '#' comments, blank lines ignored.
RunConfig load_config_file(const std::string& path);
void apply_config_text(RunConfig& cfg, const std::string& text);

// Canonical sorted key = value rendering of every setting; the basis of the
// config fingerprint and embedded in result files.
std::string canonical_config_text(const RunConfig& cfg);
std::uint64_t config_fingerprint(const RunConfig& cfg);

}  // namespace hab::harness
