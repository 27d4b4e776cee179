#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tmpcl/dataset.hpp"
#include "tmpcl/pipeline.hpp"

namespace tmp {

// Flat run configuration: synthetic data generation plus training plus the
// evaluation split, settable from a `key = value` config file with CLI
// overrides applied on top. Unknown keys are rejected.
struct RunConfig {
  SynthConfig synth;
  TrainConfig train;

  // Applies one key/value pair; throws std::invalid_argument on unknown
  // keys or unparsable values.
  void apply(const std::string& key, const std::string& value);

  // All known keys with their current values, for --help style listings.
  std::vector<std::pair<std::string, std::string>> entries() const;
};

// Parses `key = value` lines; '#' starts a comment; blank lines ignored.
std::vector<std::pair<std::string, std::string>> parse_config_file(
    const std::string& path);

void apply_config_file(RunConfig& cfg, const std::string& path);

}  // namespace tmp
