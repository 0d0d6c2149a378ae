#pragma once

// Run configuration: flat `key = value` text, `#` comments, namespaced keys.
// Unknown keys and malformed values are errors naming the source and line.

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>

#include "jnr/jnl.hpp"
#include "jnr/roi_filter.hpp"
#include "jnr/sampler.hpp"
#include "jnr/spatial_context.hpp"
#include "jnr/stnet/model.hpp"
#include "jnr/synthgen.hpp"

namespace jnr {

struct RunConfig {
  DetectorConfig jnl;
  RoiConfig roi;
  SpatialContextConfig sc;
  SamplerConfig sampler;
  stnet::NetConfig net;
  SynthConfig synth;
  bool kfid_enabled = true;
  int threads = 1;
  std::string train_split = "train";
  std::string eval_split = "test";

  std::set<std::string> explicit_keys;  // keys present in the parsed text

  void validate() const;
};

RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);
// Empty path -> defaults.
RunConfig load_config_or_default(const std::filesystem::path& path);

// --seed: replaces every seed (sampler, network, generator).
void override_seed(RunConfig& cfg, std::uint64_t seed);

}  // namespace jnr
