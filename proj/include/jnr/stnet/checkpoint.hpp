#pragma once

// Binary checkpoint container; layout in docs/formats.md.

#include <filesystem>
#include <string>

#include "jnr/stnet/model.hpp"

namespace jnr::stnet {

struct Checkpoint {
  NetConfig config;
  ModelParams params;
};

// `net.key = value` lines for every NetConfig field, fixed order.
std::string net_config_text(const NetConfig& cfg);
NetConfig parse_net_config_text(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const NetConfig& cfg, const ModelParams& params);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace jnr::stnet
