#pragma once

// Binary portable pixmap (P6, maxval 255) reading and writing.

#include <filesystem>

#include "jnr/core_types.hpp"

namespace jnr {

Frame read_ppm(const std::filesystem::path& path, int frame_index);
void write_ppm(const std::filesystem::path& path, const Frame& frame);

}  // namespace jnr
