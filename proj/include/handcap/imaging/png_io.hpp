#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "handcap/imaging/raster.hpp"

namespace handcap::imaging {

/// Reads an 8-bit PNG. Gray(+alpha) decodes to 1 channel, everything else to
/// RGB; alpha is dropped and 16-bit samples are reduced.
Raster read_png(const std::filesystem::path& path);
Raster decode_png(std::span<const std::uint8_t> bytes);

void write_png(const std::filesystem::path& path, const Raster& img);
std::vector<std::uint8_t> encode_png(const Raster& img);

}  // namespace handcap::imaging
