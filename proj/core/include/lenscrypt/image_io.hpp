#pragma once

#include <filesystem>

#include "lenscrypt/image.hpp"

namespace lenscrypt {

// Decodes 8/16-bit grayscale or RGB PNG and binary PGM/PPM into [0,1]
// planes (16-bit inputs are scaled by 1/65535). Throws IoError.
Image load_image(const std::filesystem::path& file);

// 8-bit PNG; values are clamped to [0,1] and scaled by 255. 1 or 3 channels.
void save_png8(const std::filesystem::path& file, const Image& img);

// Binary P5 (1 channel) / P6 (3 channels), 8-bit.
void save_pnm(const std::filesystem::path& file, const Image& img);

// Planar 32-bit little-endian float raw plus a "<file>.json" sidecar
// carrying rows, cols, channels, dtype and layout.
void save_float_raw(const std::filesystem::path& file, const Image& img);
Image load_float_raw(const std::filesystem::path& file);

// Box-average for integer downscale, bilinear otherwise.
Image resize(const Image& img, int rows, int cols);

// BT.601 luma for 3-channel input, plain average otherwise.
Image to_gray(const Image& img);

}  // namespace lenscrypt
