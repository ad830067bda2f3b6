#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lenscrypt/errors.hpp"

namespace lenscrypt {

// Geometry and quantization of a programmable transmission mask.
//
// The mask has rows x cols addressable pixels. Color panels split each pixel
// into three side-by-side stripes (red, green, blue), monochrome panels have
// a single stripe. pitch_x / pitch_y are the *stripe* pitches in meters, so
// the physical pixel width is subpixels_per_pixel * pitch_x.
struct MaskSpec {
    int rows = 12;
    int cols = 16;
    int subpixels_per_pixel = 1;  // 1 (monochrome) or 3 (RGB stripes)
    double pitch_x = 1.0e-4;
    double pitch_y = 1.0e-4;
    int bit_depth = 8;        // bits per stripe weight, 1..16
    double fill_factor = 1.0; // transmissive fraction of a stripe cell, (0,1]

    int total_subpixels() const { return rows * cols * subpixels_per_pixel; }
    int levels() const { return 1 << bit_depth; }
    double width() const { return cols * subpixels_per_pixel * pitch_x; }
    double height() const { return rows * pitch_y; }

    void validate() const;  // throws ConfigError
};

bool operator==(const MaskSpec& a, const MaskSpec& b);

// The secret key: one quantized level per stripe, row-major by
// (row, pixel column, stripe). Level L transmits L / (levels - 1).
struct MaskPattern {
    MaskSpec spec;
    std::vector<std::uint16_t> weights;

    double transmission(std::size_t i) const {
        return static_cast<double>(weights[i]) / (spec.levels() - 1);
    }

    void validate() const;
};

// 18x26 RGB panel, 1404 stripes at 8-bit depth.
MaskSpec prototype_mask_spec();
// 12x16 monochrome panel for fast desk-scale runs.
MaskSpec desk_mask_spec();

// Each level drawn independently and uniformly; deterministic per seed.
MaskPattern generate_uniform(const MaskSpec& spec, std::uint64_t seed);

// Deterministic pattern for a (user, timestamp) pair: a keyed BLAKE2b hash
// of the inputs seeds a ChaCha20 keystream from which levels are read
// bit_depth bits at a time. Rejects an empty secret.
MaskPattern generate_keyed(const MaskSpec& spec, std::string_view user,
                           std::uint64_t timestamp,
                           std::span<const std::uint8_t> secret);
MaskPattern generate_keyed(const MaskSpec& spec, std::string_view user,
                           std::uint64_t timestamp, std::string_view secret);

// Redraws exactly llround(fraction_wrong * N) stripes, chosen uniformly
// without replacement, each to a uniformly random *different* level, so
// fraction_correct of the result is exact.
MaskPattern perturb(const MaskPattern& pattern, double fraction_wrong,
                    std::uint64_t seed);

// Fraction of stripes whose levels agree. Requires equal specs.
double fraction_correct(const MaskPattern& a, const MaskPattern& b);

// JSON document {"spec": {...}, "weights": "<base64>"} where the weights
// payload is the packed-level encoding below.
std::string pattern_to_json(const MaskPattern& p);
MaskPattern pattern_from_json(std::string_view text);

// Raw binary: little-endian u32 header (rows, cols, subpixels, bit_depth)
// followed by levels packed LSB-first, bit_depth bits each. Geometry fields
// absent from the header (pitches, fill factor) come from `geometry`, or
// from the prototype spec when omitted.
std::vector<std::uint8_t> pattern_to_binary(const MaskPattern& p);
MaskPattern pattern_from_binary(std::span<const std::uint8_t> bytes,
                                const MaskSpec* geometry = nullptr);

void save_pattern_json(const std::filesystem::path& file, const MaskPattern& p);
MaskPattern load_pattern_json(const std::filesystem::path& file);
void save_pattern_binary(const std::filesystem::path& file, const MaskPattern& p);
MaskPattern load_pattern_binary(const std::filesystem::path& file,
                                const MaskSpec* geometry = nullptr);

}  // namespace lenscrypt
