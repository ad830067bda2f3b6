#pragma once

#include <cstdint>
#include <vector>

#include "lenscrypt/fft.hpp"
#include "lenscrypt/image.hpp"
#include "lenscrypt/mask.hpp"

namespace lenscrypt {

// Distances, wavelengths and sampling of the scene -> mask -> sensor chain.
//
// The PSF is computed on a fine grid_size x grid_pitch grid and read out on a
// sensor of sensor_size pixels at sensor_pitch: the central
// sensor_size * sensor_pitch region is cropped and box-averaged. Keep the
// sensor extent comparable to the mask extent, as in the physical device;
// a much larger sensor window turns the multiplexing kernel into a plain
// centered blur. sensor_pitch = 0 selects full-grid coverage.
struct OpticsConfig {
    double d1 = 0.30;   // scene-to-mask distance, m
    double d2 = 0.002;  // mask-to-sensor distance, m
    std::vector<double> wavelengths = {640e-9, 550e-9, 460e-9};  // m
    int grid_size = 1024;        // simulation grid side, samples
    double grid_pitch = 1.5e-5;  // simulation sampling pitch, m
    int sensor_size = 128;       // sensor side, pixels
    double sensor_pitch = 3e-5;  // sensor pixel pitch, m (0 = grid/sensor auto)

    int channels() const { return static_cast<int>(wavelengths.size()); }
    // integer box-binning factor grid samples -> sensor pixel
    int bin_factor() const;
    void validate() const;  // throws ConfigError
};

enum class PsfNormalization { UnitSum, UnitPeak, Raw };

// Per-channel intensity point spread function on the sensor grid.
struct Psf {
    std::vector<Plane> planes;
    PsfNormalization normalization = PsfNormalization::UnitSum;

    int channels() const { return static_cast<int>(planes.size()); }
    int rows() const { return planes.empty() ? 0 : planes[0].rows; }
    int cols() const { return planes.empty() ? 0 : planes[0].cols; }
};

// 64-bit content hash over all channel planes.
std::uint64_t fingerprint(const Psf& psf);

// Real transmission field of the mask for one color channel, rasterized on
// the centered simulation grid. A stripe contributes its transmission over
// the fill_factor-scaled rectangle of its cell; RGB stripes transmit only
// into their own channel, monochrome stripes into every channel.
ComplexField build_aperture(const MaskSpec& spec, const MaskPattern& pattern,
                            int channel, const OpticsConfig& cfg);

// Unit-magnitude field exp(j 2 pi / lambda * sqrt(|r|^2 + d1^2)) of a point
// source at distance d1, sampled on the grid.
ComplexField spherical_wavefront(const OpticsConfig& cfg, int channel);

// Angular-spectrum transfer function for propagation distance z, laid out in
// standard DFT frequency order. Pure phase on propagating frequencies;
// evanescent frequencies and frequencies beyond the anti-aliasing cutoff
// 1 / (lambda * sqrt((2 * du * z)^2 + 1)) per axis (du the frequency
// sampling interval) are zeroed.
ComplexField free_space_transfer(const OpticsConfig& cfg, double z, int channel);

// Wave-optics PSF of a mask pattern: per channel, the aperture field under
// spherical illumination is propagated by d2 and its squared magnitude is
// center-cropped and box-averaged down to sensor_size.
Psf simulate_psf(const MaskSpec& spec, const MaskPattern& pattern,
                 const OpticsConfig& cfg,
                 PsfNormalization normalization = PsfNormalization::UnitSum);

// Presets matching desk_mask_spec() / prototype_mask_spec().
OpticsConfig desk_optics(int sensor_size = 64);
OpticsConfig prototype_optics();

}  // namespace lenscrypt
