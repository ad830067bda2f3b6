#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "lenscrypt/image.hpp"
#include "lenscrypt/optics.hpp"

namespace lenscrypt {

// Additive white Gaussian sensor noise at a target SNR, with optional
// quantization to a sensor bit depth. Empty optionals disable each stage.
struct NoiseModel {
    std::optional<double> snr_db;
    std::optional<int> quantization_bits;
    std::uint64_t seed = 0;

    static NoiseModel none() { return {}; }
    void validate() const;
};

// The multiplexed sensor image: the ciphertext of the optical channel.
struct Measurement {
    Image data;
    std::optional<double> snr_db;
    std::uint64_t seed = 0;
    std::uint64_t psf_fingerprint = 0;
};

namespace fourier {

// Frequency response of a kernel on the zero-padded grid, rolled so the
// kernel's rounded center of mass sits at the origin. Convolving with it and
// cropping the leading rows x cols window yields the "same"-size linear
// convolution anchored at that center.
struct Otf {
    int pad_rows = 0;
    int pad_cols = 0;
    std::vector<Cplx> h;
};

// Rounded center of mass of a non-negative kernel; the geometric center for
// an all-zero kernel.
std::pair<int, int> center_of_mass(const Plane& kernel);

Otf make_otf(const Plane& kernel, int pad_rows, int pad_cols);

std::vector<Cplx> pad_embed(const Plane& p, int pad_rows, int pad_cols);
Plane crop_real(const std::vector<Cplx>& grid, int pad_rows, int pad_cols,
                int rows, int cols);

}  // namespace fourier

// Linear (non-circular) "same"-size 2D convolution via zero-padded FFTs,
// anchored at the kernel's center of mass: a centered delta kernel is the
// identity. Both planes must share one shape.
Plane convolve(const Plane& kernel, const Plane& image);

// Per channel: convolve the scene with the PSF, add white Gaussian noise at
// the configured SNR (noise power set per channel from the clean signal
// power), clamp at zero, then optionally quantize. Deterministic per seed.
Measurement encrypt(const SceneImage& scene, const Psf& psf,
                    const NoiseModel& noise);

}  // namespace lenscrypt
