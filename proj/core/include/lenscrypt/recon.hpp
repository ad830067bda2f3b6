#pragma once

#include <optional>
#include <string>
#include <variant>

#include "lenscrypt/forward.hpp"

namespace lenscrypt {

struct WienerParams {
    double noise_floor = 1.0e-3;
};

struct L2Params {
    double lambda = 1.0e-3;
};

struct AdmmParams {
    int iterations = 100;
    double rho = 1.0;
    // TV weight relative to the measurement maximum; the effective soft
    // threshold is tv_weight * max(y). Defaults from tools/admm_grid_search.
    double tv_weight = 1.0e-3;
    bool nonneg = true;
    std::optional<double> tolerance;  // early stop on relative primal residual

    void validate() const;
};

using DecoderConfig = std::variant<WienerParams, L2Params, AdmmParams>;
std::string decoder_tag(const DecoderConfig& cfg);  // "wiener" / "l2" / "admm"

struct DecodeResult {
    SceneImage image;
    double data_fidelity = 0.0;  // 0.5 * ||y - p * x||^2 at the returned image
    int iterations_run = 0;
};

// 0.5 * ||y - p * x||^2 summed over channels.
double data_fidelity(const Image& meas, const Psf& psf, const Image& estimate);

// Frequency-domain regularized inverse filter
//   X = conj(OTF) Y / (|OTF|^2 + noise_floor),
// cropped and clamped to [0,1]. noise_floor = 0 requires a bounded-away-
// from-zero OTF and otherwise raises IllPosedError.
DecodeResult wiener_decode(const Measurement& meas, const Psf& psf,
                           double noise_floor);

// Tikhonov closed form (P^T P + lambda I)^-1 P^T y; identical to
// wiener_decode with noise_floor = lambda. Rejects lambda <= 0.
DecodeResult l2_decode(const Measurement& meas, const Psf& psf, double lambda);

// Splitting solver for 0.5||y - C(p * x)||^2 + tv ||Dx||_1 + nonneg(x) with
// a Fourier-diagonal x-update, anisotropic-TV shrinkage and projection.
// Raises DivergenceError if the data fidelity grows 10x over 10 iterations.
DecodeResult admm_decode(const Measurement& meas, const Psf& psf,
                         const AdmmParams& params);

DecodeResult decode(const Measurement& meas, const Psf& psf,
                    const DecoderConfig& cfg);

// Raw padded-domain Tikhonov solution for one channel, before cropping and
// clamping. Exposed so the normal equations can be checked externally.
Plane l2_solve_padded(const Plane& meas_plane, const Plane& psf_plane,
                      double lambda);

}  // namespace lenscrypt
