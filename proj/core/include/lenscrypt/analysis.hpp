#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lenscrypt/forward.hpp"
#include "lenscrypt/mask.hpp"
#include "lenscrypt/optics.hpp"
#include "lenscrypt/recon.hpp"

namespace lenscrypt {

struct KeyspaceBound {
    double fraction = 0.0;      // minimum fraction of correct stripes
    bool over_capacity = false; // key_bits exceeds N * log2(levels)
};

// Minimum fraction W of correctly determined stripes for the remaining
// search space to match a key of key_bits bits: W = key_bits * log_levels(2) / N,
// clamped to 1 with the over_capacity flag set when unreachable.
KeyspaceBound keyspace_bound(double key_bits, int levels, int num_subpixels);

// floor(W * N * log2(levels)): the search space, in bits, behind a given
// fraction of unknown-correct stripes.
long long effective_key_length(double fraction, int levels, int num_subpixels);

// ||P - Q||_2 / ||P||_2 over all channels jointly. Rejects a zero P.
double relative_psf_error(const Psf& truth, const Psf& candidate);

double mse(const Image& a, const Image& b);
// 10 log10(peak^2 / MSE); +infinity for identical images.
double psnr(const Image& a, const Image& b, double peak = 1.0);
// Gaussian-window (11x11, sigma 1.5) structural similarity with
// C1=(0.01 peak)^2, C2=(0.03 peak)^2, averaged over channels.
double ssim(const Image& a, const Image& b, double peak = 1.0);

// Spearman rank correlation (average ranks on ties).
double spearman(const std::vector<double>& x, const std::vector<double>& y);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};
LineFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

struct MismatchResult {
    std::vector<double> direct;      // (H - Delta)^-1 (H x + noise)
    std::vector<double> series;      // x + H^-1 n + truncated mismatch series
    std::vector<double> error_term;  // the truncated series tail alone
    double spectral_radius = 0.0;    // of H^-1 Delta
};

// Dual-route reconstruction of a dense n x n system decoded with the wrong
// matrix H - Delta: a direct linear solve, and the geometric series
// sum_{k=1..k_max} (H^-1 Delta)^k applied to (x + H^-1 noise). Matrices are
// row-major flat vectors. Throws NumericalError when H is singular or the
// spectral radius of H^-1 Delta reaches 1 (the series would diverge).
MismatchResult mismatch_series(const std::vector<double>& H,
                               const std::vector<double>& delta,
                               const std::vector<double>& x,
                               const std::vector<double>& noise, int k_max);

struct SweepRecord {
    double fraction_correct = 0.0;
    double psnr_db = 0.0;
    double ssim = 0.0;
    double relative_psf_error = 0.0;
    std::uint64_t seed = 0;
    std::string decoder;
};

struct SweepPoint {
    double fraction_correct = 0.0;
    int trials = 0;
    double psnr_mean = 0.0, psnr_std = 0.0;
    double ssim_mean = 0.0, ssim_std = 0.0;
    double psf_err_mean = 0.0, psf_err_std = 0.0;
};

struct SweepConfig {
    std::vector<double> fractions_wrong = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5,
                                           0.6, 0.7, 0.8, 0.9, 1.0};
    int trials_per_point = 10;
    std::uint64_t master_seed = 0;
    DecoderConfig decoder = AdmmParams{};
    NoiseModel noise;
    int threads = 1;
};

// Brute-force key sweep: ciphertexts are captured once with the true key;
// each record perturbs the key by one grid fraction, simulates the candidate
// PSF and decodes the true ciphertext with it. Scenes are cycled over
// trials. Decoder failures yield NaN metrics for that record instead of
// aborting the sweep. Deterministic per master seed.
std::vector<SweepRecord> bruteforce_sweep(const std::vector<SceneImage>& scenes,
                                          const MaskPattern& key,
                                          const OpticsConfig& optics,
                                          const SweepConfig& cfg);

// Mean/std per fraction, in first-appearance order; NaN records are skipped.
std::vector<SweepPoint> summarize_sweep(const std::vector<SweepRecord>& records);

std::string sweep_records_csv(const std::vector<SweepRecord>& records);
std::string sweep_summary_csv(const std::vector<SweepPoint>& points);

}  // namespace lenscrypt
