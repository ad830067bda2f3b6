#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lenscrypt/analysis.hpp"

namespace lenscrypt {

enum class ScoreKind { DataFidelity, MseRef, SsimRef };

// Which direction of a score means "authentic". Recorded explicitly so a
// sign flip can never silently invert a decision.
enum class ScoreOrientation { LowerIsAuthentic, HigherIsAuthentic };

ScoreOrientation orientation_of(ScoreKind kind);
std::string to_string(ScoreKind kind);
ScoreKind score_kind_from_string(std::string_view name);

struct AuthScore {
    int candidate_id = -1;
    ScoreKind kind = ScoreKind::DataFidelity;
    double value = 0.0;
};

// ||y - p * dec(y)||^2: decode the measurement with the candidate PSF,
// re-encode noiselessly, and return the squared residual. The true key
// explains its own measurement; a wrong key cannot.
AuthScore auth_data_fidelity(const Measurement& meas, const Psf& candidate_psf,
                             const DecoderConfig& decoder);
AuthScore auth_data_fidelity(const Measurement& meas,
                             const MaskPattern& candidate,
                             const DecoderConfig& decoder,
                             const OpticsConfig& optics);

// Reference-based score: decode with the candidate PSF and compare to a
// paired lensed capture of the same scene (MseRef or SsimRef).
AuthScore auth_reference(const Measurement& meas, const Psf& candidate_psf,
                         const SceneImage& lensed, ScoreKind metric,
                         const DecoderConfig& decoder);
AuthScore auth_reference(const Measurement& meas, const MaskPattern& candidate,
                         const SceneImage& lensed, ScoreKind metric,
                         const DecoderConfig& decoder,
                         const OpticsConfig& optics);

// Index of the best-scoring candidate under the kind's orientation; ties
// break to the lowest index. Requires at least two candidates; reference
// kinds require `lensed`.
int identify(const Measurement& meas, const std::vector<Psf>& candidate_psfs,
             ScoreKind kind, const DecoderConfig& decoder,
             const SceneImage* lensed = nullptr, int threads = 1);
int identify(const Measurement& meas,
             const std::vector<MaskPattern>& candidates, ScoreKind kind,
             const DecoderConfig& decoder, const OpticsConfig& optics,
             const SceneImage* lensed = nullptr, int threads = 1);

struct RocCurve {
    std::vector<double> thresholds;
    std::vector<double> tpr;
    std::vector<double> fpr;
    double auc = 0.0;  // trapezoid; equals the normalized Mann-Whitney U
};

// Threshold sweep over all distinct score values. "Positive" = authentic.
RocCurve roc(const std::vector<double>& authentic_scores,
             const std::vector<double>& impostor_scores,
             ScoreOrientation orientation);

// Normalized Mann-Whitney U (ties count one half).
double mann_whitney_auc(const std::vector<double>& authentic_scores,
                        const std::vector<double>& impostor_scores,
                        ScoreOrientation orientation);

struct ConfusionMatrix {
    int num_candidates = 0;
    std::vector<long long> counts;  // rows: true key, cols: identified key

    long long at(int true_idx, int chosen_idx) const {
        return counts[static_cast<std::size_t>(true_idx) * num_candidates +
                      chosen_idx];
    }
    long long row_sum(int true_idx) const;
    long long total() const;
    double accuracy() const;  // trace / total
};

struct LabeledMeasurement {
    Measurement meas;
    int true_index = 0;
};

// Runs identify over every measurement against the shared candidate list.
// Reference kinds read the lensed image matching each measurement from
// `lensed` (parallel to `items`).
ConfusionMatrix confusion(const std::vector<LabeledMeasurement>& items,
                          const std::vector<MaskPattern>& candidates,
                          ScoreKind kind, const DecoderConfig& decoder,
                          const OpticsConfig& optics,
                          const std::vector<SceneImage>* lensed = nullptr,
                          int threads = 1);
ConfusionMatrix confusion(const std::vector<LabeledMeasurement>& items,
                          const std::vector<Psf>& candidate_psfs,
                          ScoreKind kind, const DecoderConfig& decoder,
                          const std::vector<SceneImage>* lensed = nullptr,
                          int threads = 1);

std::string roc_csv(const RocCurve& curve);
std::string confusion_csv(const ConfusionMatrix& cm);

}  // namespace lenscrypt
