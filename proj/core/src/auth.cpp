#include "lenscrypt/auth.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "lenscrypt/util.hpp"

namespace lenscrypt {

ScoreOrientation orientation_of(ScoreKind kind) {
    switch (kind) {
        case ScoreKind::DataFidelity:
        case ScoreKind::MseRef:
            return ScoreOrientation::LowerIsAuthentic;
        case ScoreKind::SsimRef:
            return ScoreOrientation::HigherIsAuthentic;
    }
    throw ConfigError("unknown score kind");
}

std::string to_string(ScoreKind kind) {
    switch (kind) {
        case ScoreKind::DataFidelity: return "data_fidelity";
        case ScoreKind::MseRef: return "mse_ref";
        case ScoreKind::SsimRef: return "ssim_ref";
    }
    throw ConfigError("unknown score kind");
}

ScoreKind score_kind_from_string(std::string_view name) {
    if (name == "data_fidelity") return ScoreKind::DataFidelity;
    if (name == "mse_ref") return ScoreKind::MseRef;
    if (name == "ssim_ref") return ScoreKind::SsimRef;
    throw ConfigError("unknown score kind: " + std::string(name));
}

AuthScore auth_data_fidelity(const Measurement& meas, const Psf& candidate_psf,
                             const DecoderConfig& decoder) {
    DecodeResult dec = decode(meas, candidate_psf, decoder);
    AuthScore score;
    score.kind = ScoreKind::DataFidelity;
    // squared residual of the noiseless re-encoding
    score.value = 2.0 * data_fidelity(meas.data, candidate_psf, dec.image.data);
    return score;
}

AuthScore auth_data_fidelity(const Measurement& meas,
                             const MaskPattern& candidate,
                             const DecoderConfig& decoder,
                             const OpticsConfig& optics) {
    Psf psf = simulate_psf(candidate.spec, candidate, optics);
    return auth_data_fidelity(meas, psf, decoder);
}

AuthScore auth_reference(const Measurement& meas, const Psf& candidate_psf,
                         const SceneImage& lensed, ScoreKind metric,
                         const DecoderConfig& decoder) {
    if (metric != ScoreKind::MseRef && metric != ScoreKind::SsimRef)
        throw ConfigError("auth_reference: metric must be mse_ref or ssim_ref");
    DecodeResult dec = decode(meas, candidate_psf, decoder);
    if (!same_shape(dec.image.data, lensed.data))
        throw ConfigError("auth_reference: lensed shape differs from decode");
    AuthScore score;
    score.kind = metric;
    score.value = metric == ScoreKind::MseRef
                      ? mse(lensed.data, dec.image.data)
                      : ssim(lensed.data, dec.image.data, 1.0);
    return score;
}

AuthScore auth_reference(const Measurement& meas, const MaskPattern& candidate,
                         const SceneImage& lensed, ScoreKind metric,
                         const DecoderConfig& decoder,
                         const OpticsConfig& optics) {
    Psf psf = simulate_psf(candidate.spec, candidate, optics);
    return auth_reference(meas, psf, lensed, metric, decoder);
}

namespace {

bool better(double a, double b, ScoreOrientation o) {
    return o == ScoreOrientation::LowerIsAuthentic ? a < b : a > b;
}

}  // namespace

int identify(const Measurement& meas, const std::vector<Psf>& candidate_psfs,
             ScoreKind kind, const DecoderConfig& decoder,
             const SceneImage* lensed, int threads) {
    if (candidate_psfs.size() < 2)
        throw ConfigError("identify: need at least two candidates");
    if (kind != ScoreKind::DataFidelity && lensed == nullptr)
        throw ConfigError("identify: reference score needs a lensed image");

    std::vector<double> values(candidate_psfs.size());
    parallel_for(candidate_psfs.size(), threads, [&](std::size_t i) {
        values[i] = kind == ScoreKind::DataFidelity
                        ? auth_data_fidelity(meas, candidate_psfs[i], decoder).value
                        : auth_reference(meas, candidate_psfs[i], *lensed, kind,
                                         decoder).value;
    });

    const ScoreOrientation o = orientation_of(kind);
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (better(values[i], values[best], o)) best = i;
    return static_cast<int>(best);
}

int identify(const Measurement& meas,
             const std::vector<MaskPattern>& candidates, ScoreKind kind,
             const DecoderConfig& decoder, const OpticsConfig& optics,
             const SceneImage* lensed, int threads) {
    if (candidates.size() < 2)
        throw ConfigError("identify: need at least two candidates");
    std::vector<Psf> psfs(candidates.size());
    parallel_for(candidates.size(), threads, [&](std::size_t i) {
        psfs[i] = simulate_psf(candidates[i].spec, candidates[i], optics);
    });
    return identify(meas, psfs, kind, decoder, lensed, threads);
}

double mann_whitney_auc(const std::vector<double>& authentic_scores,
                        const std::vector<double>& impostor_scores,
                        ScoreOrientation orientation) {
    if (authentic_scores.empty() || impostor_scores.empty())
        throw ConfigError("roc: both score lists must be non-empty");
    double u = 0.0;
    for (double a : authentic_scores)
        for (double i : impostor_scores) {
            if (a == i)
                u += 0.5;
            else if (better(a, i, orientation))
                u += 1.0;
        }
    return u / (static_cast<double>(authentic_scores.size()) *
                static_cast<double>(impostor_scores.size()));
}

RocCurve roc(const std::vector<double>& authentic_scores,
             const std::vector<double>& impostor_scores,
             ScoreOrientation orientation) {
    if (authentic_scores.empty() || impostor_scores.empty())
        throw ConfigError("roc: both score lists must be non-empty");

    std::set<double> pooled(authentic_scores.begin(), authentic_scores.end());
    pooled.insert(impostor_scores.begin(), impostor_scores.end());
    std::vector<double> thresholds(pooled.begin(), pooled.end());
    if (orientation == ScoreOrientation::HigherIsAuthentic)
        std::reverse(thresholds.begin(), thresholds.end());

    auto accepted = [&](double score, double threshold) {
        return orientation == ScoreOrientation::LowerIsAuthentic
                   ? score <= threshold
                   : score >= threshold;
    };

    RocCurve curve;
    curve.thresholds = thresholds;
    curve.tpr.reserve(thresholds.size());
    curve.fpr.reserve(thresholds.size());
    for (double th : thresholds) {
        long tp = 0, fp = 0;
        for (double a : authentic_scores) tp += accepted(a, th);
        for (double i : impostor_scores) fp += accepted(i, th);
        curve.tpr.push_back(static_cast<double>(tp) / authentic_scores.size());
        curve.fpr.push_back(static_cast<double>(fp) / impostor_scores.size());
    }

    double auc = 0.0, prev_fpr = 0.0, prev_tpr = 0.0;
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        auc += (curve.fpr[i] - prev_fpr) * (curve.tpr[i] + prev_tpr) / 2.0;
        prev_fpr = curve.fpr[i];
        prev_tpr = curve.tpr[i];
    }
    auc += (1.0 - prev_fpr) * (1.0 + prev_tpr) / 2.0;
    curve.auc = auc;
    return curve;
}

long long ConfusionMatrix::row_sum(int true_idx) const {
    long long s = 0;
    for (int c = 0; c < num_candidates; ++c) s += at(true_idx, c);
    return s;
}

long long ConfusionMatrix::total() const {
    long long s = 0;
    for (long long v : counts) s += v;
    return s;
}

double ConfusionMatrix::accuracy() const {
    long long diag = 0;
    for (int i = 0; i < num_candidates; ++i) diag += at(i, i);
    long long t = total();
    return t == 0 ? 0.0 : static_cast<double>(diag) / static_cast<double>(t);
}

ConfusionMatrix confusion(const std::vector<LabeledMeasurement>& items,
                          const std::vector<Psf>& candidate_psfs,
                          ScoreKind kind, const DecoderConfig& decoder,
                          const std::vector<SceneImage>* lensed, int threads) {
    if (items.empty()) throw ConfigError("confusion: no measurements");
    if (candidate_psfs.size() < 2)
        throw ConfigError("confusion: need at least two candidates");
    const int m = static_cast<int>(candidate_psfs.size());
    for (const auto& item : items)
        if (item.true_index < 0 || item.true_index >= m)
            throw ConfigError("confusion: true key index outside candidate list");
    if (kind != ScoreKind::DataFidelity) {
        if (lensed == nullptr || lensed->size() != items.size())
            throw ConfigError("confusion: reference score needs lensed images");
    }

    std::vector<int> chosen(items.size());
    parallel_for(items.size(), threads, [&](std::size_t i) {
        const SceneImage* ref = lensed ? &(*lensed)[i] : nullptr;
        chosen[i] = identify(items[i].meas, candidate_psfs, kind, decoder, ref, 1);
    });

    ConfusionMatrix cm;
    cm.num_candidates = m;
    cm.counts.assign(static_cast<std::size_t>(m) * m, 0);
    for (std::size_t i = 0; i < items.size(); ++i)
        ++cm.counts[static_cast<std::size_t>(items[i].true_index) * m + chosen[i]];
    return cm;
}

ConfusionMatrix confusion(const std::vector<LabeledMeasurement>& items,
                          const std::vector<MaskPattern>& candidates,
                          ScoreKind kind, const DecoderConfig& decoder,
                          const OpticsConfig& optics,
                          const std::vector<SceneImage>* lensed, int threads) {
    std::vector<Psf> psfs(candidates.size());
    parallel_for(candidates.size(), threads, [&](std::size_t i) {
        psfs[i] = simulate_psf(candidates[i].spec, candidates[i], optics);
    });
    return confusion(items, psfs, kind, decoder, lensed, threads);
}

std::string roc_csv(const RocCurve& curve) {
    std::ostringstream out;
    out << "threshold,fpr,tpr\n";
    for (std::size_t i = 0; i < curve.thresholds.size(); ++i)
        out << format_double(curve.thresholds[i]) << ','
            << format_double(curve.fpr[i]) << ',' << format_double(curve.tpr[i])
            << '\n';
    return out.str();
}

std::string confusion_csv(const ConfusionMatrix& cm) {
    std::ostringstream out;
    out << "true_index";
    for (int c = 0; c < cm.num_candidates; ++c) out << ",candidate_" << c;
    out << '\n';
    for (int r = 0; r < cm.num_candidates; ++r) {
        out << r;
        for (int c = 0; c < cm.num_candidates; ++c) out << ',' << cm.at(r, c);
        out << '\n';
    }
    return out.str();
}

}  // namespace lenscrypt
