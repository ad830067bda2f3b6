#include "lenscrypt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "lenscrypt/util.hpp"

namespace lenscrypt {

KeyspaceBound keyspace_bound(double key_bits, int levels, int num_subpixels) {
    if (key_bits < 0.0) throw ConfigError("keyspace_bound: key_bits must be >= 0");
    if (levels < 2) throw ConfigError("keyspace_bound: levels must be >= 2");
    if (num_subpixels < 1)
        throw ConfigError("keyspace_bound: num_subpixels must be >= 1");

    KeyspaceBound out;
    const double capacity = num_subpixels * std::log2(static_cast<double>(levels));
    out.fraction = key_bits / capacity;
    if (out.fraction > 1.0) {
        out.fraction = 1.0;
        out.over_capacity = true;
    }
    return out;
}

long long effective_key_length(double fraction, int levels, int num_subpixels) {
    if (!(fraction > 0.0) || fraction > 1.0)
        throw ConfigError("effective_key_length: fraction must be in (0, 1]");
    if (levels < 2) throw ConfigError("effective_key_length: levels must be >= 2");
    if (num_subpixels < 1)
        throw ConfigError("effective_key_length: num_subpixels must be >= 1");
    return static_cast<long long>(std::floor(
        fraction * num_subpixels * std::log2(static_cast<double>(levels))));
}

double relative_psf_error(const Psf& truth, const Psf& candidate) {
    if (truth.channels() != candidate.channels() ||
        truth.rows() != candidate.rows() || truth.cols() != candidate.cols())
        throw ConfigError("relative_psf_error: shape mismatch");
    double num = 0.0, den = 0.0;
    for (int c = 0; c < truth.channels(); ++c) {
        const auto& a = truth.planes[c].v;
        const auto& b = candidate.planes[c].v;
        for (std::size_t i = 0; i < a.size(); ++i) {
            double d = a[i] - b[i];
            num += d * d;
            den += a[i] * a[i];
        }
    }
    if (den == 0.0) throw ConfigError("relative_psf_error: zero reference PSF");
    return std::sqrt(num / den);
}

double mse(const Image& a, const Image& b) {
    if (!same_shape(a, b)) throw ConfigError("mse: shape mismatch");
    double acc = 0.0;
    std::size_t n = 0;
    for (int c = 0; c < a.channels(); ++c) {
        for (std::size_t i = 0; i < a.ch[c].v.size(); ++i) {
            double d = a.ch[c].v[i] - b.ch[c].v[i];
            acc += d * d;
        }
        n += a.ch[c].v.size();
    }
    return acc / static_cast<double>(n);
}

double psnr(const Image& a, const Image& b, double peak) {
    double m = mse(a, b);
    if (m == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / m);
}

namespace {

// 11x11 Gaussian window, sigma 1.5, normalized.
const std::vector<double>& ssim_window() {
    static const std::vector<double> w = [] {
        std::vector<double> win(121);
        double sum = 0.0;
        for (int r = 0; r < 11; ++r)
            for (int c = 0; c < 11; ++c) {
                double dr = r - 5.0, dc = c - 5.0;
                double g = std::exp(-(dr * dr + dc * dc) / (2.0 * 1.5 * 1.5));
                win[r * 11 + c] = g;
                sum += g;
            }
        for (double& g : win) g /= sum;
        return win;
    }();
    return w;
}

double ssim_plane(const Plane& a, const Plane& b, double c1, double c2) {
    const int rows = a.rows, cols = a.cols;
    if (rows < 11 || cols < 11) {
        // small images: single global window
        double mu_a = plane_sum(a) / a.size(), mu_b = plane_sum(b) / b.size();
        double va = 0.0, vb = 0.0, vab = 0.0;
        for (std::size_t i = 0; i < a.v.size(); ++i) {
            double da = a.v[i] - mu_a, db = b.v[i] - mu_b;
            va += da * da;
            vb += db * db;
            vab += da * db;
        }
        va /= a.size();
        vb /= a.size();
        vab /= a.size();
        return ((2 * mu_a * mu_b + c1) * (2 * vab + c2)) /
               ((mu_a * mu_a + mu_b * mu_b + c1) * (va + vb + c2));
    }

    const auto& win = ssim_window();
    double acc = 0.0;
    long count = 0;
    for (int r = 0; r + 11 <= rows; ++r) {
        for (int c = 0; c + 11 <= cols; ++c) {
            double mu_a = 0.0, mu_b = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
            for (int i = 0; i < 11; ++i)
                for (int j = 0; j < 11; ++j) {
                    double wv = win[i * 11 + j];
                    double av = a.at(r + i, c + j), bv = b.at(r + i, c + j);
                    mu_a += wv * av;
                    mu_b += wv * bv;
                    saa += wv * av * av;
                    sbb += wv * bv * bv;
                    sab += wv * av * bv;
                }
            double va = saa - mu_a * mu_a;
            double vb = sbb - mu_b * mu_b;
            double vab = sab - mu_a * mu_b;
            acc += ((2 * mu_a * mu_b + c1) * (2 * vab + c2)) /
                   ((mu_a * mu_a + mu_b * mu_b + c1) * (va + vb + c2));
            ++count;
        }
    }
    return acc / count;
}

}  // namespace

double ssim(const Image& a, const Image& b, double peak) {
    if (!same_shape(a, b)) throw ConfigError("ssim: shape mismatch");
    const double c1 = (0.01 * peak) * (0.01 * peak);
    const double c2 = (0.03 * peak) * (0.03 * peak);
    double acc = 0.0;
    for (int c = 0; c < a.channels(); ++c)
        acc += ssim_plane(a.ch[c], b.ch[c], c1, c2);
    return acc / a.channels();
}

namespace {

std::vector<double> ranks_of(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
        double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
        i = j + 1;
    }
    return rank;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw ConfigError("spearman: need two equally sized lists");
    return pearson(ranks_of(x), ranks_of(y));
}

LineFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw ConfigError("linear_fit: need two equally sized lists");
    const std::size_t n = x.size();
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw ConfigError("linear_fit: degenerate x values");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

MismatchResult mismatch_series(const std::vector<double>& H,
                               const std::vector<double>& delta,
                               const std::vector<double>& x,
                               const std::vector<double>& noise, int k_max) {
    const auto n = static_cast<Eigen::Index>(x.size());
    if (n == 0) throw ConfigError("mismatch_series: empty state vector");
    if (H.size() != static_cast<std::size_t>(n * n) ||
        delta.size() != static_cast<std::size_t>(n * n) ||
        noise.size() != static_cast<std::size_t>(n))
        throw ConfigError("mismatch_series: inconsistent dimensions");
    if (k_max < 0) throw ConfigError("mismatch_series: k_max must be >= 0");

    using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const Mat> Hm(H.data(), n, n);
    Eigen::Map<const Mat> Dm(delta.data(), n, n);
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), n);
    Eigen::Map<const Eigen::VectorXd> nv(noise.data(), n);

    Eigen::FullPivLU<Eigen::MatrixXd> lu(Hm);
    if (!lu.isInvertible())
        throw NumericalError("mismatch_series: H is singular");

    Eigen::MatrixXd hinv_delta = lu.solve(Dm);
    double radius = 0.0;
    {
        Eigen::EigenSolver<Eigen::MatrixXd> eig(hinv_delta,
                                                /*computeEigenvectors=*/false);
        for (Eigen::Index i = 0; i < n; ++i)
            radius = std::max(radius, std::abs(eig.eigenvalues()[i]));
    }
    if (radius >= 1.0)
        throw NumericalError(
            "mismatch_series: spectral radius of H^-1 Delta is " +
            std::to_string(radius) + " >= 1; the series diverges");

    Eigen::VectorXd y = Hm * xv + nv;
    Eigen::VectorXd direct = (Hm - Dm).fullPivLu().solve(y);

    Eigen::VectorXd base = xv + lu.solve(nv);
    Eigen::VectorXd term = base;
    Eigen::VectorXd err = Eigen::VectorXd::Zero(n);
    for (int k = 1; k <= k_max; ++k) {
        term = hinv_delta * term;
        err += term;
    }
    Eigen::VectorXd series = base + err;

    MismatchResult out;
    out.direct.assign(direct.data(), direct.data() + n);
    out.series.assign(series.data(), series.data() + n);
    out.error_term.assign(err.data(), err.data() + n);
    out.spectral_radius = radius;
    return out;
}

std::vector<SweepRecord> bruteforce_sweep(const std::vector<SceneImage>& scenes,
                                          const MaskPattern& key,
                                          const OpticsConfig& optics,
                                          const SweepConfig& cfg) {
    if (scenes.empty()) throw ConfigError("bruteforce_sweep: no scenes");
    if (cfg.fractions_wrong.empty())
        throw ConfigError("bruteforce_sweep: no fractions");
    if (cfg.trials_per_point < 1)
        throw ConfigError("bruteforce_sweep: trials_per_point must be >= 1");

    Psf true_psf = simulate_psf(key.spec, key, optics);

    // one ciphertext per scene, captured with the true key
    std::vector<Measurement> ciphertexts(scenes.size());
    for (std::size_t s = 0; s < scenes.size(); ++s) {
        NoiseModel noise = cfg.noise;
        noise.seed = derive_seed(cfg.master_seed, 0x10000000ull + s);
        ciphertexts[s] = encrypt(scenes[s], true_psf, noise);
    }

    const std::size_t points = cfg.fractions_wrong.size();
    const std::size_t trials = static_cast<std::size_t>(cfg.trials_per_point);
    std::vector<SweepRecord> records(points * trials);

    parallel_for(records.size(), cfg.threads, [&](std::size_t idx) {
        const std::size_t p = idx / trials;
        const std::size_t t = idx % trials;
        const double f_wrong = cfg.fractions_wrong[p];
        const std::uint64_t seed = derive_seed(cfg.master_seed, idx);
        const std::size_t s = t % scenes.size();

        MaskPattern candidate = perturb(key, f_wrong, seed);
        Psf candidate_psf = simulate_psf(candidate.spec, candidate, optics);

        SweepRecord rec;
        rec.fraction_correct = fraction_correct(key, candidate);
        rec.relative_psf_error = relative_psf_error(true_psf, candidate_psf);
        rec.seed = seed;
        rec.decoder = decoder_tag(cfg.decoder);
        try {
            DecodeResult dec = decode(ciphertexts[s], candidate_psf, cfg.decoder);
            rec.psnr_db = psnr(scenes[s].data, dec.image.data, 1.0);
            rec.ssim = ssim(scenes[s].data, dec.image.data, 1.0);
        } catch (const NumericalError&) {
            rec.psnr_db = std::numeric_limits<double>::quiet_NaN();
            rec.ssim = std::numeric_limits<double>::quiet_NaN();
        }
        records[idx] = std::move(rec);
    });

    return records;
}

std::vector<SweepPoint> summarize_sweep(const std::vector<SweepRecord>& records) {
    std::vector<SweepPoint> points;
    std::vector<std::vector<const SweepRecord*>> groups;
    for (const auto& rec : records) {
        std::size_t g = 0;
        for (; g < points.size(); ++g)
            if (points[g].fraction_correct == rec.fraction_correct) break;
        if (g == points.size()) {
            points.push_back(SweepPoint{});
            points.back().fraction_correct = rec.fraction_correct;
            groups.emplace_back();
        }
        groups[g].push_back(&rec);
    }

    auto mean_std = [](const std::vector<double>& xs, double& mean, double& sd) {
        mean = 0.0;
        sd = 0.0;
        if (xs.empty()) return;
        for (double v : xs) mean += v;
        mean /= static_cast<double>(xs.size());
        for (double v : xs) sd += (v - mean) * (v - mean);
        sd = xs.size() > 1 ? std::sqrt(sd / (static_cast<double>(xs.size()) - 1.0))
                           : 0.0;
    };

    for (std::size_t g = 0; g < points.size(); ++g) {
        std::vector<double> ps, ss, es;
        for (const SweepRecord* rec : groups[g]) {
            if (std::isfinite(rec->psnr_db)) ps.push_back(rec->psnr_db);
            if (std::isfinite(rec->ssim)) ss.push_back(rec->ssim);
            if (std::isfinite(rec->relative_psf_error))
                es.push_back(rec->relative_psf_error);
        }
        points[g].trials = static_cast<int>(groups[g].size());
        mean_std(ps, points[g].psnr_mean, points[g].psnr_std);
        mean_std(ss, points[g].ssim_mean, points[g].ssim_std);
        mean_std(es, points[g].psf_err_mean, points[g].psf_err_std);
    }
    return points;
}

std::string sweep_records_csv(const std::vector<SweepRecord>& records) {
    std::ostringstream out;
    out << "fraction_correct,psnr_db,ssim,relative_psf_error,seed,decoder\n";
    for (const auto& r : records) {
        out << format_double(r.fraction_correct) << ',' << format_double(r.psnr_db)
            << ',' << format_double(r.ssim) << ','
            << format_double(r.relative_psf_error) << ',' << r.seed << ','
            << r.decoder << '\n';
    }
    return out.str();
}

std::string sweep_summary_csv(const std::vector<SweepPoint>& points) {
    std::ostringstream out;
    out << "fraction_correct,trials,psnr_mean,psnr_std,ssim_mean,ssim_std,"
           "psf_err_mean,psf_err_std\n";
    for (const auto& p : points) {
        out << format_double(p.fraction_correct) << ',' << p.trials << ','
            << format_double(p.psnr_mean) << ',' << format_double(p.psnr_std)
            << ',' << format_double(p.ssim_mean) << ',' << format_double(p.ssim_std)
            << ',' << format_double(p.psf_err_mean) << ','
            << format_double(p.psf_err_std) << '\n';
    }
    return out.str();
}

}  // namespace lenscrypt
