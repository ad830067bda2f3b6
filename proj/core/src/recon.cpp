#include "lenscrypt/recon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lenscrypt/fft.hpp"

namespace lenscrypt {

using fourier::Otf;
using fourier::make_otf;
using fourier::pad_embed;

void AdmmParams::validate() const {
    if (iterations < 1) throw ConfigError("admm: iterations must be >= 1");
    if (!(rho > 0.0)) throw ConfigError("admm: rho must be > 0");
    if (tv_weight < 0.0) throw ConfigError("admm: tv_weight must be >= 0");
    if (tolerance && !(*tolerance > 0.0))
        throw ConfigError("admm: tolerance must be > 0");
}

std::string decoder_tag(const DecoderConfig& cfg) {
    if (std::holds_alternative<WienerParams>(cfg)) return "wiener";
    if (std::holds_alternative<L2Params>(cfg)) return "l2";
    return "admm";
}

double data_fidelity(const Image& meas, const Psf& psf, const Image& estimate) {
    if (meas.channels() != psf.channels() || !same_shape(meas, estimate))
        throw ConfigError("data_fidelity: shape mismatch");
    double acc = 0.0;
    for (int c = 0; c < meas.channels(); ++c) {
        Plane re = convolve(psf.planes[c], estimate.ch[c]);
        for (std::size_t i = 0; i < re.v.size(); ++i) {
            double d = meas.ch[c].v[i] - re.v[i];
            acc += d * d;
        }
    }
    return 0.5 * acc;
}

namespace {

void check_compat(const Measurement& meas, const Psf& psf) {
    if (meas.data.channels() != psf.channels())
        throw ConfigError("decode: measurement and PSF channel counts differ");
    if (meas.data.channels() == 0) throw ConfigError("decode: empty measurement");
    if (meas.data.rows() != psf.rows() || meas.data.cols() != psf.cols())
        throw ConfigError("decode: measurement and PSF sizes differ");
}

Plane regularized_inverse_channel(const Plane& y, const Plane& kernel,
                                  double floor, bool check_conditioning) {
    const int pr = 2 * y.rows;
    const int pc = 2 * y.cols;
    Otf otf = make_otf(kernel, pr, pc);

    if (check_conditioning) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const Cplx& h : otf.h) {
            double m = std::norm(h);
            lo = std::min(lo, m);
            hi = std::max(hi, m);
        }
        if (hi == 0.0 || lo < 1e-16 * hi)
            throw IllPosedError(
                "wiener_decode: zero noise floor with vanishing frequency "
                "response");
    }

    std::vector<Cplx> grid = pad_embed(y, pr, pc);
    std::vector<Cplx> spec(grid.size());
    dft2(grid.data(), spec.data(), pr, pc, false);
    for (std::size_t i = 0; i < spec.size(); ++i)
        spec[i] = std::conj(otf.h[i]) * spec[i] / (std::norm(otf.h[i]) + floor);
    dft2(spec.data(), grid.data(), pr, pc, true);
    return fourier::crop_real(grid, pr, pc, y.rows, y.cols);
}

DecodeResult closed_form_decode(const Measurement& meas, const Psf& psf,
                                double floor, bool check_conditioning) {
    check_compat(meas, psf);
    Image est(meas.data.channels(), meas.data.rows(), meas.data.cols());
    for (int c = 0; c < meas.data.channels(); ++c)
        est.ch[c] = regularized_inverse_channel(meas.data.ch[c], psf.planes[c],
                                                floor, check_conditioning);
    DecodeResult out;
    out.image = SceneImage(std::move(est));
    out.data_fidelity = data_fidelity(meas.data, psf, out.image.data);
    out.iterations_run = 1;
    return out;
}

}  // namespace

DecodeResult wiener_decode(const Measurement& meas, const Psf& psf,
                           double noise_floor) {
    if (noise_floor < 0.0)
        throw ConfigError("wiener_decode: noise_floor must be >= 0");
    return closed_form_decode(meas, psf, noise_floor, noise_floor == 0.0);
}

DecodeResult l2_decode(const Measurement& meas, const Psf& psf, double lambda) {
    if (!(lambda > 0.0)) throw ConfigError("l2_decode: lambda must be > 0");
    return closed_form_decode(meas, psf, lambda, false);
}

Plane l2_solve_padded(const Plane& meas_plane, const Plane& psf_plane,
                      double lambda) {
    if (!(lambda > 0.0)) throw ConfigError("l2_solve_padded: lambda must be > 0");
    if (!same_shape(meas_plane, psf_plane))
        throw ConfigError("l2_solve_padded: shape mismatch");
    const int pr = 2 * meas_plane.rows;
    const int pc = 2 * meas_plane.cols;
    Otf otf = make_otf(psf_plane, pr, pc);
    std::vector<Cplx> grid = pad_embed(meas_plane, pr, pc);
    std::vector<Cplx> spec(grid.size());
    dft2(grid.data(), spec.data(), pr, pc, false);
    for (std::size_t i = 0; i < spec.size(); ++i)
        spec[i] = std::conj(otf.h[i]) * spec[i] / (std::norm(otf.h[i]) + lambda);
    dft2(spec.data(), grid.data(), pr, pc, true);
    Plane out(pr, pc);
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = grid[i].real();
    return out;
}

namespace {

struct AdmmChannelResult {
    Plane image;  // cropped, not yet clamped
    int iterations = 0;
};

// Splitting solver for one channel on the padded grid:
//   minimize 0.5||y - C(Hx)||^2 + tv||Dx||_1 + indicator_{x>=0}(x)
// with splits v = Hx, u = Dx, w = x, a shared penalty rho, and a
// Fourier-diagonal x-update.
AdmmChannelResult admm_channel(const Plane& y, const Plane& kernel,
                               const AdmmParams& params, double tv_abs) {
    const int rows = y.rows, cols = y.cols;
    const int pr = 2 * rows, pc = 2 * cols;
    const std::size_t n = static_cast<std::size_t>(pr) * pc;
    const double rho = params.rho;

    Otf otf = make_otf(kernel, pr, pc);

    // frequency responses of the circular forward differences
    std::vector<Cplx> fdx(n), fdy(n);
    constexpr double two_pi = 6.283185307179586476925286766559;
    for (int r = 0; r < pr; ++r)
        for (int c = 0; c < pc; ++c) {
            std::size_t i = static_cast<std::size_t>(r) * pc + c;
            fdx[i] = std::polar(1.0, two_pi * c / pc) - 1.0;
            fdy[i] = std::polar(1.0, two_pi * r / pr) - 1.0;
        }
    std::vector<double> denom(n);
    for (std::size_t i = 0; i < n; ++i)
        denom[i] = std::norm(otf.h[i]) + std::norm(fdx[i]) + std::norm(fdy[i]) + 1.0;

    std::vector<Cplx> y_pad = pad_embed(y, pr, pc);

    std::vector<double> x(n, 0.0), hx(n, 0.0), dxx(n, 0.0), dxy(n, 0.0);
    std::vector<double> v(n, 0.0), ux(n, 0.0), uy(n, 0.0), w(n, 0.0);
    std::vector<double> av(n, 0.0), aux(n, 0.0), auy(n, 0.0), aw(n, 0.0);

    std::vector<Cplx> buf(n), spec(n), xhat(n);
    auto forward_into = [&](const std::vector<double>& a,
                            const std::vector<double>& b, double sign_b,
                            std::vector<Cplx>& out) {
        for (std::size_t i = 0; i < n; ++i) buf[i] = a[i] + sign_b * b[i];
        dft2(buf.data(), out.data(), pr, pc, false);
    };

    const double soft = tv_abs / rho;
    std::vector<double> fidelity_history;
    fidelity_history.reserve(params.iterations);
    int iters = 0;

    for (int k = 0; k < params.iterations; ++k) {
        // x-update: (H^T H + D^T D + I) x = H^T(v-av) + D^T(u-au) + (w-aw)
        forward_into(v, av, -1.0, spec);
        for (std::size_t i = 0; i < n; ++i) xhat[i] = std::conj(otf.h[i]) * spec[i];
        forward_into(ux, aux, -1.0, spec);
        for (std::size_t i = 0; i < n; ++i) xhat[i] += std::conj(fdx[i]) * spec[i];
        forward_into(uy, auy, -1.0, spec);
        for (std::size_t i = 0; i < n; ++i) xhat[i] += std::conj(fdy[i]) * spec[i];
        forward_into(w, aw, -1.0, spec);
        for (std::size_t i = 0; i < n; ++i)
            xhat[i] = (xhat[i] + spec[i]) / denom[i];

        dft2(xhat.data(), buf.data(), pr, pc, true);
        for (std::size_t i = 0; i < n; ++i) x[i] = buf[i].real();
        for (std::size_t i = 0; i < n; ++i) spec[i] = otf.h[i] * xhat[i];
        dft2(spec.data(), buf.data(), pr, pc, true);
        for (std::size_t i = 0; i < n; ++i) hx[i] = buf[i].real();
        for (std::size_t i = 0; i < n; ++i) spec[i] = fdx[i] * xhat[i];
        dft2(spec.data(), buf.data(), pr, pc, true);
        for (std::size_t i = 0; i < n; ++i) dxx[i] = buf[i].real();
        for (std::size_t i = 0; i < n; ++i) spec[i] = fdy[i] * xhat[i];
        dft2(spec.data(), buf.data(), pr, pc, true);
        for (std::size_t i = 0; i < n; ++i) dxy[i] = buf[i].real();

        // v-update: data prox inside the measured window, free outside
        double fid = 0.0;
        for (int r = 0; r < pr; ++r)
            for (int c = 0; c < pc; ++c) {
                std::size_t i = static_cast<std::size_t>(r) * pc + c;
                double t = hx[i] + av[i];
                if (r < rows && c < cols) {
                    double yv = y_pad[i].real();
                    v[i] = (yv + rho * t) / (1.0 + rho);
                    double d = yv - hx[i];
                    fid += d * d;
                } else {
                    v[i] = t;
                }
            }
        fid *= 0.5;

        // u-update: anisotropic TV shrinkage
        for (std::size_t i = 0; i < n; ++i) {
            double t = dxx[i] + aux[i];
            ux[i] = std::copysign(std::max(std::abs(t) - soft, 0.0), t);
            t = dxy[i] + auy[i];
            uy[i] = std::copysign(std::max(std::abs(t) - soft, 0.0), t);
        }

        // w-update: projection
        if (params.nonneg)
            for (std::size_t i = 0; i < n; ++i) w[i] = std::max(x[i] + aw[i], 0.0);
        else
            for (std::size_t i = 0; i < n; ++i) w[i] = x[i] + aw[i];

        // dual ascent
        for (std::size_t i = 0; i < n; ++i) av[i] += hx[i] - v[i];
        for (std::size_t i = 0; i < n; ++i) aux[i] += dxx[i] - ux[i];
        for (std::size_t i = 0; i < n; ++i) auy[i] += dxy[i] - uy[i];
        for (std::size_t i = 0; i < n; ++i) aw[i] += x[i] - w[i];

        iters = k + 1;
        fidelity_history.push_back(fid);
        if (k >= 10 && fidelity_history[k - 10] > 0.0 &&
            fid > 10.0 * fidelity_history[k - 10]) {
            throw DivergenceError(
                "admm_decode: data fidelity grew more than 10x over 10 "
                "iterations (fid=" +
                std::to_string(fid) + ")");
        }

        if (params.tolerance) {
            double pri = 0.0, ref = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double d1 = hx[i] - v[i], d2x = dxx[i] - ux[i],
                       d2y = dxy[i] - uy[i], d3 = x[i] - w[i];
                pri += d1 * d1 + d2x * d2x + d2y * d2y + d3 * d3;
                ref += v[i] * v[i] + ux[i] * ux[i] + uy[i] * uy[i] + w[i] * w[i];
            }
            if (std::sqrt(pri) <= *params.tolerance * (std::sqrt(ref) + 1e-12))
                break;
        }
    }

    AdmmChannelResult out;
    out.iterations = iters;
    out.image = Plane(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            out.image.at(r, c) = x[static_cast<std::size_t>(r) * pc + c];
    return out;
}

}  // namespace

DecodeResult admm_decode(const Measurement& meas, const Psf& psf,
                         const AdmmParams& params) {
    params.validate();
    check_compat(meas, psf);

    double peak = 0.0;
    for (const Plane& p : meas.data.ch) peak = std::max(peak, plane_max(p));
    const double tv_abs = params.tv_weight * peak;

    Image est(meas.data.channels(), meas.data.rows(), meas.data.cols());
    int iters = 0;
    for (int c = 0; c < meas.data.channels(); ++c) {
        AdmmChannelResult r =
            admm_channel(meas.data.ch[c], psf.planes[c], params, tv_abs);
        est.ch[c] = std::move(r.image);
        iters = std::max(iters, r.iterations);
    }

    DecodeResult out;
    out.image = SceneImage(std::move(est));
    out.data_fidelity = data_fidelity(meas.data, psf, out.image.data);
    out.iterations_run = iters;
    return out;
}

DecodeResult decode(const Measurement& meas, const Psf& psf,
                    const DecoderConfig& cfg) {
    return std::visit(
        [&](const auto& params) -> DecodeResult {
            using T = std::decay_t<decltype(params)>;
            if constexpr (std::is_same_v<T, WienerParams>)
                return wiener_decode(meas, psf, params.noise_floor);
            else if constexpr (std::is_same_v<T, L2Params>)
                return l2_decode(meas, psf, params.lambda);
            else
                return admm_decode(meas, psf, params);
        },
        cfg);
}

}  // namespace lenscrypt
