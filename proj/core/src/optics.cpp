#include "lenscrypt/optics.hpp"

#include <algorithm>
#include <cmath>

#include "lenscrypt/util.hpp"

namespace lenscrypt {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Sample k of an n-sample centered axis: coordinate (k - n/2) * pitch.
inline double grid_coord(int k, int n, double pitch) {
    return (k - n / 2) * pitch;
}

// First sample index whose center lies in [lo, hi); clamped to [0, n).
inline int first_sample(double lo, int n, double pitch) {
    double k = lo / pitch + n / 2;
    int i = static_cast<int>(std::ceil(k - 1e-9));
    return std::clamp(i, 0, n);
}

inline int end_sample(double hi, int n, double pitch) {
    double k = hi / pitch + n / 2;
    int i = static_cast<int>(std::ceil(k - 1e-9));
    return std::clamp(i, 0, n);
}

}  // namespace

int OpticsConfig::bin_factor() const {
    if (sensor_pitch == 0.0) return grid_size / sensor_size;
    double ratio = sensor_pitch / grid_pitch;
    int m = static_cast<int>(std::lround(ratio));
    if (m < 1 || std::abs(ratio - m) > 1e-6)
        throw ConfigError(
            "optics: sensor_pitch must be a positive integer multiple of "
            "grid_pitch");
    return m;
}

void OpticsConfig::validate() const {
    if (!(d1 > 0.0) || !(d2 > 0.0))
        throw ConfigError("optics: distances must be positive");
    if (wavelengths.empty()) throw ConfigError("optics: no wavelengths");
    for (double w : wavelengths)
        if (!(w > 0.0)) throw ConfigError("optics: wavelengths must be positive");
    if (sensor_size < 8) throw ConfigError("optics: sensor_size must be >= 8");
    if (grid_size < sensor_size)
        throw ConfigError("optics: grid_size must be >= sensor_size");
    if (!(grid_pitch > 0.0)) throw ConfigError("optics: grid_pitch must be positive");
    if (sensor_pitch < 0.0)
        throw ConfigError("optics: sensor_pitch must be >= 0");
    if (static_cast<long long>(sensor_size) * bin_factor() > grid_size)
        throw ConfigError("optics: sensor window exceeds the simulation grid");
}

std::uint64_t fingerprint(const Psf& psf) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const Plane& p : psf.planes) {
        h = fnv1a64(&p.rows, sizeof(p.rows), h);
        h = fnv1a64(&p.cols, sizeof(p.cols), h);
        h = fnv1a64(p.v.data(), p.v.size() * sizeof(double), h);
    }
    return h;
}

ComplexField build_aperture(const MaskSpec& spec, const MaskPattern& pattern,
                            int channel, const OpticsConfig& cfg) {
    spec.validate();
    pattern.validate();
    cfg.validate();
    if (channel < 0 || channel >= cfg.channels())
        throw ConfigError("build_aperture: channel out of range");
    if (!(pattern.spec == spec))
        throw ConfigError("build_aperture: pattern spec mismatch");

    const int n = cfg.grid_size;
    const double gp = cfg.grid_pitch;
    if (spec.width() > n * gp || spec.height() > n * gp)
        throw ConfigError("build_aperture: grid too small for mask extent");
    if (gp > std::min(spec.pitch_x, spec.pitch_y) + 1e-15)
        throw ConfigError("build_aperture: grid pitch undersamples the mask");

    ComplexField field(n, n, gp);

    const double x0 = -spec.width() / 2.0;
    const double y0 = -spec.height() / 2.0;
    const double open_x = spec.pitch_x * std::sqrt(spec.fill_factor);
    const double open_y = spec.pitch_y * std::sqrt(spec.fill_factor);
    const int stripes_per_row = spec.cols * spec.subpixels_per_pixel;

    for (int r = 0; r < spec.rows; ++r) {
        for (int s = 0; s < stripes_per_row; ++s) {
            const std::size_t i =
                static_cast<std::size_t>(r) * stripes_per_row + s;
            if (spec.subpixels_per_pixel == 3 && s % 3 != channel % 3) continue;
            const double t = pattern.transmission(i);
            if (t == 0.0) continue;

            const double cx = x0 + (s + 0.5) * spec.pitch_x;
            const double cy = y0 + (r + 0.5) * spec.pitch_y;
            const int c_lo = first_sample(cx - open_x / 2.0, n, gp);
            const int c_hi = end_sample(cx + open_x / 2.0, n, gp);
            const int r_lo = first_sample(cy - open_y / 2.0, n, gp);
            const int r_hi = end_sample(cy + open_y / 2.0, n, gp);
            for (int rr = r_lo; rr < r_hi; ++rr)
                for (int cc = c_lo; cc < c_hi; ++cc)
                    field.at(rr, cc) = t;
        }
    }
    return field;
}

ComplexField spherical_wavefront(const OpticsConfig& cfg, int channel) {
    cfg.validate();
    if (channel < 0 || channel >= cfg.channels())
        throw ConfigError("spherical_wavefront: channel out of range");

    const int n = cfg.grid_size;
    const double gp = cfg.grid_pitch;
    const double lambda = cfg.wavelengths[channel];
    const double k = kTwoPi / lambda;
    const double d1sq = cfg.d1 * cfg.d1;

    ComplexField field(n, n, gp);
    for (int r = 0; r < n; ++r) {
        const double y = grid_coord(r, n, gp);
        for (int c = 0; c < n; ++c) {
            const double x = grid_coord(c, n, gp);
            field.at(r, c) = std::polar(1.0, k * std::sqrt(x * x + y * y + d1sq));
        }
    }
    return field;
}

ComplexField free_space_transfer(const OpticsConfig& cfg, double z, int channel) {
    cfg.validate();
    if (channel < 0 || channel >= cfg.channels())
        throw ConfigError("free_space_transfer: channel out of range");
    if (z < 0.0) throw ConfigError("free_space_transfer: z must be >= 0");

    const int n = cfg.grid_size;
    const double lambda = cfg.wavelengths[channel];
    const double inv_l2 = 1.0 / (lambda * lambda);
    // anti-aliasing cutoff of the sampled transfer phase, per axis
    const double du = 1.0 / (n * cfg.grid_pitch);
    const double u_limit = 1.0 / (lambda * std::sqrt((2.0 * du * z) * (2.0 * du * z) + 1.0));

    ComplexField h(n, n, cfg.grid_pitch);
    for (int r = 0; r < n; ++r) {
        const double uy = fft_freq(r, n, cfg.grid_pitch);
        for (int c = 0; c < n; ++c) {
            const double ux = fft_freq(c, n, cfg.grid_pitch);
            const double u2 = ux * ux + uy * uy;
            if (u2 >= inv_l2 || std::abs(ux) > u_limit || std::abs(uy) > u_limit) {
                h.at(r, c) = 0.0;
            } else {
                h.at(r, c) = std::polar(1.0, kTwoPi * z * std::sqrt(inv_l2 - u2));
            }
        }
    }
    return h;
}

namespace {

// Crop the central block and box-average factor x factor bins down to `out`.
Plane crop_and_bin(const std::vector<double>& intensity, int n, int out,
                   int factor) {
    const int crop = out * factor;
    const int off = (n - crop) / 2;
    Plane plane(out, out, 0.0);
    const double inv = 1.0 / (factor * factor);
    for (int r = 0; r < crop; ++r) {
        const int pr = r / factor;
        const double* row = intensity.data() + static_cast<std::size_t>(r + off) * n + off;
        for (int c = 0; c < crop; ++c)
            plane.at(pr, c / factor) += row[c] * inv;
    }
    return plane;
}

void normalize_plane(Plane& p, PsfNormalization norm) {
    switch (norm) {
        case PsfNormalization::Raw:
            return;
        case PsfNormalization::UnitSum: {
            double s = plane_sum(p);
            if (s > 0.0)
                for (double& x : p.v) x /= s;
            return;
        }
        case PsfNormalization::UnitPeak: {
            double m = plane_max(p);
            if (m > 0.0)
                for (double& x : p.v) x /= m;
            return;
        }
    }
}

}  // namespace

Psf simulate_psf(const MaskSpec& spec, const MaskPattern& pattern,
                 const OpticsConfig& cfg, PsfNormalization normalization) {
    cfg.validate();
    const int n = cfg.grid_size;
    const double extent = n * cfg.grid_pitch;
    if (extent < 2.0 * std::max(spec.width(), spec.height()))
        throw ConfigError("simulate_psf: grid must pad the mask extent at least 2x");

    Psf psf;
    psf.normalization = normalization;
    psf.planes.reserve(cfg.channels());

    for (int ch = 0; ch < cfg.channels(); ++ch) {
        ComplexField field = build_aperture(spec, pattern, ch, cfg);
        ComplexField wave = spherical_wavefront(cfg, ch);
        for (std::size_t i = 0; i < field.v.size(); ++i) field.v[i] *= wave.v[i];

        ComplexField spectrum = fft2(field);
        ComplexField transfer = free_space_transfer(cfg, cfg.d2, ch);
        for (std::size_t i = 0; i < spectrum.v.size(); ++i)
            spectrum.v[i] *= transfer.v[i];
        ComplexField sensor_field = ifft2(spectrum);

        std::vector<double> intensity(sensor_field.v.size());
        for (std::size_t i = 0; i < intensity.size(); ++i)
            intensity[i] = std::norm(sensor_field.v[i]);

        Plane plane = crop_and_bin(intensity, n, cfg.sensor_size, cfg.bin_factor());
        normalize_plane(plane, normalization);
        psf.planes.push_back(std::move(plane));
    }
    return psf;
}

OpticsConfig desk_optics(int sensor_size) {
    OpticsConfig cfg;
    cfg.d1 = 0.30;
    cfg.d2 = 0.002;
    cfg.wavelengths = {550e-9};
    cfg.grid_size = 256;
    cfg.grid_pitch = 2.5e-5;  // desk mask stripe pitch / 4
    cfg.sensor_size = sensor_size;
    // 64 px cover 3.2 mm, twice the desk mask width: the shadow of the mask
    // fills the central half of the frame and the convolution tails stay
    // mostly inside the sensor window
    cfg.sensor_pitch = 5e-5;
    return cfg;
}

OpticsConfig prototype_optics() {
    OpticsConfig cfg;
    cfg.d1 = 0.30;
    cfg.d2 = 0.002;
    cfg.wavelengths = {640e-9, 550e-9, 460e-9};
    cfg.grid_size = 1024;
    cfg.grid_pitch = 1.5e-5;  // prototype stripe pitch / 4
    cfg.sensor_size = 128;
    cfg.sensor_pitch = 3e-5;  // 128 px cover 3.84 mm of the 4.68 mm panel
    return cfg;
}

}  // namespace lenscrypt
