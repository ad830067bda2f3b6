#include "lenscrypt/image.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace lenscrypt {

bool same_shape(const Plane& a, const Plane& b) {
    return a.rows == b.rows && a.cols == b.cols;
}

double plane_sum(const Plane& p) {
    double s = 0.0;
    for (double x : p.v) s += x;
    return s;
}

double plane_max(const Plane& p) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : p.v) m = std::max(m, x);
    return m;
}

double plane_min(const Plane& p) {
    double m = std::numeric_limits<double>::infinity();
    for (double x : p.v) m = std::min(m, x);
    return m;
}

double plane_energy(const Plane& p) {
    double s = 0.0;
    for (double x : p.v) s += x * x;
    return s;
}

bool same_shape(const Image& a, const Image& b) {
    return a.channels() == b.channels() && a.rows() == b.rows() &&
           a.cols() == b.cols();
}

Image clamp01(Image img) {
    for (auto& plane : img.ch)
        for (double& x : plane.v) x = std::clamp(x, 0.0, 1.0);
    return img;
}

SceneImage make_synthetic_scene(int channels, int rows, int cols,
                                std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // blobs for low frequencies, rectangles and bar gratings for edges and
    // texture, so the scene has content across the spectrum
    Plane base(rows, cols, 0.0);
    const int blobs = 3 + static_cast<int>(rng() % 3);
    for (int b = 0; b < blobs; ++b) {
        double cr = unit(rng) * rows;
        double cc = unit(rng) * cols;
        double sigma = (0.06 + 0.14 * unit(rng)) * std::min(rows, cols);
        double amp = 0.3 + 0.7 * unit(rng);
        double inv = 1.0 / (2.0 * sigma * sigma);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) {
                double dr = r - cr, dc = c - cc;
                base.at(r, c) += amp * std::exp(-(dr * dr + dc * dc) * inv);
            }
    }
    const int rects = 4 + static_cast<int>(rng() % 4);
    for (int b = 0; b < rects; ++b) {
        int h = 4 + static_cast<int>(rng() % (rows / 3));
        int w = 4 + static_cast<int>(rng() % (cols / 3));
        int r0 = static_cast<int>(rng() % static_cast<std::uint64_t>(
                                      std::max(1, rows - h)));
        int c0 = static_cast<int>(rng() % static_cast<std::uint64_t>(
                                      std::max(1, cols - w)));
        double amp = unit(rng) < 0.3 ? -0.5 * unit(rng) : 0.4 + 0.6 * unit(rng);
        for (int r = r0; r < r0 + h; ++r)
            for (int c = c0; c < c0 + w; ++c) base.at(r, c) += amp;
    }
    {
        // one bar grating patch, period 6..14 px
        int h = rows / 3, w = cols / 3;
        int r0 = static_cast<int>(rng() % static_cast<std::uint64_t>(rows - h));
        int c0 = static_cast<int>(rng() % static_cast<std::uint64_t>(cols - w));
        int period = 6 + static_cast<int>(rng() % 9);
        bool horizontal = rng() & 1;
        for (int r = r0; r < r0 + h; ++r)
            for (int c = c0; c < c0 + w; ++c) {
                int k = horizontal ? r - r0 : c - c0;
                base.at(r, c) += (k % period) * 2 < period ? 0.8 : 0.0;
            }
    }

    double lo = plane_min(base), hi = plane_max(base);
    double span = hi > lo ? hi - lo : 1.0;
    for (double& x : base.v) x = (x - lo) / span;

    // raised-cosine border: the scene sits framed in a dark field of view,
    // like content on a display that does not fill the camera's FoV
    const double margin = 0.18 * std::min(rows, cols);
    auto edge_weight = [margin](int k, int n) {
        double d = std::min(k, n - 1 - k);
        if (d >= margin) return 1.0;
        return 0.5 * (1.0 - std::cos(3.14159265358979323846 * d / margin));
    };
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            base.at(r, c) *= edge_weight(r, rows) * edge_weight(c, cols);

    Image img(channels, rows, cols);
    for (int c = 0; c < channels; ++c) {
        double gain = channels == 1 ? 1.0 : 0.7 + 0.3 * unit(rng);
        for (std::size_t i = 0; i < base.size(); ++i)
            img.ch[c].v[i] = gain * base.v[i];
    }
    return SceneImage(std::move(img));
}

}  // namespace lenscrypt
