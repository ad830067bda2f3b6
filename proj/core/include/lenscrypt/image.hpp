#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lenscrypt/errors.hpp"

namespace lenscrypt {

// Row-major 2D grid of doubles.
struct Plane {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Plane() = default;
    Plane(int r, int c, double fill = 0.0)
        : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, fill) {}

    double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }
    std::size_t size() const { return v.size(); }
};

bool same_shape(const Plane& a, const Plane& b);
double plane_sum(const Plane& p);
double plane_max(const Plane& p);
double plane_min(const Plane& p);
// sum of squares
double plane_energy(const Plane& p);

// Multi-channel image, planar layout; all channels share one shape.
struct Image {
    std::vector<Plane> ch;

    Image() = default;
    Image(int channels, int rows, int cols, double fill = 0.0)
        : ch(channels, Plane(rows, cols, fill)) {}

    int channels() const { return static_cast<int>(ch.size()); }
    int rows() const { return ch.empty() ? 0 : ch[0].rows; }
    int cols() const { return ch.empty() ? 0 : ch[0].cols; }
    std::size_t pixel_count() const {
        return ch.empty() ? 0 : ch.size() * ch[0].size();
    }
};

bool same_shape(const Image& a, const Image& b);
Image clamp01(Image img);

// A scene to be imaged. Values are clamped to [0, 1] at construction.
struct SceneImage {
    Image data;

    SceneImage() = default;
    explicit SceneImage(Image img) : data(clamp01(std::move(img))) {}
};

// Deterministic smooth test scene: a seeded sum of Gaussian blobs,
// min-max normalized per image with mild per-channel gains.
SceneImage make_synthetic_scene(int channels, int rows, int cols,
                                std::uint64_t seed);

}  // namespace lenscrypt
