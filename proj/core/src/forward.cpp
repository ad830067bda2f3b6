#include "lenscrypt/forward.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lenscrypt/fft.hpp"
#include "lenscrypt/util.hpp"

namespace lenscrypt {

void NoiseModel::validate() const {
    if (snr_db && !std::isfinite(*snr_db))
        throw ConfigError("noise: snr_db must be finite");
    if (quantization_bits && (*quantization_bits < 1 || *quantization_bits > 16))
        throw ConfigError("noise: quantization_bits must be in [1, 16]");
}

namespace fourier {

std::pair<int, int> center_of_mass(const Plane& kernel) {
    double total = 0.0, mr = 0.0, mc = 0.0;
    for (int r = 0; r < kernel.rows; ++r)
        for (int c = 0; c < kernel.cols; ++c) {
            double w = kernel.at(r, c);
            total += w;
            mr += w * r;
            mc += w * c;
        }
    if (total <= 0.0) return {kernel.rows / 2, kernel.cols / 2};
    return {static_cast<int>(std::llround(mr / total)),
            static_cast<int>(std::llround(mc / total))};
}

std::vector<Cplx> pad_embed(const Plane& p, int pad_rows, int pad_cols) {
    std::vector<Cplx> grid(static_cast<std::size_t>(pad_rows) * pad_cols);
    for (int r = 0; r < p.rows; ++r)
        for (int c = 0; c < p.cols; ++c)
            grid[static_cast<std::size_t>(r) * pad_cols + c] = p.at(r, c);
    return grid;
}

Plane crop_real(const std::vector<Cplx>& grid, int pad_rows, int pad_cols,
                int rows, int cols) {
    (void)pad_rows;
    Plane out(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            out.at(r, c) = grid[static_cast<std::size_t>(r) * pad_cols + c].real();
    return out;
}

Otf make_otf(const Plane& kernel, int pad_rows, int pad_cols) {
    if (kernel.rows > pad_rows || kernel.cols > pad_cols)
        throw ConfigError("make_otf: padded grid smaller than the kernel");
    auto [com_r, com_c] = center_of_mass(kernel);

    // embed with a circular shift of -com so the anchor lands on the origin
    std::vector<Cplx> grid(static_cast<std::size_t>(pad_rows) * pad_cols);
    for (int r = 0; r < kernel.rows; ++r) {
        int dst_r = (r - com_r + pad_rows) % pad_rows;
        for (int c = 0; c < kernel.cols; ++c) {
            int dst_c = (c - com_c + pad_cols) % pad_cols;
            grid[static_cast<std::size_t>(dst_r) * pad_cols + dst_c] = kernel.at(r, c);
        }
    }

    Otf otf;
    otf.pad_rows = pad_rows;
    otf.pad_cols = pad_cols;
    otf.h.resize(grid.size());
    dft2(grid.data(), otf.h.data(), pad_rows, pad_cols, false);
    return otf;
}

}  // namespace fourier

Plane convolve(const Plane& kernel, const Plane& image) {
    if (!same_shape(kernel, image))
        throw ConfigError("convolve: kernel and image shapes differ");
    const int pr = 2 * image.rows;
    const int pc = 2 * image.cols;

    fourier::Otf otf = fourier::make_otf(kernel, pr, pc);
    std::vector<Cplx> grid = fourier::pad_embed(image, pr, pc);
    std::vector<Cplx> spec(grid.size());
    dft2(grid.data(), spec.data(), pr, pc, false);
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= otf.h[i];
    dft2(spec.data(), grid.data(), pr, pc, true);
    return fourier::crop_real(grid, pr, pc, image.rows, image.cols);
}

Measurement encrypt(const SceneImage& scene, const Psf& psf,
                    const NoiseModel& noise) {
    noise.validate();
    const Image& x = scene.data;
    if (x.channels() != psf.channels())
        throw ConfigError("encrypt: scene and PSF channel counts differ");
    if (x.channels() == 0) throw ConfigError("encrypt: empty scene");
    if (x.rows() != psf.rows() || x.cols() != psf.cols())
        throw ConfigError("encrypt: scene and PSF sizes differ");

    Measurement meas;
    meas.snr_db = noise.snr_db;
    meas.seed = noise.seed;
    meas.psf_fingerprint = fingerprint(psf);
    meas.data = Image(x.channels(), x.rows(), x.cols());

    std::mt19937_64 rng(noise.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    for (int c = 0; c < x.channels(); ++c) {
        Plane y = convolve(psf.planes[c], x.ch[c]);

        if (noise.snr_db) {
            double signal_power = plane_energy(y) / static_cast<double>(y.size());
            double sigma =
                std::sqrt(signal_power * std::pow(10.0, -*noise.snr_db / 10.0));
            for (double& v : y.v) v += sigma * gauss(rng);
        }
        for (double& v : y.v) v = std::max(v, 0.0);

        if (noise.quantization_bits) {
            double peak = plane_max(y);
            if (peak > 0.0) {
                double levels = static_cast<double>((1 << *noise.quantization_bits) - 1);
                for (double& v : y.v)
                    v = std::round(v / peak * levels) / levels * peak;
            }
        }
        meas.data.ch[c] = std::move(y);
    }
    return meas;
}

}  // namespace lenscrypt
