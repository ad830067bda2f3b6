#pragma once

#include <complex>
#include <vector>

#include "lenscrypt/image.hpp"

namespace lenscrypt {

using Cplx = std::complex<double>;

// Square or rectangular grid of complex amplitudes. `pitch` carries the
// spatial sampling pitch in meters when the grid represents a physical plane.
struct ComplexField {
    int rows = 0;
    int cols = 0;
    double pitch = 0.0;
    std::vector<Cplx> v;

    ComplexField() = default;
    ComplexField(int r, int c, double p = 0.0)
        : rows(r), cols(c), pitch(p), v(static_cast<std::size_t>(r) * c) {}

    Cplx& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
    Cplx at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }
    std::size_t size() const { return v.size(); }
};

// sum of |v|^2
double field_energy(const ComplexField& f);

// Out-of-place 2D DFT on a rows x cols row-major grid. The inverse is
// normalized by 1/(rows*cols). Plans are cached per shape; concurrent
// execution from multiple threads is safe.
void dft2(const Cplx* in, Cplx* out, int rows, int cols, bool inverse);

ComplexField fft2(const ComplexField& in);
ComplexField ifft2(const ComplexField& in);

// DFT sample frequency for bin k of n samples at the given pitch,
// in standard order: k < n/2 maps to k/(n*pitch), the rest wrap negative.
double fft_freq(int k, int n, double pitch);

}  // namespace lenscrypt
