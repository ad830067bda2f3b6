#include "lenscrypt/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "lenscrypt/errors.hpp"

namespace lenscrypt {

namespace {

// FFTW plan creation is not thread-safe; execution via the new-array API is.
// Plans are created once per (rows, cols, direction) with FFTW_UNALIGNED so
// they can run on arbitrary caller buffers.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(int rows, int cols, bool inverse) {
        std::scoped_lock lock(mutex_);
        auto key = std::tuple(rows, cols, inverse);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;

        std::size_t n = static_cast<std::size_t>(rows) * cols;
        fftw_complex* in = fftw_alloc_complex(n);
        fftw_complex* out = fftw_alloc_complex(n);
        fftw_plan plan = fftw_plan_dft_2d(rows, cols, in, out,
                                          inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(in);
        fftw_free(out);
        if (!plan) throw NumericalError("fftw: plan creation failed");
        plans_.emplace(key, plan);
        return plan;
    }

private:
    PlanCache() = default;
    std::mutex mutex_;
    std::map<std::tuple<int, int, bool>, fftw_plan> plans_;
};

}  // namespace

void dft2(const Cplx* in, Cplx* out, int rows, int cols, bool inverse) {
    if (rows <= 0 || cols <= 0) throw ConfigError("dft2: empty grid");
    if (in == out) {
        // plans are out-of-place; stage through a scratch buffer
        std::vector<Cplx> tmp(in, in + static_cast<std::size_t>(rows) * cols);
        dft2(tmp.data(), out, rows, cols, inverse);
        return;
    }
    fftw_plan plan = PlanCache::instance().get(rows, cols, inverse);
    fftw_execute_dft(plan,
                     reinterpret_cast<fftw_complex*>(const_cast<Cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
    if (inverse) {
        double scale = 1.0 / (static_cast<double>(rows) * cols);
        std::size_t n = static_cast<std::size_t>(rows) * cols;
        for (std::size_t i = 0; i < n; ++i) out[i] *= scale;
    }
}

ComplexField fft2(const ComplexField& in) {
    ComplexField out(in.rows, in.cols, in.pitch);
    dft2(in.v.data(), out.v.data(), in.rows, in.cols, false);
    return out;
}

ComplexField ifft2(const ComplexField& in) {
    ComplexField out(in.rows, in.cols, in.pitch);
    dft2(in.v.data(), out.v.data(), in.rows, in.cols, true);
    return out;
}

double fft_freq(int k, int n, double pitch) {
    int signed_k = k < (n + 1) / 2 ? k : k - n;
    return signed_k / (n * pitch);
}

double field_energy(const ComplexField& f) {
    double s = 0.0;
    for (const Cplx& z : f.v) s += std::norm(z);
    return s;
}

}  // namespace lenscrypt
