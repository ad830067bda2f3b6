#include <benchmark/benchmark.h>

#include "lenscrypt/analysis.hpp"

using namespace lenscrypt;

namespace {

struct DeskFixture {
    MaskSpec mask = desk_mask_spec();
    OpticsConfig optics = desk_optics(64);
    MaskPattern key = generate_uniform(mask, 7);
    Psf psf = simulate_psf(mask, key, optics);
    SceneImage scene = make_synthetic_scene(1, 64, 64, 11);
    Measurement meas = [this] {
        NoiseModel noise;
        noise.snr_db = 40.0;
        noise.seed = 3;
        return encrypt(scene, psf, noise);
    }();
};

DeskFixture& desk() {
    static DeskFixture f;
    return f;
}

}  // namespace

static void BM_SimulatePsf(benchmark::State& state) {
    auto& f = desk();
    OpticsConfig optics = f.optics;
    optics.grid_size = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(simulate_psf(f.mask, f.key, optics));
}
BENCHMARK(BM_SimulatePsf)->Arg(256)->Arg(512);

static void BM_Convolve(benchmark::State& state) {
    auto& f = desk();
    for (auto _ : state)
        benchmark::DoNotOptimize(convolve(f.psf.planes[0], f.scene.data.ch[0]));
}
BENCHMARK(BM_Convolve);

static void BM_WienerDecode(benchmark::State& state) {
    auto& f = desk();
    for (auto _ : state)
        benchmark::DoNotOptimize(wiener_decode(f.meas, f.psf, 1e-3));
}
BENCHMARK(BM_WienerDecode);

static void BM_AdmmDecode(benchmark::State& state) {
    auto& f = desk();
    AdmmParams params;
    params.iterations = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(admm_decode(f.meas, f.psf, params));
}
BENCHMARK(BM_AdmmDecode)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_GenerateKeyed(benchmark::State& state) {
    auto& f = desk();
    std::uint64_t t = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(generate_keyed(f.mask, "bench", ++t, "secret"));
}
BENCHMARK(BM_GenerateKeyed);

BENCHMARK_MAIN();
