// Grid search over the ADMM hyperparameters (rho, tv_weight) on desk-scale
// synthetic scenes. The shipped AdmmParams defaults were picked with this
// tool; rerun it after changing the forward model.

#include <iostream>
#include <vector>

#include "lenscrypt/analysis.hpp"
#include "lenscrypt/util.hpp"

using namespace lenscrypt;

int main(int argc, char** argv) {
    int scenes_n = argc > 1 ? std::atoi(argv[1]) : 5;
    std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 7;

    MaskSpec mask = desk_mask_spec();
    OpticsConfig optics = desk_optics(64);
    MaskPattern key = generate_uniform(mask, seed);
    Psf psf = simulate_psf(mask, key, optics);

    std::vector<SceneImage> scenes;
    std::vector<Measurement> meas;
    for (int i = 0; i < scenes_n; ++i) {
        scenes.push_back(make_synthetic_scene(1, optics.sensor_size,
                                              optics.sensor_size,
                                              derive_seed(seed, 100 + i)));
        NoiseModel noise;
        noise.snr_db = 40.0;
        noise.seed = derive_seed(seed, 200 + i);
        meas.push_back(encrypt(scenes.back(), psf, noise));
    }

    const std::vector<double> rhos = {0.25, 0.5, 1.0, 2.0, 4.0};
    const std::vector<double> tvs = {1e-4, 3e-4, 1e-3, 3e-3, 1e-2};

    std::cout << "rho,tv_weight,mean_psnr_db\n";
    double best = -1e9, best_rho = 0, best_tv = 0;
    for (double rho : rhos) {
        for (double tv : tvs) {
            AdmmParams params;
            params.iterations = 100;
            params.rho = rho;
            params.tv_weight = tv;
            double acc = 0.0;
            for (int i = 0; i < scenes_n; ++i) {
                DecodeResult dec = admm_decode(meas[i], psf, params);
                acc += psnr(scenes[i].data, dec.image.data, 1.0);
            }
            double mean = acc / scenes_n;
            std::cout << format_double(rho) << ',' << format_double(tv) << ','
                      << format_double(mean) << '\n';
            if (mean > best) {
                best = mean;
                best_rho = rho;
                best_tv = tv;
            }
        }
    }
    std::cout << "# best: rho=" << format_double(best_rho)
              << " tv_weight=" << format_double(best_tv)
              << " mean_psnr=" << format_double(best) << " dB\n";
    return 0;
}
