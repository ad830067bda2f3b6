// lenscrypt: experiment runner for mask-based optical encryption and
// authentication. See README.md for the config format.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lenscrypt/runner.hpp"
#include "lenscrypt/util.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct GlobalOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<int> threads;
    bool verbose = false;
};

lenscrypt::ExperimentConfig build_config(const GlobalOptions& opts,
                                         lenscrypt::ExperimentKind kind,
                                         const std::optional<std::string>& input) {
    lenscrypt::ExperimentConfig cfg =
        opts.config.empty() ? lenscrypt::default_config(kind)
                            : lenscrypt::load_config(opts.config, kind);

    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.out_dir) cfg.out_dir = *opts.out_dir;
    if (opts.threads) cfg.threads = *opts.threads;
    if (const char* env = std::getenv("LENSCRYPT_THREADS")) {
        try {
            cfg.threads = std::stoi(env);
        } catch (...) {
            throw lenscrypt::ConfigError("LENSCRYPT_THREADS is not an integer");
        }
    }
    if (cfg.threads < 1)
        throw lenscrypt::ConfigError("threads must be >= 1");
    if (opts.verbose) cfg.verbose = true;
    if (input) cfg.input = *input;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lenscrypt: lensless-camera optical encryption toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    GlobalOptions opts;
    app.add_option("--config", opts.config, "JSON config file");
    app.add_option("--seed", opts.seed, "master seed (overrides config)");
    app.add_option("--out-dir", opts.out_dir, "output directory (overrides config)");
    app.add_option("--threads", opts.threads,
                   "worker threads (LENSCRYPT_THREADS overrides)");
    app.add_flag("--verbose", opts.verbose, "chatty progress output");

    struct Sub {
        CLI::App* cmd;
        lenscrypt::ExperimentKind kind;
    };
    std::vector<Sub> subs;
    auto add_sub = [&](const char* name, const char* help,
                       lenscrypt::ExperimentKind kind) {
        subs.push_back({app.add_subcommand(name, help), kind});
        return subs.back().cmd;
    };

    add_sub("psf", "simulate the PSF of a mask pattern", lenscrypt::ExperimentKind::Psf);
    std::optional<std::string> encrypt_input, decrypt_input;
    add_sub("encrypt", "optically encrypt a scene image",
            lenscrypt::ExperimentKind::Encrypt)
        ->add_option("--input", encrypt_input, "scene image (PNG/PGM/PPM)");
    add_sub("decrypt", "decode a measurement with a candidate key",
            lenscrypt::ExperimentKind::Decrypt)
        ->add_option("--input", decrypt_input, "measurement .raw file");
    add_sub("sweep", "brute-force key sweep over perturbation fractions",
            lenscrypt::ExperimentKind::Sweep);
    add_sub("auth-eval", "identification accuracy and confusion matrix",
            lenscrypt::ExperimentKind::AuthEval);
    add_sub("roc", "authentic-vs-impostor score ROC and AUC",
            lenscrypt::ExperimentKind::Roc);
    add_sub("mismatch-demo", "direct-vs-series wrong-system reconstruction",
            lenscrypt::ExperimentKind::MismatchDemo);
    add_sub("keybound", "key-space bound and effective key length",
            lenscrypt::ExperimentKind::KeyBound);

    CLI11_PARSE(app, argc, argv);

    try {
        for (const Sub& sub : subs) {
            if (!sub.cmd->parsed()) continue;
            std::optional<std::string> input;
            if (sub.kind == lenscrypt::ExperimentKind::Encrypt) input = encrypt_input;
            if (sub.kind == lenscrypt::ExperimentKind::Decrypt) input = decrypt_input;
            lenscrypt::ExperimentConfig cfg = build_config(opts, sub.kind, input);
            lenscrypt::run(cfg);
            return 0;
        }
        std::cerr << "error: no subcommand\n";
        return kExitConfig;
    } catch (const lenscrypt::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const lenscrypt::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const lenscrypt::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
