#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lenscrypt/analysis.hpp"
#include "lenscrypt/auth.hpp"

namespace lenscrypt {

enum class ExperimentKind {
    Psf,
    Encrypt,
    Decrypt,
    Sweep,
    AuthEval,
    Roc,
    MismatchDemo,
    KeyBound,
};

ExperimentKind experiment_kind_from_string(std::string_view name);
std::string to_string(ExperimentKind kind);

// Where the key comes from.
struct PatternSource {
    enum class Kind { Uniform, Keyed, File } kind = Kind::Uniform;
    std::uint64_t seed = 1;                    // uniform
    std::string user = "user";                 // keyed
    std::uint64_t timestamp = 0;               // keyed
    std::string secret;                        // keyed
    std::filesystem::path file;                // file (.json or .bin)
};

// Where the plaintext scenes come from.
struct ScenesSource {
    enum class Kind { Synthetic, Directory } kind = Kind::Synthetic;
    int count = 10;                 // synthetic
    std::filesystem::path dir;      // directory of PNG/PGM/PPM files
};

struct SweepSettings {
    std::vector<double> fractions_wrong = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5,
                                           0.6, 0.7, 0.8, 0.9, 1.0};
    int trials_per_point = 10;
};

struct AuthSettings {
    int num_candidates = 16;
    int trials = 50;
    ScoreKind score = ScoreKind::DataFidelity;
    std::string user = "user";
    std::uint64_t timestamp_base = 1000;
    std::string secret = "default-secret";
};

struct MismatchSettings {
    int size = 8;
    int systems = 100;
    int k_max = 50;
    double target_spectral_radius = 0.4;
};

struct KeyBoundSettings {
    std::vector<double> key_bits = {128.0, 256.0};
    int levels = 8;
    int num_subpixels = 1404;
    double discernible_fraction = 0.6;
};

// One experiment run: every knob has a desk-scale default so a missing
// config section still yields a runnable setup.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Psf;
    OpticsConfig optics;
    MaskSpec mask;
    NoiseModel noise;
    DecoderConfig decoder = AdmmParams{};
    PatternSource pattern;
    ScenesSource scenes;
    SweepSettings sweep;
    AuthSettings auth;
    MismatchSettings mismatch;
    KeyBoundSettings keybound;
    std::uint64_t seed = 0;
    int threads = 1;
    bool verbose = false;
    std::filesystem::path out_dir = "out";
    std::filesystem::path input;  // encrypt: scene image; decrypt: .raw
};

// sha256 of the canonical JSON form; recorded in the run manifest.
std::string config_digest(const ExperimentConfig& cfg);

// Desk-scale defaults for an experiment kind (monochrome 12x16 mask).
ExperimentConfig default_config(ExperimentKind kind);

// Parses and validates a config JSON document; `kind` is the subcommand and
// must match the config's "experiment" field when that field is present.
// All referenced paths must resolve. Throws ConfigError.
ExperimentConfig load_config(const std::filesystem::path& json_file,
                             ExperimentKind kind);
ExperimentConfig parse_config(std::string_view json_text, ExperimentKind kind);

// Canonical JSON form of a config (used for the manifest digest).
std::string config_to_json(const ExperimentConfig& cfg);

// Executes the experiment and writes its artifacts (images, CSV tables and
// run_manifest.json) under cfg.out_dir. Output is deterministic for a fixed
// config and seed. Throws ConfigError / NumericalError / IoError.
void run(const ExperimentConfig& cfg);

// Loads every readable image in the directory in lexicographic name order,
// resized to rows x cols with `channels` channels and normalized to [0,1].
// Unreadable files are skipped and counted into *skipped.
std::vector<SceneImage> ingest_images(const std::filesystem::path& dir,
                                      int rows, int cols, int channels,
                                      int* skipped = nullptr);

}  // namespace lenscrypt
