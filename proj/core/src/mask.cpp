#include "lenscrypt/mask.hpp"

#include <sodium.h>

#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "lenscrypt/util.hpp"

namespace lenscrypt {

namespace {

using nlohmann::json;

void ensure_sodium() {
    static const int rc = sodium_init();
    if (rc < 0) throw Error("libsodium initialization failed");
}

// Reads fixed-width little-endian bit groups from a byte stream.
class BitReader {
public:
    explicit BitReader(std::vector<std::uint8_t> bytes)
        : bytes_(std::move(bytes)) {}

    std::uint32_t take(int bits) {
        while (filled_ < bits) {
            acc_ |= static_cast<std::uint64_t>(bytes_.at(pos_++)) << filled_;
            filled_ += 8;
        }
        std::uint32_t out = static_cast<std::uint32_t>(acc_ & ((1ull << bits) - 1));
        acc_ >>= bits;
        filled_ -= bits;
        return out;
    }

private:
    std::vector<std::uint8_t> bytes_;
    std::size_t pos_ = 0;
    std::uint64_t acc_ = 0;
    int filled_ = 0;
};

std::vector<std::uint8_t> pack_levels(const std::vector<std::uint16_t>& levels,
                                      int bits) {
    std::vector<std::uint8_t> out;
    out.reserve((levels.size() * bits + 7) / 8);
    std::uint64_t acc = 0;
    int filled = 0;
    for (std::uint16_t w : levels) {
        acc |= static_cast<std::uint64_t>(w) << filled;
        filled += bits;
        while (filled >= 8) {
            out.push_back(static_cast<std::uint8_t>(acc & 0xff));
            acc >>= 8;
            filled -= 8;
        }
    }
    if (filled > 0) out.push_back(static_cast<std::uint8_t>(acc & 0xff));
    return out;
}

std::vector<std::uint16_t> unpack_levels(std::span<const std::uint8_t> bytes,
                                         int bits, std::size_t count) {
    if (bytes.size() * 8 < count * static_cast<std::size_t>(bits))
        throw IoError("mask: packed weight payload too short");
    BitReader reader(std::vector<std::uint8_t>(bytes.begin(), bytes.end()));
    std::vector<std::uint16_t> levels(count);
    for (auto& w : levels) w = static_cast<std::uint16_t>(reader.take(bits));
    return levels;
}

void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

std::uint32_t get_u32le(std::span<const std::uint8_t> b, std::size_t at) {
    return static_cast<std::uint32_t>(b[at]) |
           (static_cast<std::uint32_t>(b[at + 1]) << 8) |
           (static_cast<std::uint32_t>(b[at + 2]) << 16) |
           (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

json spec_to_json(const MaskSpec& s) {
    return json{{"rows", s.rows},
                {"cols", s.cols},
                {"subpixels_per_pixel", s.subpixels_per_pixel},
                {"pitch_x", s.pitch_x},
                {"pitch_y", s.pitch_y},
                {"bit_depth", s.bit_depth},
                {"fill_factor", s.fill_factor}};
}

MaskSpec spec_from_json(const json& j) {
    MaskSpec s;
    s.rows = j.at("rows").get<int>();
    s.cols = j.at("cols").get<int>();
    s.subpixels_per_pixel = j.at("subpixels_per_pixel").get<int>();
    s.pitch_x = j.at("pitch_x").get<double>();
    s.pitch_y = j.at("pitch_y").get<double>();
    s.bit_depth = j.at("bit_depth").get<int>();
    s.fill_factor = j.at("fill_factor").get<double>();
    return s;
}

}  // namespace

void MaskSpec::validate() const {
    if (rows < 1 || cols < 1)
        throw ConfigError("mask: rows and cols must be >= 1");
    if (subpixels_per_pixel != 1 && subpixels_per_pixel != 3)
        throw ConfigError("mask: subpixels_per_pixel must be 1 or 3");
    if (bit_depth < 1 || bit_depth > 16)
        throw ConfigError("mask: bit_depth must be in [1, 16]");
    if (!(pitch_x > 0.0) || !(pitch_y > 0.0))
        throw ConfigError("mask: pitches must be positive");
    if (!(fill_factor > 0.0) || fill_factor > 1.0)
        throw ConfigError("mask: fill_factor must be in (0, 1]");
}

bool operator==(const MaskSpec& a, const MaskSpec& b) {
    return a.rows == b.rows && a.cols == b.cols &&
           a.subpixels_per_pixel == b.subpixels_per_pixel &&
           a.pitch_x == b.pitch_x && a.pitch_y == b.pitch_y &&
           a.bit_depth == b.bit_depth && a.fill_factor == b.fill_factor;
}

void MaskPattern::validate() const {
    spec.validate();
    if (weights.size() != static_cast<std::size_t>(spec.total_subpixels()))
        throw ConfigError("mask: weight count does not match spec");
    for (std::uint16_t w : weights)
        if (w >= spec.levels()) throw ConfigError("mask: level out of range");
}

MaskSpec prototype_mask_spec() {
    MaskSpec s;
    s.rows = 18;
    s.cols = 26;
    s.subpixels_per_pixel = 3;
    s.pitch_x = 6.0e-5;   // stripe pitch: one third of the 0.18 mm pixel
    s.pitch_y = 1.8e-4;
    s.bit_depth = 8;
    s.fill_factor = 1.0;
    return s;
}

MaskSpec desk_mask_spec() {
    MaskSpec s;
    s.rows = 12;
    s.cols = 16;
    s.subpixels_per_pixel = 1;
    s.pitch_x = 1.0e-4;
    s.pitch_y = 1.0e-4;
    s.bit_depth = 8;
    s.fill_factor = 1.0;
    return s;
}

MaskPattern generate_uniform(const MaskSpec& spec, std::uint64_t seed) {
    spec.validate();
    std::mt19937_64 rng(seed);
    MaskPattern p{spec, std::vector<std::uint16_t>(spec.total_subpixels())};
    const std::uint32_t mask = (1u << spec.bit_depth) - 1;
    std::uint64_t acc = 0;
    int filled = 0;
    for (auto& w : p.weights) {
        if (filled < spec.bit_depth) {
            acc = rng();
            filled = 64;
        }
        w = static_cast<std::uint16_t>(acc & mask);
        acc >>= spec.bit_depth;
        filled -= spec.bit_depth;
    }
    return p;
}

MaskPattern generate_keyed(const MaskSpec& spec, std::string_view user,
                           std::uint64_t timestamp,
                           std::span<const std::uint8_t> secret) {
    spec.validate();
    if (secret.empty()) throw ConfigError("generate_keyed: empty secret");
    ensure_sodium();

    unsigned char key[crypto_generichash_KEYBYTES];
    crypto_generichash(key, sizeof(key), secret.data(), secret.size(), nullptr, 0);

    std::vector<std::uint8_t> message(user.begin(), user.end());
    for (int i = 0; i < 8; ++i)
        message.push_back(static_cast<std::uint8_t>((timestamp >> (8 * i)) & 0xff));

    unsigned char stream_key[crypto_stream_chacha20_KEYBYTES];
    crypto_generichash(stream_key, sizeof(stream_key), message.data(),
                       message.size(), key, sizeof(key));

    const std::size_t n = static_cast<std::size_t>(spec.total_subpixels());
    const std::size_t nbytes = (n * spec.bit_depth + 7) / 8 + 8;
    std::vector<std::uint8_t> stream(nbytes);
    const unsigned char nonce[crypto_stream_chacha20_NONCEBYTES] = {0};
    crypto_stream_chacha20(stream.data(), stream.size(), nonce, stream_key);

    BitReader reader(std::move(stream));
    MaskPattern p{spec, std::vector<std::uint16_t>(n)};
    for (auto& w : p.weights)
        w = static_cast<std::uint16_t>(reader.take(spec.bit_depth));
    return p;
}

MaskPattern generate_keyed(const MaskSpec& spec, std::string_view user,
                           std::uint64_t timestamp, std::string_view secret) {
    return generate_keyed(
        spec, user, timestamp,
        std::span<const std::uint8_t>(
            reinterpret_cast<const std::uint8_t*>(secret.data()), secret.size()));
}

MaskPattern perturb(const MaskPattern& pattern, double fraction_wrong,
                    std::uint64_t seed) {
    pattern.validate();
    if (!(fraction_wrong >= 0.0) || fraction_wrong > 1.0)
        throw ConfigError("perturb: fraction must be in [0, 1]");

    const std::size_t n = pattern.weights.size();
    const auto m = static_cast<std::size_t>(
        std::llround(fraction_wrong * static_cast<double>(n)));
    MaskPattern out = pattern;
    if (m == 0) return out;

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const int levels = pattern.spec.levels();
    for (std::size_t i = 0; i < m; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(idx[i], idx[pick(rng)]);
        // redraw excluding the current level so the change is guaranteed
        std::uniform_int_distribution<int> lvl(0, levels - 2);
        int draw = lvl(rng);
        std::uint16_t cur = out.weights[idx[i]];
        out.weights[idx[i]] =
            static_cast<std::uint16_t>(draw >= cur ? draw + 1 : draw);
    }
    return out;
}

double fraction_correct(const MaskPattern& a, const MaskPattern& b) {
    if (!(a.spec == b.spec))
        throw ConfigError("fraction_correct: mask specs differ");
    if (a.weights.size() != b.weights.size())
        throw ConfigError("fraction_correct: weight counts differ");
    std::size_t match = 0;
    for (std::size_t i = 0; i < a.weights.size(); ++i)
        match += a.weights[i] == b.weights[i];
    return static_cast<double>(match) / static_cast<double>(a.weights.size());
}

std::string pattern_to_json(const MaskPattern& p) {
    p.validate();
    json j{{"spec", spec_to_json(p.spec)},
           {"weights", base64_encode(pack_levels(p.weights, p.spec.bit_depth))}};
    return j.dump(2) + "\n";
}

MaskPattern pattern_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw IoError(std::string("mask json: ") + e.what());
    }
    MaskPattern p;
    try {
        p.spec = spec_from_json(j.at("spec"));
        auto packed = base64_decode(j.at("weights").get<std::string>());
        p.weights = unpack_levels(packed, p.spec.bit_depth,
                                  static_cast<std::size_t>(p.spec.total_subpixels()));
    } catch (const json::exception& e) {
        throw IoError(std::string("mask json: ") + e.what());
    }
    p.validate();
    return p;
}

std::vector<std::uint8_t> pattern_to_binary(const MaskPattern& p) {
    p.validate();
    std::vector<std::uint8_t> out;
    put_u32le(out, static_cast<std::uint32_t>(p.spec.rows));
    put_u32le(out, static_cast<std::uint32_t>(p.spec.cols));
    put_u32le(out, static_cast<std::uint32_t>(p.spec.subpixels_per_pixel));
    put_u32le(out, static_cast<std::uint32_t>(p.spec.bit_depth));
    auto packed = pack_levels(p.weights, p.spec.bit_depth);
    out.insert(out.end(), packed.begin(), packed.end());
    return out;
}

MaskPattern pattern_from_binary(std::span<const std::uint8_t> bytes,
                                const MaskSpec* geometry) {
    if (bytes.size() < 16) throw IoError("mask binary: truncated header");
    MaskPattern p;
    p.spec = geometry ? *geometry : prototype_mask_spec();
    p.spec.rows = static_cast<int>(get_u32le(bytes, 0));
    p.spec.cols = static_cast<int>(get_u32le(bytes, 4));
    p.spec.subpixels_per_pixel = static_cast<int>(get_u32le(bytes, 8));
    p.spec.bit_depth = static_cast<int>(get_u32le(bytes, 12));
    p.spec.validate();
    p.weights = unpack_levels(bytes.subspan(16), p.spec.bit_depth,
                              static_cast<std::size_t>(p.spec.total_subpixels()));
    p.validate();
    return p;
}

namespace {
std::vector<std::uint8_t> read_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot open " + file.string());
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                     std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& file, const void* data,
                std::size_t size) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError("cannot open " + file.string() + " for writing");
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out) throw IoError("write failed: " + file.string());
}
}  // namespace

void save_pattern_json(const std::filesystem::path& file, const MaskPattern& p) {
    auto text = pattern_to_json(p);
    write_file(file, text.data(), text.size());
}

MaskPattern load_pattern_json(const std::filesystem::path& file) {
    auto bytes = read_file(file);
    return pattern_from_json(
        std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

void save_pattern_binary(const std::filesystem::path& file, const MaskPattern& p) {
    auto bytes = pattern_to_binary(p);
    write_file(file, bytes.data(), bytes.size());
}

MaskPattern load_pattern_binary(const std::filesystem::path& file,
                                const MaskSpec* geometry) {
    auto bytes = read_file(file);
    return pattern_from_binary(bytes, geometry);
}

}  // namespace lenscrypt
