#include "lenscrypt/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "lenscrypt/errors.hpp"

namespace lenscrypt {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

Image load_png(const std::filesystem::path& file) {
    FilePtr fp(std::fopen(file.string().c_str(), "rb"));
    if (!fp) throw IoError("cannot open " + file.string());

    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png: allocation failure");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("png: allocation failure");
    }
    std::vector<png_bytep> row_ptrs;
    std::vector<png_byte> buffer;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("png: failed to decode " + file.string());
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    const int depth = png_get_bit_depth(png, info);
    const int channels = png_get_channels(png, info);
    if ((depth != 8 && depth != 16) || (channels != 1 && channels != 3)) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("png: unsupported format in " + file.string());
    }

    const std::size_t stride = png_get_rowbytes(png, info);
    buffer.resize(stride * height);
    row_ptrs.resize(height);
    for (png_uint_32 r = 0; r < height; ++r) row_ptrs[r] = buffer.data() + r * stride;
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    Image img(channels, static_cast<int>(height), static_cast<int>(width));
    const double scale = depth == 8 ? 1.0 / 255.0 : 1.0 / 65535.0;
    for (png_uint_32 r = 0; r < height; ++r) {
        const png_byte* row = buffer.data() + r * stride;
        for (png_uint_32 c = 0; c < width; ++c) {
            for (int ch = 0; ch < channels; ++ch) {
                double value;
                if (depth == 8) {
                    value = row[c * channels + ch] * scale;
                } else {
                    // PNG stores 16-bit samples big-endian
                    std::size_t at = (c * channels + ch) * 2;
                    value = ((row[at] << 8) | row[at + 1]) * scale;
                }
                img.ch[ch].at(static_cast<int>(r), static_cast<int>(c)) = value;
            }
        }
    }
    return img;
}

Image load_pnm(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot open " + file.string());

    auto next_token = [&in]() {
        std::string tok;
        while (in >> tok) {
            if (tok[0] == '#') {
                std::string line;
                std::getline(in, line);
                continue;
            }
            return tok;
        }
        throw IoError("pnm: truncated header");
    };

    std::string magic = next_token();
    if (magic != "P5" && magic != "P6")
        throw IoError("pnm: only binary P5/P6 supported");
    const int channels = magic == "P6" ? 3 : 1;
    const int width = std::stoi(next_token());
    const int height = std::stoi(next_token());
    const int maxval = std::stoi(next_token());
    if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535)
        throw IoError("pnm: bad header in " + file.string());
    in.get();  // the single whitespace after maxval

    const int bytes_per = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(static_cast<std::size_t>(width) * height *
                                   channels * bytes_per);
    in.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
    if (!in) throw IoError("pnm: truncated pixel data in " + file.string());

    Image img(channels, height, width);
    const double scale = 1.0 / maxval;
    std::size_t at = 0;
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
            for (int ch = 0; ch < channels; ++ch) {
                int value;
                if (bytes_per == 1) {
                    value = raw[at++];
                } else {
                    value = (raw[at] << 8) | raw[at + 1];  // big-endian
                    at += 2;
                }
                img.ch[ch].at(r, c) = value * scale;
            }
    return img;
}

}  // namespace

Image load_image(const std::filesystem::path& file) {
    std::ifstream probe(file, std::ios::binary);
    if (!probe) throw IoError("cannot open " + file.string());
    unsigned char magic[2] = {0, 0};
    probe.read(reinterpret_cast<char*>(magic), 2);
    probe.close();
    if (magic[0] == 0x89 && magic[1] == 'P') return load_png(file);
    if (magic[0] == 'P' && (magic[1] == '5' || magic[1] == '6'))
        return load_pnm(file);
    throw IoError("unsupported image format: " + file.string());
}

void save_png8(const std::filesystem::path& file, const Image& img) {
    const int channels = img.channels();
    if (channels != 1 && channels != 3)
        throw IoError("png: only 1- or 3-channel images supported");

    FilePtr fp(std::fopen(file.string().c_str(), "wb"));
    if (!fp) throw IoError("cannot open " + file.string() + " for writing");

    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png: allocation failure");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png: allocation failure");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("png: failed to encode " + file.string());
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, img.cols(), img.rows(), 8,
                 channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<png_byte> row(static_cast<std::size_t>(img.cols()) * channels);
    for (int r = 0; r < img.rows(); ++r) {
        for (int c = 0; c < img.cols(); ++c)
            for (int ch = 0; ch < channels; ++ch) {
                double v = std::clamp(img.ch[ch].at(r, c), 0.0, 1.0);
                row[static_cast<std::size_t>(c) * channels + ch] =
                    static_cast<png_byte>(std::lround(v * 255.0));
            }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void save_pnm(const std::filesystem::path& file, const Image& img) {
    const int channels = img.channels();
    if (channels != 1 && channels != 3)
        throw IoError("pnm: only 1- or 3-channel images supported");
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError("cannot open " + file.string() + " for writing");
    out << (channels == 1 ? "P5" : "P6") << '\n'
        << img.cols() << ' ' << img.rows() << "\n255\n";
    for (int r = 0; r < img.rows(); ++r)
        for (int c = 0; c < img.cols(); ++c)
            for (int ch = 0; ch < channels; ++ch) {
                double v = std::clamp(img.ch[ch].at(r, c), 0.0, 1.0);
                out.put(static_cast<char>(std::lround(v * 255.0)));
            }
    if (!out) throw IoError("pnm: write failed: " + file.string());
}

void save_float_raw(const std::filesystem::path& file, const Image& img) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError("cannot open " + file.string() + " for writing");
    for (const Plane& p : img.ch)
        for (double v : p.v) {
            float f = static_cast<float>(v);
            out.write(reinterpret_cast<const char*>(&f), sizeof(f));
        }
    if (!out) throw IoError("raw: write failed: " + file.string());

    nlohmann::json sidecar{{"rows", img.rows()},
                           {"cols", img.cols()},
                           {"channels", img.channels()},
                           {"dtype", "float32_le"},
                           {"layout", "chw"}};
    std::ofstream meta(file.string() + ".json");
    if (!meta) throw IoError("cannot write sidecar for " + file.string());
    meta << sidecar.dump(2) << '\n';
}

Image load_float_raw(const std::filesystem::path& file) {
    std::ifstream meta(file.string() + ".json");
    if (!meta) throw IoError("missing sidecar " + file.string() + ".json");
    nlohmann::json sidecar;
    try {
        meta >> sidecar;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("raw sidecar: ") + e.what());
    }
    int rows = 0, cols = 0, channels = 0;
    try {
        rows = sidecar.at("rows").get<int>();
        cols = sidecar.at("cols").get<int>();
        channels = sidecar.at("channels").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("raw sidecar: ") + e.what());
    }
    if (rows <= 0 || cols <= 0 || channels <= 0)
        throw IoError("raw sidecar: bad dimensions");

    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot open " + file.string());
    Image img(channels, rows, cols);
    for (Plane& p : img.ch)
        for (double& v : p.v) {
            float f = 0.0f;
            in.read(reinterpret_cast<char*>(&f), sizeof(f));
            v = f;
        }
    if (!in) throw IoError("raw: truncated pixel data in " + file.string());
    return img;
}

namespace {

Plane resize_plane(const Plane& src, int rows, int cols) {
    if (src.rows == rows && src.cols == cols) return src;

    // box-average for exact integer downscales
    if (src.rows % rows == 0 && src.cols % cols == 0) {
        const int fr = src.rows / rows, fc = src.cols / cols;
        Plane out(rows, cols, 0.0);
        const double inv = 1.0 / (fr * fc);
        for (int r = 0; r < src.rows; ++r)
            for (int c = 0; c < src.cols; ++c)
                out.at(r / fr, c / fc) += src.at(r, c) * inv;
        return out;
    }

    Plane out(rows, cols);
    const double sr = static_cast<double>(src.rows) / rows;
    const double sc = static_cast<double>(src.cols) / cols;
    for (int r = 0; r < rows; ++r) {
        double fr = (r + 0.5) * sr - 0.5;
        int r0 = std::clamp(static_cast<int>(std::floor(fr)), 0, src.rows - 1);
        int r1 = std::min(r0 + 1, src.rows - 1);
        double wr = std::clamp(fr - r0, 0.0, 1.0);
        for (int c = 0; c < cols; ++c) {
            double fc = (c + 0.5) * sc - 0.5;
            int c0 = std::clamp(static_cast<int>(std::floor(fc)), 0, src.cols - 1);
            int c1 = std::min(c0 + 1, src.cols - 1);
            double wc = std::clamp(fc - c0, 0.0, 1.0);
            out.at(r, c) = (1 - wr) * ((1 - wc) * src.at(r0, c0) + wc * src.at(r0, c1)) +
                           wr * ((1 - wc) * src.at(r1, c0) + wc * src.at(r1, c1));
        }
    }
    return out;
}

}  // namespace

Image resize(const Image& img, int rows, int cols) {
    if (rows <= 0 || cols <= 0) throw ConfigError("resize: bad target size");
    Image out;
    out.ch.reserve(img.ch.size());
    for (const Plane& p : img.ch) out.ch.push_back(resize_plane(p, rows, cols));
    return out;
}

Image to_gray(const Image& img) {
    if (img.channels() == 1) return img;
    Image out(1, img.rows(), img.cols());
    if (img.channels() == 3) {
        for (std::size_t i = 0; i < out.ch[0].v.size(); ++i)
            out.ch[0].v[i] = 0.299 * img.ch[0].v[i] + 0.587 * img.ch[1].v[i] +
                             0.114 * img.ch[2].v[i];
    } else {
        for (std::size_t i = 0; i < out.ch[0].v.size(); ++i) {
            double acc = 0.0;
            for (int c = 0; c < img.channels(); ++c) acc += img.ch[c].v[i];
            out.ch[0].v[i] = acc / img.channels();
        }
    }
    return out;
}

}  // namespace lenscrypt
