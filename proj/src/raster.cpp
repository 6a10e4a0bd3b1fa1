#include "msgcn/raster.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace msgcn {

namespace {

constexpr char kTensorMagic[4] = {'M', 'S', 'F', '0'};

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::runtime_error(msg);
}

bool has_suffix(const std::string& s, const std::string& suf) {
    return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

RasterFormat sniff_format(const std::string& path) {
    if (has_suffix(path, ".pgm")) return RasterFormat::Pgm;
    if (has_suffix(path, ".png")) return RasterFormat::Png;
    if (has_suffix(path, ".f32") || has_suffix(path, ".raw")) return RasterFormat::RawF32;
    throw std::runtime_error("cannot infer raster format from path: " + path);
}

int pnm_next_int(std::istream& in) {
    // Skips whitespace and '#' comments.
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (!std::isspace(c)) {
            break;
        }
        c = in.get();
    }
    require(c != EOF && std::isdigit(c), "unreadable file: malformed PGM header");
    int v = 0;
    while (c != EOF && std::isdigit(c)) {
        v = v * 10 + (c - '0');
        c = in.get();
    }
    return v;
}

Raster load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "unreadable file: " + path);
    char magic[2] = {0, 0};
    in.read(magic, 2);
    require(in.good() && magic[0] == 'P' && magic[1] == '5',
            "unreadable file: not a P5 PGM: " + path);
    const int w = pnm_next_int(in);
    const int h = pnm_next_int(in);
    const int maxval = pnm_next_int(in);
    require(w > 0 && h > 0 && maxval > 0 && maxval < 65536,
            "unreadable file: bad PGM dimensions: " + path);

    Raster r;
    r.width = w;
    r.height = h;
    r.bands = 1;
    r.data.resize(static_cast<size_t>(w) * h);
    const size_t n = r.data.size();
    if (maxval < 256) {
        std::vector<uint8_t> buf(n);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n));
        require(static_cast<size_t>(in.gcount()) == n, "unreadable file: truncated PGM: " + path);
        for (size_t i = 0; i < n; ++i) r.data[i] = buf[i] / static_cast<double>(maxval);
    } else {
        std::vector<uint8_t> buf(n * 2);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        require(static_cast<size_t>(in.gcount()) == buf.size(),
                "unreadable file: truncated PGM: " + path);
        for (size_t i = 0; i < n; ++i) {
            const int v = (buf[2 * i] << 8) | buf[2 * i + 1];  // big-endian per spec
            r.data[i] = v / static_cast<double>(maxval);
        }
    }
    return r;
}

Raster load_png(const std::string& path) {
    std::unique_ptr<FILE, decltype(&fclose)> fp(fopen(path.c_str(), "rb"), &fclose);
    require(fp != nullptr, "unreadable file: " + path);

    uint8_t header[8];
    require(fread(header, 1, 8, fp.get()) == 8 && png_sig_cmp(header, 0, 8) == 0,
            "unreadable file: not a PNG: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("unreadable file: PNG decode failed: " + path);
    }
    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);

    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    if (depth == 16) png_set_swap(png);  // to host little-endian
    png_read_update_info(png, info);

    const int channels = png_get_channels(png, info);
    const int out_depth = png_get_bit_depth(png, info);
    const double maxval = out_depth == 16 ? 65535.0 : 255.0;
    const size_t rowbytes = png_get_rowbytes(png, info);

    std::vector<uint8_t> rowbuf(rowbytes);
    Raster r;
    r.width = w;
    r.height = h;
    r.bands = channels;
    r.data.resize(static_cast<size_t>(w) * h * channels);
    for (int y = 0; y < h; ++y) {
        png_read_row(png, rowbuf.data(), nullptr);
        for (int x = 0; x < w; ++x) {
            for (int b = 0; b < channels; ++b) {
                double v;
                if (out_depth == 16) {
                    uint16_t raw;
                    std::memcpy(&raw, &rowbuf[(static_cast<size_t>(x) * channels + b) * 2],
                                2);
                    v = raw / maxval;
                } else {
                    v = rowbuf[static_cast<size_t>(x) * channels + b] / maxval;
                }
                r.at(b, y, x) = v;
            }
        }
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return r;
}

Raster load_raw_f32(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "unreadable file: " + path);
    char magic[4];
    uint32_t dims[3];
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(dims), 12);
    require(in.good() && std::memcmp(magic, kTensorMagic, 4) == 0,
            "unreadable file: bad tensor magic: " + path);
    const uint32_t c = dims[0], h = dims[1], w = dims[2];
    require(c > 0 && h > 0 && w > 0, "unreadable file: bad tensor dims: " + path);
    const size_t n = static_cast<size_t>(c) * h * w;
    std::vector<float> buf(n);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n * 4));
    require(static_cast<size_t>(in.gcount()) == n * 4,
            "unreadable file: truncated tensor: " + path);

    Raster r;
    r.width = static_cast<int>(w);
    r.height = static_cast<int>(h);
    r.bands = static_cast<int>(c);
    r.data.assign(buf.begin(), buf.end());
    return r;
}

}  // namespace

void validate(const Raster& raster) {
    require(raster.width > 0 && raster.height > 0 && raster.bands > 0,
            "raster has nonpositive dimensions");
    require(raster.data.size() ==
                static_cast<size_t>(raster.width) * raster.height * raster.bands,
            "raster data length mismatch");
    for (double v : raster.data)
        require(std::isfinite(v), "raster contains non-finite values");
}

Raster load_raster(const std::string& path, RasterFormat format) {
    if (format == RasterFormat::Auto) format = sniff_format(path);
    Raster r;
    switch (format) {
        case RasterFormat::Pgm: r = load_pgm(path); break;
        case RasterFormat::Png: r = load_png(path); break;
        case RasterFormat::RawF32: r = load_raw_f32(path); break;
        default: throw std::runtime_error("unknown raster format");
    }
    validate(r);
    return r;
}

RasterPair stack_pair(const Raster& t1, const Raster& t2) {
    require(t1.width == t2.width && t1.height == t2.height,
            "stack_pair: size mismatch between t1 and t2");
    RasterPair pair;
    pair.t1 = t1;
    pair.t2 = t2;
    pair.stacked.width = t1.width;
    pair.stacked.height = t1.height;
    pair.stacked.bands = t1.bands + t2.bands;
    pair.stacked.data.reserve(t1.data.size() + t2.data.size());
    pair.stacked.data.insert(pair.stacked.data.end(), t1.data.begin(), t1.data.end());
    pair.stacked.data.insert(pair.stacked.data.end(), t2.data.begin(), t2.data.end());
    return pair;
}

void write_change_map(const ChangeMap& map, const std::string& path) {
    require(map.width > 0 && map.height > 0, "change map has nonpositive dimensions");
    std::ofstream out(path, std::ios::binary);
    require(out.good(), "unwritable path: " + path);
    out << "P5\n" << map.width << " " << map.height << "\n255\n";
    std::vector<uint8_t> buf(map.labels.size());
    for (size_t i = 0; i < buf.size(); ++i) buf[i] = map.labels[i] ? 255 : 0;
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size()));
    require(out.good(), "unwritable path: " + path);
}

ChangeMap read_change_map(const std::string& path) {
    Raster r = load_pgm(path);
    ChangeMap map;
    map.width = r.width;
    map.height = r.height;
    map.labels.resize(r.data.size());
    for (size_t i = 0; i < r.data.size(); ++i) map.labels[i] = r.data[i] >= 0.5 ? 1 : 0;
    return map;
}

FeatureMaps load_feature_maps(const std::string& path, int expect_c, int expect_h,
                              int expect_w) {
    Raster r = load_raw_f32(path);
    require(r.bands == expect_c && r.height == expect_h && r.width == expect_w,
            "feature tensor dimension mismatch: " + path);
    FeatureMaps maps;
    maps.channels = r.bands;
    maps.width = r.width;
    maps.height = r.height;
    maps.data = std::move(r.data);
    for (double v : maps.data)
        require(std::isfinite(v), "feature tensor contains non-finite entries");
    return maps;
}

void write_feature_maps(const FeatureMaps& maps, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), "unwritable path: " + path);
    out.write(kTensorMagic, 4);
    const uint32_t dims[3] = {static_cast<uint32_t>(maps.channels),
                              static_cast<uint32_t>(maps.height),
                              static_cast<uint32_t>(maps.width)};
    out.write(reinterpret_cast<const char*>(dims), 12);
    std::vector<float> buf(maps.data.begin(), maps.data.end());
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * 4));
    require(out.good(), "unwritable path: " + path);
}

void write_pgm(const Raster& raster, const std::string& path) {
    require(raster.bands == 1, "write_pgm expects a single band");
    std::ofstream out(path, std::ios::binary);
    require(out.good(), "unwritable path: " + path);
    out << "P5\n" << raster.width << " " << raster.height << "\n255\n";
    std::vector<uint8_t> buf(raster.data.size());
    for (size_t i = 0; i < buf.size(); ++i) {
        double v = raster.data[i];
        v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
        buf[i] = static_cast<uint8_t>(std::lround(v * 255.0));
    }
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size()));
    require(out.good(), "unwritable path: " + path);
}

}  // namespace msgcn
