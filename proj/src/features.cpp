#include "msgcn/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace msgcn {

namespace {

// Border handling: clamp to edge.
double px(const std::vector<double>& plane, int w, int h, int r, int c) {
    r = std::clamp(r, 0, h - 1);
    c = std::clamp(c, 0, w - 1);
    return plane[static_cast<size_t>(r) * w + c];
}

std::vector<double> gaussian_blur(const std::vector<double>& plane, int w, int h,
                                  double sigma) {
    const int radius = std::max(1, static_cast<int>(std::ceil(2.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double ksum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
        ksum += kernel[i + radius];
    }
    for (double& k : kernel) k /= ksum;

    std::vector<double> tmp(plane.size()), out(plane.size());
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            double s = 0.0;
            for (int i = -radius; i <= radius; ++i)
                s += kernel[i + radius] * px(plane, w, h, r, c + i);
            tmp[static_cast<size_t>(r) * w + c] = s;
        }
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            double s = 0.0;
            for (int i = -radius; i <= radius; ++i)
                s += kernel[i + radius] * px(tmp, w, h, r + i, c);
            out[static_cast<size_t>(r) * w + c] = s;
        }
    return out;
}

std::vector<double> gradient_magnitude(const std::vector<double>& plane, int w, int h) {
    std::vector<double> out(plane.size());
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            const double gx =
                0.5 * (px(plane, w, h, r, c + 1) - px(plane, w, h, r, c - 1));
            const double gy =
                0.5 * (px(plane, w, h, r + 1, c) - px(plane, w, h, r - 1, c));
            out[static_cast<size_t>(r) * w + c] = std::hypot(gx, gy);
        }
    return out;
}

std::vector<double> local_stddev(const std::vector<double>& plane, int w, int h) {
    std::vector<double> out(plane.size());
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            double s = 0.0;
            for (int dr = -1; dr <= 1; ++dr)
                for (int dc = -1; dc <= 1; ++dc) s += px(plane, w, h, r + dr, c + dc);
            const double mean = s / 9.0;
            // Two-pass form: exact zero on constant windows, no cancellation.
            double ss = 0.0;
            for (int dr = -1; dr <= 1; ++dr)
                for (int dc = -1; dc <= 1; ++dc) {
                    const double d = px(plane, w, h, r + dr, c + dc) - mean;
                    ss += d * d;
                }
            out[static_cast<size_t>(r) * w + c] = std::sqrt(ss / 9.0);
        }
    return out;
}

void minmax_normalize(std::vector<double>& plane) {
    auto [lo, hi] = std::minmax_element(plane.begin(), plane.end());
    const double range = *hi - *lo;
    if (range <= 0.0) return;  // constant channel stays as-is
    for (double& v : plane) v = (v - *lo) / range;
}

}  // namespace

FeatureMaps filter_bank_features(const RasterPair& pair) {
    const Raster& img = pair.stacked;
    const int w = img.width, h = img.height;
    const size_t plane = img.plane_size();

    const int diff_bands =
        pair.t1.bands == pair.t2.bands && pair.t1.data.size() == pair.t2.data.size()
            ? pair.t1.bands
            : 0;

    FeatureMaps maps;
    maps.width = w;
    maps.height = h;
    maps.channels = 5 * img.bands + 2 * diff_bands;
    maps.data.reserve(plane * maps.channels);

    for (int b = 0; b < img.bands; ++b) {
        std::vector<double> band(img.data.begin() + b * plane,
                                 img.data.begin() + (b + 1) * plane);
        std::vector<std::vector<double>> channels;
        channels.push_back(band);
        channels.push_back(gaussian_blur(band, w, h, 1.0));
        channels.push_back(gaussian_blur(band, w, h, 2.0));
        channels.push_back(gradient_magnitude(band, w, h));
        channels.push_back(local_stddev(band, w, h));
        for (auto& ch : channels) {
            minmax_normalize(ch);
            maps.data.insert(maps.data.end(), ch.begin(), ch.end());
        }
    }

    // Temporal difference magnitude per matched band pair: raw and smoothed.
    // This exposes the change signal directly instead of leaving it implicit
    // in a linear combination of the per-date channels.
    for (int b = 0; b < diff_bands; ++b) {
        std::vector<double> diff(plane);
        for (size_t i = 0; i < plane; ++i)
            diff[i] = std::abs(pair.t2.data[b * plane + i] - pair.t1.data[b * plane + i]);
        std::vector<std::vector<double>> channels;
        channels.push_back(diff);
        channels.push_back(gaussian_blur(diff, w, h, 1.0));
        for (auto& ch : channels) {
            minmax_normalize(ch);
            maps.data.insert(maps.data.end(), ch.begin(), ch.end());
        }
    }
    return maps;
}

Matrix pool_object_features(const FeatureMaps& maps, const SegmentationLevel& level) {
    if (maps.width != level.width || maps.height != level.height)
        throw std::runtime_error("pool_object_features: dimension mismatch");

    Matrix out(static_cast<int>(level.parcels.size()), maps.channels);
    for (int ch = 0; ch < maps.channels; ++ch) {
        for (int r = 0; r < level.height; ++r)
            for (int c = 0; c < level.width; ++c)
                out(level.label_at(r, c), ch) += maps.at(ch, r, c);
    }
    for (size_t i = 0; i < level.parcels.size(); ++i)
        for (int ch = 0; ch < maps.channels; ++ch)
            out(static_cast<int>(i), ch) /= level.parcels[i].area;
    return out;
}

void standardize_columns(Matrix& features) {
    for (int c = 0; c < features.cols; ++c) {
        double mean = 0.0;
        for (int r = 0; r < features.rows; ++r) mean += features(r, c);
        mean /= features.rows;
        double ss = 0.0;
        for (int r = 0; r < features.rows; ++r) {
            features(r, c) -= mean;
            ss += features(r, c) * features(r, c);
        }
        const double sd = std::sqrt(ss / features.rows);
        if (sd > 0.0)
            for (int r = 0; r < features.rows; ++r) features(r, c) /= sd;
    }
}

}  // namespace msgcn
