#include "msgcn/synth.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace msgcn {

bool point_in_polygon(const Polygon& poly, double row, double col) {
    const auto& v = poly.vertices;
    bool inside = false;
    for (size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        const auto& [ri, ci] = v[i];
        const auto& [rj, cj] = v[j];
        if ((ri > row) != (rj > row) &&
            col < (cj - ci) * (row - ri) / (rj - ri) + ci)
            inside = !inside;
    }
    return inside;
}

SceneSpec default_scene(int width, int height, double noise_sigma) {
    SceneSpec spec;
    spec.width = width;
    spec.height = height;
    spec.noise_sigma = noise_sigma;

    const auto rect = [](double r0, double c0, double r1, double c1) {
        return Polygon{{{r0, c0}, {r0, c1}, {r1, c1}, {r1, c0}}};
    };
    const double h = height, w = width;
    // Three change regions of mixed sizes.
    spec.polygons.push_back(rect(h * 0.12, w * 0.10, h * 0.45, w * 0.42));
    spec.polygons.push_back(rect(h * 0.55, w * 0.60, h * 0.80, w * 0.90));
    spec.polygons.push_back(rect(h * 0.78, w * 0.12, h * 0.92, w * 0.26));
    return spec;
}

SyntheticScene generate_synthetic_pair(const SceneSpec& spec, uint64_t seed) {
    if (spec.width <= 0 || spec.height <= 0)
        throw std::runtime_error("synthetic scene: nonpositive dimensions");
    for (const Polygon& poly : spec.polygons) {
        if (poly.vertices.size() < 3)
            throw std::runtime_error("synthetic scene: degenerate polygon");
        for (const auto& [r, c] : poly.vertices)
            if (r < 0.0 || r > spec.height || c < 0.0 || c > spec.width)
                throw std::runtime_error("synthetic scene: polygon outside the image");
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> freq(0.5, 2.5);

    // Smooth background: a few random low-frequency sinusoids.
    struct Wave {
        double fr, fc, ph;
    };
    std::vector<Wave> waves;
    for (int k = 0; k < 3; ++k) waves.push_back({freq(rng), freq(rng), phase(rng)});

    // Blocky patch fields at two grid sizes: fine cells nest inside coarse
    // cells, so the background has genuine structure at more than one scale.
    const int fine_cell = std::max(1, spec.patch_size);
    const int coarse_cell = 4 * fine_cell;
    const auto make_patch = [&](int cell, double amplitude) {
        const int cr = (spec.height + cell - 1) / cell;
        const int cc = (spec.width + cell - 1) / cell;
        std::vector<double> field(static_cast<size_t>(cr) * cc);
        std::uniform_real_distribution<double> offset(-amplitude, amplitude);
        for (double& v : field) v = offset(rng);
        return std::pair<std::vector<double>, int>(std::move(field), cc);
    };
    const auto [fine_patch, fine_cols] = make_patch(fine_cell, spec.patch_amplitude);
    const auto [coarse_patch, coarse_cols] = make_patch(coarse_cell, spec.patch_amplitude);

    const auto background = [&](int r, int c) {
        double s = 0.0;
        for (const Wave& wv : waves)
            s += std::sin(2.0 * M_PI * (wv.fr * r / spec.height + wv.fc * c / spec.width) +
                          wv.ph);
        return spec.background_mean + spec.texture_amplitude * s / 3.0 +
               fine_patch[static_cast<size_t>(r / fine_cell) * fine_cols + c / fine_cell] +
               coarse_patch[static_cast<size_t>(r / coarse_cell) * coarse_cols +
                            c / coarse_cell];
    };

    SyntheticScene scene;
    for (Raster* img : {&scene.t1, &scene.t2}) {
        img->width = spec.width;
        img->height = spec.height;
        img->bands = 1;
        img->data.resize(static_cast<size_t>(spec.width) * spec.height);
    }
    scene.reference.width = spec.width;
    scene.reference.height = spec.height;
    scene.reference.labels.assign(scene.t1.data.size(), 0);

    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    for (int r = 0; r < spec.height; ++r) {
        for (int c = 0; c < spec.width; ++c) {
            const size_t idx = static_cast<size_t>(r) * spec.width + c;
            bool changed = false;
            for (const Polygon& poly : spec.polygons)
                if (point_in_polygon(poly, r + 0.5, c + 0.5)) {
                    changed = true;
                    break;
                }
            const double bg = background(r, c);
            const double n1 = spec.noise_sigma > 0.0 ? noise(rng) : 0.0;
            const double n2 = spec.noise_sigma > 0.0 ? noise(rng) : 0.0;
            scene.t1.data[idx] = bg + n1;
            scene.t2.data[idx] = bg + (changed ? spec.change_shift : 0.0) + n2;
            scene.reference.labels[idx] = changed ? 1 : 0;
        }
    }
    return scene;
}

}  // namespace msgcn
