#include "msgcn/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace msgcn {

namespace {

double stddev(double sum, double sumsq, int n) {
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    return var > 0.0 ? std::sqrt(var) : 0.0;
}

double bbox_perimeter(const RegionStats& s) {
    return 2.0 * ((s.max_row - s.min_row + 1) + (s.max_col - s.min_col + 1));
}

RegionStats merged_stats(const RegionStats& a, const RegionStats& b,
                         double shared_boundary) {
    RegionStats m;
    m.area = a.area + b.area;
    m.perimeter = a.perimeter + b.perimeter - 2.0 * shared_boundary;
    m.min_row = std::min(a.min_row, b.min_row);
    m.max_row = std::max(a.max_row, b.max_row);
    m.min_col = std::min(a.min_col, b.min_col);
    m.max_col = std::max(a.max_col, b.max_col);
    m.sum.resize(a.sum.size());
    m.sumsq.resize(a.sum.size());
    for (size_t i = 0; i < a.sum.size(); ++i) {
        m.sum[i] = a.sum[i] + b.sum[i];
        m.sumsq[i] = a.sumsq[i] + b.sumsq[i];
    }
    return m;
}

// Region-merging state shared by fnea_segment and build_hierarchy. Regions
// live in slots indexed by their initial pixel; a union-find maps slots to
// the surviving region, always the smallest member id.
class MergeEngine {
  public:
    MergeEngine(const RasterPair& pair, HeterogeneityWeights weights)
        : width_(pair.stacked.width),
          height_(pair.stacked.height),
          bands_(pair.stacked.bands),
          weights_(weights) {
        const int n = width_ * height_;
        parent_.resize(n);
        stats_.resize(n);
        sum_row_.resize(n);
        sum_col_.resize(n);
        adj_.resize(n);
        for (int r = 0; r < height_; ++r) {
            for (int c = 0; c < width_; ++c) {
                const int id = r * width_ + c;
                parent_[id] = id;
                RegionStats& s = stats_[id];
                s.area = 1;
                s.perimeter = 4.0;
                s.min_row = s.max_row = r;
                s.min_col = s.max_col = c;
                s.sum.resize(bands_);
                s.sumsq.resize(bands_);
                for (int b = 0; b < bands_; ++b) {
                    const double v = pair.stacked.at(b, r, c);
                    s.sum[b] = v;
                    s.sumsq[b] = v * v;
                }
                sum_row_[id] = r;
                sum_col_[id] = c;
                if (c + 1 < width_) link(id, id + 1);
                if (r + 1 < height_) link(id, id + width_);
            }
        }
    }

    // Local mutual-best-fitting merging until no adjacent pair is below the
    // threshold. Deterministic: regions visited ascending, ties to min id.
    void merge_to_threshold(double threshold) {
        bool merged_any = true;
        while (merged_any) {
            merged_any = false;
            std::vector<int> roots = active_roots();
            for (int a : roots) {
                if (parent_[a] != a) continue;  // consumed earlier this pass
                double cost_ab = 0.0;
                const int b = best_neighbor(a, &cost_ab);
                if (b < 0 || cost_ab >= threshold) continue;
                double cost_ba = 0.0;
                if (best_neighbor(b, &cost_ba) != a) continue;
                merge(a, b);
                merged_any = true;
            }
        }
    }

    SegmentationLevel extract_level(double scale) const {
        SegmentationLevel level;
        level.scale = scale;
        level.width = width_;
        level.height = height_;
        level.label_image.resize(static_cast<size_t>(width_) * height_);

        std::vector<int> roots = active_roots();
        std::map<int, int32_t> compact;
        for (size_t i = 0; i < roots.size(); ++i) compact[roots[i]] = static_cast<int32_t>(i);

        for (int p = 0; p < width_ * height_; ++p)
            level.label_image[p] = compact.at(find(p));

        level.parcels.resize(roots.size());
        for (size_t i = 0; i < roots.size(); ++i) {
            const RegionStats& s = stats_[roots[i]];
            Parcel& par = level.parcels[i];
            par.id = static_cast<int>(i);
            par.area = s.area;
            par.centroid_row = sum_row_[roots[i]] / s.area;
            par.centroid_col = sum_col_[roots[i]] / s.area;
            par.mean_spectrum.resize(bands_);
            for (int b = 0; b < bands_; ++b) par.mean_spectrum[b] = s.sum[b] / s.area;
        }
        return level;
    }

  private:
    void link(int a, int b) {
        adj_[a][b] += 1.0;
        adj_[b][a] += 1.0;
    }

    int find(int x) const {
        while (parent_[x] != x) x = parent_[x];
        return x;
    }

    std::vector<int> active_roots() const {
        std::vector<int> roots;
        for (int i = 0; i < static_cast<int>(parent_.size()); ++i)
            if (parent_[i] == i) roots.push_back(i);
        return roots;
    }

    int best_neighbor(int a, double* best_cost) const {
        int best = -1;
        double bc = 0.0;
        for (const auto& [nb, len] : adj_[a]) {
            const double c = merge_cost(stats_[a], stats_[nb], len, weights_);
            if (best < 0 || c < bc || (c == bc && nb < best)) {
                best = nb;
                bc = c;
            }
        }
        *best_cost = bc;
        return best;
    }

    void merge(int a, int b) {
        const int keep = std::min(a, b);
        const int gone = std::max(a, b);
        stats_[keep] = merged_stats(stats_[keep], stats_[gone], adj_[keep].at(gone));
        sum_row_[keep] += sum_row_[gone];
        sum_col_[keep] += sum_col_[gone];
        adj_[keep].erase(gone);
        for (const auto& [nb, len] : adj_[gone]) {
            if (nb == keep) continue;
            adj_[keep][nb] += len;
            adj_[nb].erase(gone);
            adj_[nb][keep] += len;
        }
        adj_[gone].clear();
        parent_[gone] = keep;
    }

    int width_, height_, bands_;
    HeterogeneityWeights weights_;
    std::vector<int> parent_;
    std::vector<RegionStats> stats_;
    std::vector<double> sum_row_, sum_col_;
    std::vector<std::map<int, double>> adj_;
};

}  // namespace

double merge_cost(const RegionStats& a, const RegionStats& b, double shared_boundary,
                  const HeterogeneityWeights& weights) {
    const RegionStats m = merged_stats(a, b, shared_boundary);
    const int bands = static_cast<int>(a.sum.size());

    double d_color = 0.0;
    for (int band = 0; band < bands; ++band) {
        d_color += m.area * stddev(m.sum[band], m.sumsq[band], m.area) -
                   a.area * stddev(a.sum[band], a.sumsq[band], a.area) -
                   b.area * stddev(b.sum[band], b.sumsq[band], b.area);
    }

    const auto cpt = [](const RegionStats& s) { return s.perimeter / std::sqrt(s.area); };
    const auto smooth = [](const RegionStats& s) { return s.perimeter / bbox_perimeter(s); };
    const double d_cpt = m.area * cpt(m) - a.area * cpt(a) - b.area * cpt(b);
    const double d_smooth = m.area * smooth(m) - a.area * smooth(a) - b.area * smooth(b);
    const double d_shape =
        weights.compactness * d_cpt + (1.0 - weights.compactness) * d_smooth;

    const double f = weights.color * d_color + (1.0 - weights.color) * d_shape;
    return f > 0.0 ? f : 0.0;
}

SegmentationLevel fnea_segment(const RasterPair& pair, double scale,
                               const HeterogeneityWeights& weights, uint64_t /*seed*/) {
    if (scale <= 0.0) throw std::runtime_error("fnea_segment: scale must be positive");
    MergeEngine engine(pair, weights);
    engine.merge_to_threshold(scale * scale);
    return engine.extract_level(scale);
}

SegmentationHierarchy build_hierarchy(const RasterPair& pair,
                                      const std::vector<double>& scales,
                                      const HeterogeneityWeights& weights,
                                      uint64_t /*seed*/) {
    if (scales.empty()) throw std::runtime_error("build_hierarchy: no scales given");
    for (size_t i = 1; i < scales.size(); ++i)
        if (scales[i] <= scales[i - 1])
            throw std::runtime_error("build_hierarchy: scales must be strictly ascending");

    SegmentationHierarchy hier;
    MergeEngine engine(pair, weights);
    for (double s : scales) {
        engine.merge_to_threshold(s * s);
        hier.levels.push_back(engine.extract_level(s));
    }

    // Father maps via a representative pixel per finest parcel.
    const SegmentationLevel& finest = hier.levels.front();
    std::vector<int> rep(finest.parcels.size(), -1);
    for (int p = 0; p < finest.width * finest.height; ++p)
        if (rep[finest.label_image[p]] < 0) rep[finest.label_image[p]] = p;

    hier.father_maps.resize(hier.levels.size());
    for (size_t l = 0; l < hier.levels.size(); ++l) {
        hier.father_maps[l].resize(finest.parcels.size());
        for (size_t i = 0; i < finest.parcels.size(); ++i)
            hier.father_maps[l][i] = hier.levels[l].label_image[rep[i]];
    }
    return hier;
}

std::set<int32_t> neighbors(const SegmentationLevel& level, int32_t id) {
    if (id < 0 || id >= static_cast<int32_t>(level.parcels.size()))
        throw std::runtime_error("neighbors: invalid parcel id");
    return adjacency_sets(level)[id];
}

std::vector<std::set<int32_t>> adjacency_sets(const SegmentationLevel& level) {
    std::vector<std::set<int32_t>> sets(level.parcels.size());
    for (int r = 0; r < level.height; ++r) {
        for (int c = 0; c < level.width; ++c) {
            const int32_t a = level.label_at(r, c);
            if (c + 1 < level.width) {
                const int32_t b = level.label_at(r, c + 1);
                if (a != b) {
                    sets[a].insert(b);
                    sets[b].insert(a);
                }
            }
            if (r + 1 < level.height) {
                const int32_t b = level.label_at(r + 1, c);
                if (a != b) {
                    sets[a].insert(b);
                    sets[b].insert(a);
                }
            }
        }
    }
    return sets;
}

}  // namespace msgcn
