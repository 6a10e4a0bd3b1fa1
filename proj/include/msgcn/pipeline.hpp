#pragma once

#include <optional>
#include <string>
#include <vector>

#include "msgcn/evaluation.hpp"
#include "msgcn/gcn.hpp"
#include "msgcn/raster.hpp"
#include "msgcn/segmentation.hpp"
#include "msgcn/synth.hpp"

namespace msgcn {

struct PipelineConfig {
    std::string t1_path;
    std::string t2_path;
    std::string reference_path;  // optional
    std::string features_path;   // optional external C x H x W tensor
    int feature_channels = 0;    // required when features_path is set

    std::vector<double> scales = {8.0, 15.0, 20.0};
    double gamma = 0.2;
    double beta = 0.5;
    double label_ratio = 0.05;
    std::vector<int> hidden_dims = {32, 8};  // input C and output 2 are implied
    int epochs = 400;
    GcnHyperparams hp;
    HeterogeneityWeights seg_weights;
    uint64_t seed = 0;

    SceneSpec synth;  // used by the synth verb only

    void validate() const;  // throws on bad values
};

// key=value text file; '#' starts a comment. Unknown keys are rejected.
PipelineConfig load_config(const std::string& path);
void apply_config_line(PipelineConfig& cfg, const std::string& key,
                       const std::string& value);

struct PipelineResult {
    ChangeMap change_map;
    std::optional<MetricReport> report;  // present when a reference was given
    std::vector<double> loss_history;
};

// load -> stack -> features -> hierarchy -> pool -> graphs -> fusion ->
// sample labels -> train -> fuse -> assign -> render -> metrics. Artifacts
// are written under out_dir; everything is determined by (config, seed).
PipelineResult run_pipeline(const PipelineConfig& config, const std::string& out_dir,
                            bool dump_intermediates = false);

enum class AblationMode { ScaleCombinations, LayerDepths };

struct AblationRow {
    std::string variant;
    MetricReport report;
};

std::vector<AblationRow> run_ablation(const PipelineConfig& config, AblationMode mode,
                                      const std::string& out_dir);

// Writes t1.pgm, t2.pgm, reference.pgm under out_dir.
void run_synth(const PipelineConfig& config, const std::string& out_dir);

}  // namespace msgcn
