#include "msgcn.h"

#include <cstring>
#include <string>

#include "msgcn/evaluation.hpp"
#include "msgcn/pipeline.hpp"

namespace {

thread_local std::string g_last_error;

int fail(int code, const char* what) {
    g_last_error = what;
    return code;
}

void fill(msgcn_metrics* out, const msgcn::MetricReport& r) {
    out->far = r.far;
    out->mar = r.mar;
    out->oa = r.oa;
    out->kappa = r.kappa;
    out->valid = 1;
}

}  // namespace

struct msgcn_config {
    msgcn::PipelineConfig cfg;
};

extern "C" {

const char* msgcn_version(void) { return "0.1.0"; }

const char* msgcn_last_error(void) { return g_last_error.c_str(); }

int msgcn_config_create(msgcn_config** out) {
    if (!out) return fail(MSGCN_ERR_INVALID_ARG, "null output pointer");
    *out = new msgcn_config();
    return MSGCN_OK;
}

int msgcn_config_load(const char* path, msgcn_config** out) {
    if (!path || !out) return fail(MSGCN_ERR_INVALID_ARG, "null argument");
    try {
        auto* cfg = new msgcn_config{msgcn::load_config(path)};
        *out = cfg;
        return MSGCN_OK;
    } catch (const std::exception& e) {
        return fail(MSGCN_ERR_CONFIG, e.what());
    }
}

int msgcn_config_set(msgcn_config* cfg, const char* key, const char* value) {
    if (!cfg || !key || !value) return fail(MSGCN_ERR_INVALID_ARG, "null argument");
    try {
        msgcn::apply_config_line(cfg->cfg, key, value);
        return MSGCN_OK;
    } catch (const std::exception& e) {
        return fail(MSGCN_ERR_CONFIG, e.what());
    }
}

void msgcn_config_destroy(msgcn_config* cfg) { delete cfg; }

int msgcn_run(const msgcn_config* cfg, const char* out_dir, int dump_intermediates,
              msgcn_metrics* out_metrics) {
    if (!cfg || !out_dir) return fail(MSGCN_ERR_INVALID_ARG, "null argument");
    try {
        const msgcn::PipelineResult res =
            msgcn::run_pipeline(cfg->cfg, out_dir, dump_intermediates != 0);
        if (out_metrics) {
            if (res.report) fill(out_metrics, *res.report);
            else out_metrics->valid = 0;
        }
        return MSGCN_OK;
    } catch (const std::exception& e) {
        return fail(MSGCN_ERR_RUNTIME, e.what());
    }
}

int msgcn_synth(const msgcn_config* cfg, const char* out_dir) {
    if (!cfg || !out_dir) return fail(MSGCN_ERR_INVALID_ARG, "null argument");
    try {
        msgcn::run_synth(cfg->cfg, out_dir);
        return MSGCN_OK;
    } catch (const std::exception& e) {
        return fail(MSGCN_ERR_RUNTIME, e.what());
    }
}

int msgcn_ablate(const msgcn_config* cfg, const char* mode, const char* out_dir) {
    if (!cfg || !mode || !out_dir) return fail(MSGCN_ERR_INVALID_ARG, "null argument");
    msgcn::AblationMode m;
    if (std::strcmp(mode, "scale-combinations") == 0)
        m = msgcn::AblationMode::ScaleCombinations;
    else if (std::strcmp(mode, "layer-depths") == 0)
        m = msgcn::AblationMode::LayerDepths;
    else
        return fail(MSGCN_ERR_INVALID_ARG, "unknown ablation mode");
    try {
        msgcn::run_ablation(cfg->cfg, m, out_dir);
        return MSGCN_OK;
    } catch (const std::exception& e) {
        return fail(MSGCN_ERR_RUNTIME, e.what());
    }
}

int msgcn_eval(const char* predicted_path, const char* reference_path,
               msgcn_metrics* out_metrics) {
    if (!predicted_path || !reference_path || !out_metrics)
        return fail(MSGCN_ERR_INVALID_ARG, "null argument");
    try {
        const msgcn::ChangeMap pred = msgcn::read_change_map(predicted_path);
        const msgcn::ChangeMap ref = msgcn::read_change_map(reference_path);
        fill(out_metrics, msgcn::metrics(msgcn::confusion(pred, ref)));
        return MSGCN_OK;
    } catch (const std::exception& e) {
        return fail(MSGCN_ERR_IO, e.what());
    }
}

}  // extern "C"
