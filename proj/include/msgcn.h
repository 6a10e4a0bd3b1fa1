/* C API for the msgcn change-detection toolkit.
 *
 * All functions return MSGCN_OK (0) on success or a negative error code;
 * msgcn_last_error() gives a message for the calling thread's last failure.
 * Handles are opaque and must be released with their destroy function.
 */
#ifndef MSGCN_H
#define MSGCN_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum msgcn_status {
    MSGCN_OK = 0,
    MSGCN_ERR_INVALID_ARG = -1,
    MSGCN_ERR_IO = -2,
    MSGCN_ERR_CONFIG = -3,
    MSGCN_ERR_RUNTIME = -4
};

typedef struct msgcn_config msgcn_config;

typedef struct msgcn_metrics {
    double far;
    double mar;
    double oa;
    double kappa;
    int valid; /* 0 when no reference was available */
} msgcn_metrics;

const char* msgcn_version(void);
const char* msgcn_last_error(void);

/* Config with all defaults in place. */
int msgcn_config_create(msgcn_config** out);
int msgcn_config_load(const char* path, msgcn_config** out);
/* Same key=value schema as the config file. */
int msgcn_config_set(msgcn_config* cfg, const char* key, const char* value);
void msgcn_config_destroy(msgcn_config* cfg);

/* End-to-end pipeline. Writes change_map.pgm, metrics.csv (if a reference is
 * configured) and loss_history.csv under out_dir. */
int msgcn_run(const msgcn_config* cfg, const char* out_dir, int dump_intermediates,
              msgcn_metrics* out_metrics);

/* Synthetic scene generator; writes t1.pgm, t2.pgm, reference.pgm. */
int msgcn_synth(const msgcn_config* cfg, const char* out_dir);

/* mode: "scale-combinations" or "layer-depths". Writes ablation.csv. */
int msgcn_ablate(const msgcn_config* cfg, const char* mode, const char* out_dir);

/* Compare two change-map PGMs. */
int msgcn_eval(const char* predicted_path, const char* reference_path,
               msgcn_metrics* out_metrics);

#ifdef __cplusplus
}
#endif

#endif /* MSGCN_H */
