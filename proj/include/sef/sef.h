/* C interface to the SeF library: chain generation and storage, droplet
 * node encoding, and bootstrap simulation. Configuration travels as JSON
 * text. Every call returns a status; on failure sef_last_error() describes
 * the problem (thread-local, valid until the next call on the same thread).
 * Strings returned through char** are owned by the caller and released with
 * sef_string_free. */
#ifndef SEF_SEF_H
#define SEF_SEF_H

#include <stddef.h>
#include <stdint.h>

#if defined(SEF_BUILDING_LIBRARY)
#define SEF_API __attribute__((visibility("default")))
#else
#define SEF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sef_status {
    SEF_OK = 0,
    SEF_ERR_CONFIG = 1,
    SEF_ERR_INTEGRITY = 2,
    SEF_ERR_DECODE_EXHAUSTED = 3,
    SEF_ERR_PARSE = 4,
    SEF_ERR_IO = 5,
    SEF_ERR_INVALID_ARG = 6,
    SEF_ERR_INTERNAL = 7
} sef_status;

typedef struct sef_chain sef_chain;
typedef struct sef_node_store sef_node_store;

typedef struct sef_savings {
    double gamma;           /* sealed chain bytes / droplet data bytes */
    double gamma_inclusive; /* chain bytes / every stored byte */
    uint64_t sealed_chain_bytes;
    uint64_t droplet_bytes;
    uint64_t stored_bytes;
    uint32_t sealed_epochs;
} sef_savings;

SEF_API const char* sef_version(void);
SEF_API const char* sef_last_error(void);
SEF_API const char* sef_status_name(sef_status status);

SEF_API sef_status sef_hash(const uint8_t* data, size_t len, uint8_t out[32]);

/* config_json: {"n_blocks", "size_model", "txs_min", "txs_max",
 * "max_block_size", "seed"}. */
SEF_API sef_status sef_chain_generate(const char* config_json, sef_chain** out);
SEF_API sef_status sef_chain_load(const char* path, sef_chain** out);
SEF_API sef_status sef_chain_store(const sef_chain* chain, const char* path);
SEF_API uint64_t sef_chain_height(const sef_chain* chain);
SEF_API uint64_t sef_chain_size(const sef_chain* chain);
SEF_API void sef_chain_free(sef_chain* chain);

/* Seals every finalized epoch of chain for one node.
 * config_json: {"epoch": {...}, "pmf", "c", "delta", "node_id", "seed"}. */
SEF_API sef_status sef_node_encode(const sef_chain* chain, const char* config_json, sef_node_store** out);
/* provenance_json (nullable) is embedded in the snapshot manifest. */
SEF_API sef_status sef_node_store_save(const sef_node_store* store, const char* path,
                                       const char* provenance_json);
SEF_API sef_status sef_node_store_load(const char* path, sef_node_store** out);
SEF_API sef_status sef_node_store_savings(const sef_node_store* store, sef_savings* out);
SEF_API void sef_node_store_free(sef_node_store* store);

/* Runs network.trials bootstrap trials. chain may be NULL, in which case the
 * "chain" section generates one; {"toy": true} runs the nine-node fixture.
 * result_json receives the resolved config, per-trial results and summary;
 * csv_rows (nullable) one CSV row per trial. Returns
 * SEF_ERR_DECODE_EXHAUSTED when no trial recovered the chain; outputs are
 * still filled in. */
SEF_API sef_status sef_bootstrap_run(const sef_chain* chain, const char* config_json, char** result_json,
                                     char** csv_rows);

/* Runs a parameter sweep. Any output pointer may be NULL. best_json lists
 * the chosen (c, delta) per cell. */
SEF_API sef_status sef_sweep_run(const char* config_json, char** trials_csv, char** summary_csv,
                                 char** best_json);

SEF_API void sef_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
