/* ice.h - C interface to the ICE gateway library.
 *
 * ICE (invasive context engineering) keeps a configurable share of an LLM
 * session's context under operator control by injecting control sentences
 * every t tokens, both between messages and mid-stream inside reasoning
 * output. This header exposes the scheduler math, the offline analysis
 * tools, and the gateway / mock-model servers behind opaque handles.
 *
 * Conventions: every fallible call returns ice_status (ICE_OK on success)
 * and writes results through out-parameters. The message for the most
 * recent failure on the calling thread is available via ice_last_error().
 * Strings returned through char** out-parameters are heap-allocated and
 * must be released with ice_string_free().
 */

#ifndef ICE_H
#define ICE_H

#include <stdint.h>

#if defined(_WIN32)
#define ICE_API __declspec(dllexport)
#else
#define ICE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ice_status {
    ICE_OK = 0,
    ICE_ERR_INVALID_ARGUMENT = 1,
    ICE_ERR_OUT_OF_RANGE = 2,
    ICE_ERR_SYSTEM_PROMPT_MISPLACED = 3,
    ICE_ERR_EMPTY_TRANSCRIPT = 4,
    ICE_ERR_INFEASIBLE = 5,
    ICE_ERR_EMPTY_STORE = 6,
    ICE_ERR_UNKNOWN_ID = 7,
    ICE_ERR_MALFORMED_REQUEST = 8,
    ICE_ERR_POLICY_INVALID = 9,
    ICE_ERR_UPSTREAM_UNREACHABLE = 10,
    ICE_ERR_CONTINUATION_FAILED = 11,
    ICE_ERR_SESSION_BUSY = 12,
    ICE_ERR_UNKNOWN_SESSION = 13,
    ICE_ERR_PARSE = 14,
    ICE_ERR_EMPTY_SPEC = 15,
    ICE_ERR_BOUND_UNDEFINED = 16,
    ICE_ERR_IO = 17,
    ICE_ERR_INTERNAL = 18,
} ice_status;

/* Stable kebab-case name for a status code ("ok", "policy-invalid", ...). */
ICE_API const char* ice_status_name(ice_status status);

/* Message of the last failing call on this thread; empty string if none. */
ICE_API const char* ice_last_error(void);

ICE_API const char* ice_version(void);

/* Releases any char* obtained from this library. NULL is a no-op. */
ICE_API void ice_string_free(char* str);

/* --- token counting ------------------------------------------------------ */

/* Counts tokens in `text` under a tokenizer mode: "whitespace" (maximal
 * non-whitespace runs), "byte", or "fixed_chars" (ceil of length over
 * chars_per_token; pass 0 for the default of 4). */
ICE_API ice_status ice_count_tokens(const char* mode, uint64_t chars_per_token,
                                    const char* text, uint64_t* out_count);

/* --- scheduler math -------------------------------------------------------
 * s_p  tokens of system prompt, s_ice tokens per control block,
 * t    injection period in total context tokens,
 * l    current context length in tokens,
 * q    target asymptotic control ratio.
 */

/* Expected control-token ratio at context length l: s_p / l + s_ice / t. */
ICE_API ice_status ice_predicted_ratio(uint64_t s_p, uint64_t s_ice, uint64_t t,
                                       uint64_t l, double* out_ratio);

/* Limit ratio of periodic injection alone: s_ice / t. */
ICE_API ice_status ice_asymptotic_ratio(uint64_t s_ice, uint64_t t, double* out_ratio);

/* Largest period t whose asymptotic ratio still reaches q; fails with
 * ICE_ERR_INFEASIBLE when no period longer than the control block works. */
ICE_API ice_status ice_solve_period(double target_q, uint64_t s_ice, uint64_t* out_t);

/* Worst-case measured ratio at l >= t: s_ice / t - s_ice / l. Fails with
 * ICE_ERR_BOUND_UNDEFINED for l < t. */
ICE_API ice_status ice_lower_bound(uint64_t s_ice, uint64_t t, uint64_t l,
                                   double* out_bound);

/* --- offline analysis ----------------------------------------------------- */

/* Recomputes ratio accounting from a persisted transcript (line-delimited
 * JSON as written by the gateway, meta line included). On success writes a
 * JSON summary and a per-segment trajectory CSV; either out-pointer may be
 * NULL if that artifact is not wanted. */
ICE_API ice_status ice_replay(const char* transcript_jsonl, char** out_summary_json,
                              char** out_trajectory_csv);

/* Evaluates a (t, s_ice) grid described by spec_json, e.g.
 *   {"t": [250, 500], "s_ice": [10, 25], "s_p": 600, "l_max": 1000000}
 * and writes one CSV row per combination. */
ICE_API ice_status ice_sweep(const char* spec_json, char** out_csv);

/* --- gateway server -------------------------------------------------------- */

typedef struct ice_gateway ice_gateway;

/* Builds a gateway from its JSON configuration (same schema as the config
 * file accepted by the CLI). The gateway is created stopped. */
ICE_API ice_status ice_gateway_create(const char* config_json, ice_gateway** out);

/* Binds and serves on a background thread; returns the bound port (useful
 * when the configured port is 0). */
ICE_API ice_status ice_gateway_start(ice_gateway* gateway, int* out_port);

ICE_API ice_status ice_gateway_stop(ice_gateway* gateway);

ICE_API void ice_gateway_destroy(ice_gateway* gateway);

/* --- mock model server ------------------------------------------------------ */

typedef struct ice_mock ice_mock;

/* Deterministic stand-in for a model provider; behavior_json selects the
 * mode ("echo-deterministic", "scripted", "compliance-probe") and its
 * parameters. host may be NULL for 127.0.0.1; port 0 picks a free port. */
ICE_API ice_status ice_mock_create(const char* behavior_json, const char* host,
                                   int port, ice_mock** out);

ICE_API ice_status ice_mock_start(ice_mock* mock, int* out_port);

ICE_API ice_status ice_mock_stop(ice_mock* mock);

ICE_API void ice_mock_destroy(ice_mock* mock);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* ICE_H */
