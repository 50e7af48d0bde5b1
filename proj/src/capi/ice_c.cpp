// C ABI wrapper over the C++ core. Exceptions stop at this boundary and
// become status codes; the message lands in a thread-local slot.

#include "ice.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "ice/config.hpp"
#include "ice/http_server.hpp"
#include "ice/metrics.hpp"
#include "ice/mock_server.hpp"
#include "ice/scheduler.hpp"
#include "ice/tokenizer.hpp"
#include "ice/upstream.hpp"

namespace {

thread_local std::string g_last_error;

ice_status to_status(ice::ErrorCode code) {
    using ice::ErrorCode;
    switch (code) {
        case ErrorCode::None: return ICE_OK;
        case ErrorCode::InvalidArgument: return ICE_ERR_INVALID_ARGUMENT;
        case ErrorCode::OutOfRange: return ICE_ERR_OUT_OF_RANGE;
        case ErrorCode::SystemPromptMisplaced: return ICE_ERR_SYSTEM_PROMPT_MISPLACED;
        case ErrorCode::EmptyTranscript: return ICE_ERR_EMPTY_TRANSCRIPT;
        case ErrorCode::Infeasible: return ICE_ERR_INFEASIBLE;
        case ErrorCode::EmptyStore: return ICE_ERR_EMPTY_STORE;
        case ErrorCode::UnknownId: return ICE_ERR_UNKNOWN_ID;
        case ErrorCode::MalformedRequest: return ICE_ERR_MALFORMED_REQUEST;
        case ErrorCode::PolicyInvalid: return ICE_ERR_POLICY_INVALID;
        case ErrorCode::UpstreamUnreachable: return ICE_ERR_UPSTREAM_UNREACHABLE;
        case ErrorCode::ContinuationFailed: return ICE_ERR_CONTINUATION_FAILED;
        case ErrorCode::SessionBusy: return ICE_ERR_SESSION_BUSY;
        case ErrorCode::UnknownSession: return ICE_ERR_UNKNOWN_SESSION;
        case ErrorCode::ParseError: return ICE_ERR_PARSE;
        case ErrorCode::EmptySpec: return ICE_ERR_EMPTY_SPEC;
        case ErrorCode::BoundUndefined: return ICE_ERR_BOUND_UNDEFINED;
        case ErrorCode::IoError: return ICE_ERR_IO;
        case ErrorCode::Internal: return ICE_ERR_INTERNAL;
    }
    return ICE_ERR_INTERNAL;
}

template <typename Fn>
ice_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return ICE_OK;
    } catch (const ice::IceError& err) {
        g_last_error = err.what();
        return to_status(err.code());
    } catch (const std::exception& err) {
        g_last_error = err.what();
        return ICE_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return ICE_ERR_INTERNAL;
    }
}

ice_status invalid(const char* message) {
    g_last_error = message;
    return ICE_ERR_INVALID_ARGUMENT;
}

// Copies into malloc'd storage so C callers pair it with ice_string_free.
char* dup_string(const std::string& value) {
    char* out = static_cast<char*>(std::malloc(value.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, value.data(), value.size() + 1);
    return out;
}

}  // namespace

struct ice_gateway {
    std::unique_ptr<ice::GatewayServer> server;
};

struct ice_mock {
    std::unique_ptr<ice::MockServer> server;
};

extern "C" {

const char* ice_status_name(ice_status status) {
    switch (status) {
        case ICE_OK: return "ok";
        case ICE_ERR_INVALID_ARGUMENT: return "invalid-argument";
        case ICE_ERR_OUT_OF_RANGE: return "out-of-range";
        case ICE_ERR_SYSTEM_PROMPT_MISPLACED: return "system-prompt-misplaced";
        case ICE_ERR_EMPTY_TRANSCRIPT: return "empty-transcript";
        case ICE_ERR_INFEASIBLE: return "infeasible";
        case ICE_ERR_EMPTY_STORE: return "empty-store";
        case ICE_ERR_UNKNOWN_ID: return "unknown-id";
        case ICE_ERR_MALFORMED_REQUEST: return "malformed-request";
        case ICE_ERR_POLICY_INVALID: return "policy-invalid";
        case ICE_ERR_UPSTREAM_UNREACHABLE: return "upstream-unreachable";
        case ICE_ERR_CONTINUATION_FAILED: return "continuation-failed";
        case ICE_ERR_SESSION_BUSY: return "session-busy";
        case ICE_ERR_UNKNOWN_SESSION: return "unknown-session";
        case ICE_ERR_PARSE: return "parse-error";
        case ICE_ERR_EMPTY_SPEC: return "empty-spec";
        case ICE_ERR_BOUND_UNDEFINED: return "bound-undefined";
        case ICE_ERR_IO: return "io-error";
        case ICE_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* ice_last_error(void) { return g_last_error.c_str(); }

const char* ice_version(void) { return "0.1.0"; }

void ice_string_free(char* str) { std::free(str); }

ice_status ice_count_tokens(const char* mode, uint64_t chars_per_token, const char* text,
                            uint64_t* out_count) {
    if (!mode || !text || !out_count) return invalid("mode, text and out_count are required");
    return guarded([&] {
        ice::TokenCounter counter = ice::TokenCounter::from_config(mode, chars_per_token);
        *out_count = counter.count(text);
    });
}

ice_status ice_predicted_ratio(uint64_t s_p, uint64_t s_ice, uint64_t t, uint64_t l,
                               double* out_ratio) {
    if (!out_ratio) return invalid("out_ratio is required");
    return guarded([&] { *out_ratio = ice::predicted_ratio(s_p, s_ice, t, l); });
}

ice_status ice_asymptotic_ratio(uint64_t s_ice, uint64_t t, double* out_ratio) {
    if (!out_ratio) return invalid("out_ratio is required");
    return guarded([&] { *out_ratio = ice::asymptotic_q(s_ice, t); });
}

ice_status ice_solve_period(double target_q, uint64_t s_ice, uint64_t* out_t) {
    if (!out_t) return invalid("out_t is required");
    return guarded([&] { *out_t = ice::solve_period(target_q, s_ice); });
}

ice_status ice_lower_bound(uint64_t s_ice, uint64_t t, uint64_t l, double* out_bound) {
    if (!out_bound) return invalid("out_bound is required");
    return guarded([&] { *out_bound = ice::guaranteed_lower_bound(s_ice, t, l); });
}

ice_status ice_replay(const char* transcript_jsonl, char** out_summary_json,
                      char** out_trajectory_csv) {
    if (!transcript_jsonl) return invalid("transcript_jsonl is required");
    return guarded([&] {
        ice::ReplayResult result = ice::replay_transcript(transcript_jsonl);
        if (out_summary_json) *out_summary_json = dup_string(ice::replay_to_json(result).dump(2));
        if (out_trajectory_csv) *out_trajectory_csv = dup_string(ice::trajectory_to_csv(result));
    });
}

ice_status ice_sweep(const char* spec_json, char** out_csv) {
    if (!spec_json || !out_csv) return invalid("spec_json and out_csv are required");
    return guarded([&] {
        nlohmann::json doc = nlohmann::json::parse(spec_json, nullptr, false);
        if (doc.is_discarded()) ice::raise(ice::ErrorCode::ParseError, "spec is not valid JSON");
        ice::SweepSpec spec = ice::SweepSpec::from_json(doc);
        *out_csv = dup_string(ice::sweep_to_csv(ice::run_sweep(spec)));
    });
}

ice_status ice_gateway_create(const char* config_json, ice_gateway** out) {
    if (!config_json || !out) return invalid("config_json and out are required");
    *out = nullptr;
    return guarded([&] {
        ice::GatewaySettings settings = ice::parse_gateway_config_text(config_json);
        auto upstream = std::make_unique<ice::HttpUpstream>(settings.upstream_base_url,
                                                            settings.upstream_auth_env);
        auto handle = std::make_unique<ice_gateway>();
        handle->server =
            std::make_unique<ice::GatewayServer>(std::move(settings), std::move(upstream));
        *out = handle.release();
    });
}

ice_status ice_gateway_start(ice_gateway* gateway, int* out_port) {
    if (!gateway) return invalid("gateway handle is required");
    return guarded([&] {
        int port = gateway->server->start();
        if (out_port) *out_port = port;
    });
}

ice_status ice_gateway_stop(ice_gateway* gateway) {
    if (!gateway) return invalid("gateway handle is required");
    return guarded([&] { gateway->server->stop(); });
}

void ice_gateway_destroy(ice_gateway* gateway) { delete gateway; }

ice_status ice_mock_create(const char* behavior_json, const char* host, int port,
                           ice_mock** out) {
    if (!behavior_json || !out) return invalid("behavior_json and out are required");
    *out = nullptr;
    return guarded([&] {
        nlohmann::json doc = nlohmann::json::parse(behavior_json, nullptr, false);
        if (doc.is_discarded())
            ice::raise(ice::ErrorCode::ParseError, "behavior is not valid JSON");
        ice::MockBehavior behavior = ice::MockBehavior::from_json(doc);
        auto handle = std::make_unique<ice_mock>();
        handle->server = std::make_unique<ice::MockServer>(
            std::move(behavior), host && *host ? host : "127.0.0.1", port);
        *out = handle.release();
    });
}

ice_status ice_mock_start(ice_mock* mock, int* out_port) {
    if (!mock) return invalid("mock handle is required");
    return guarded([&] {
        int port = mock->server->start();
        if (out_port) *out_port = port;
    });
}

ice_status ice_mock_stop(ice_mock* mock) {
    if (!mock) return invalid("mock handle is required");
    return guarded([&] { mock->server->stop(); });
}

void ice_mock_destroy(ice_mock* mock) { delete mock; }

}  // extern "C"
