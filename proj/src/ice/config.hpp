#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "ice/scheduler.hpp"
#include "ice/tokenizer.hpp"

namespace ice {

// Fully validated gateway configuration. See README for the file schema.
struct GatewaySettings {
    std::string listen_host = "127.0.0.1";
    int listen_port = 8080;

    std::string upstream_base_url;
    std::string upstream_model = "default";
    std::string upstream_auth_env;

    IcePolicy policy;
    std::string control_store_path;
    TokenCounter counter;

    std::string continuation_instruction =
        "Continue your reasoning from exactly where it stopped; do not repeat "
        "anything you already wrote.";

    // Directory for per-session transcript files; empty disables persistence.
    std::string transcript_dir;

    // Safety valve for runaway mid-stream resume loops.
    std::uint64_t max_continuations_per_turn = 128;
};

// Parses and validates a config document. policy.t and policy.target_q are
// mutually exclusive; with target_q the period is derived via solve_period.
// Throws PolicyInvalid / ParseError / InvalidArgument on bad input.
GatewaySettings parse_gateway_config(const nlohmann::json& doc);
GatewaySettings parse_gateway_config_text(const std::string& text);

}  // namespace ice
