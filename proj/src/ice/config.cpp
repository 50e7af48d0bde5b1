#include "ice/config.hpp"

namespace ice {

namespace {

// Splits "host:port" (host may be empty to mean all interfaces).
void parse_listen_addr(const std::string& addr, GatewaySettings& out) {
    std::size_t colon = addr.rfind(':');
    if (colon == std::string::npos) {
        raise(ErrorCode::ParseError, "listen_addr must look like host:port");
    }
    out.listen_host = addr.substr(0, colon);
    if (out.listen_host.empty()) out.listen_host = "0.0.0.0";
    try {
        out.listen_port = std::stoi(addr.substr(colon + 1));
    } catch (const std::exception&) {
        raise(ErrorCode::ParseError, "listen_addr has a non-numeric port");
    }
    if (out.listen_port < 0 || out.listen_port > 65535) {
        raise(ErrorCode::ParseError, "listen_addr port out of range");
    }
}

}  // namespace

GatewaySettings parse_gateway_config(const nlohmann::json& doc) {
    if (!doc.is_object()) {
        raise(ErrorCode::ParseError, "config must be a JSON object");
    }
    GatewaySettings s;

    if (doc.contains("listen_addr")) {
        parse_listen_addr(doc["listen_addr"].get<std::string>(), s);
    }

    if (!doc.contains("upstream") || !doc["upstream"].is_object() ||
        !doc["upstream"].contains("base_url")) {
        raise(ErrorCode::ParseError, "config needs upstream.base_url");
    }
    const nlohmann::json& upstream = doc["upstream"];
    s.upstream_base_url = upstream["base_url"].get<std::string>();
    s.upstream_model = upstream.value("model", s.upstream_model);
    s.upstream_auth_env = upstream.value("auth_env", "");

    std::string tokenizer_mode = "whitespace";
    std::uint32_t chars_per_token = 4;
    if (doc.contains("tokenizer")) {
        const nlohmann::json& tok = doc["tokenizer"];
        tokenizer_mode = tok.value("mode", tokenizer_mode);
        chars_per_token = tok.value("chars_per_token", chars_per_token);
    }
    s.counter = TokenCounter::from_config(tokenizer_mode, chars_per_token);

    if (!doc.contains("control_store") || !doc["control_store"].is_object() ||
        !doc["control_store"].contains("path")) {
        raise(ErrorCode::ParseError, "config needs control_store.path");
    }
    s.control_store_path = doc["control_store"]["path"].get<std::string>();

    if (!doc.contains("policy") || !doc["policy"].is_object()) {
        raise(ErrorCode::ParseError, "config needs a policy object");
    }
    const nlohmann::json& policy = doc["policy"];

    if (!policy.contains("s_ice")) {
        raise(ErrorCode::ParseError, "config needs policy.s_ice (nominal control tokens)");
    }
    s.policy.nominal_ice_tokens = policy["s_ice"].get<std::uint64_t>();

    bool has_t = policy.contains("t");
    bool has_q = policy.contains("target_q");
    if (has_t == has_q) {
        raise(ErrorCode::PolicyInvalid,
              "policy must set exactly one of policy.t and policy.target_q");
    }
    if (has_t) {
        s.policy.period_tokens = policy["t"].get<std::uint64_t>();
    } else {
        s.policy.target_ratio = policy["target_q"].get<double>();
        s.policy.period_tokens =
            solve_period(*s.policy.target_ratio, s.policy.nominal_ice_tokens);
    }

    if (policy.contains("scope")) {
        if (!policy["scope"].is_array()) {
            raise(ErrorCode::PolicyInvalid, "policy.scope must be an array");
        }
        for (const nlohmann::json& entry : policy["scope"]) {
            std::string name = entry.get<std::string>();
            if (name == "conversation") {
                s.policy.scope.conversation = true;
            } else if (name == "chain-of-thought") {
                s.policy.scope.chain_of_thought = true;
            } else {
                raise(ErrorCode::PolicyInvalid, "unknown policy scope '" + name + "'");
            }
        }
    } else {
        s.policy.scope.conversation = true;
    }

    s.policy.visibility = visibility_from_name(policy.value("visibility", "hidden"));

    std::string selection_mode = "round_robin";
    std::string fixed_id;
    if (policy.contains("selection")) {
        const nlohmann::json& sel = policy["selection"];
        selection_mode = sel.value("mode", selection_mode);
        fixed_id = sel.value("fixed_id", "");
    }
    s.policy.selection = SelectionStrategy::from_config(selection_mode, fixed_id);

    s.policy.validate();

    s.continuation_instruction =
        doc.value("continuation_instruction", s.continuation_instruction);
    s.transcript_dir = doc.value("transcript_dir", "");
    s.max_continuations_per_turn =
        doc.value("max_continuations_per_turn", s.max_continuations_per_turn);

    return s;
}

GatewaySettings parse_gateway_config_text(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded()) {
        raise(ErrorCode::ParseError, "config is not valid JSON");
    }
    return parse_gateway_config(doc);
}

}  // namespace ice
