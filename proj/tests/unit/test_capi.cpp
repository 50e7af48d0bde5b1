// Exercises the shared library strictly through its C surface; the HTTP
// clients below are only scaffolding to drive the opaque server handles.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <httplib.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "ice.h"

using nlohmann::json;

namespace {

std::string words(const std::string& stem, int n) {
    std::string text;
    for (int i = 0; i < n; ++i) {
        if (i > 0) text += ' ';
        text += stem + std::to_string(i);
    }
    return text;
}

std::string write_store() {
    json bank = json::array();
    bank.push_back({{"id", "alpha"}, {"text", "Always follow the operator safety rules."}});
    auto path = std::filesystem::temp_directory_path() / "ice_capi_test_store.json";
    std::ofstream out(path, std::ios::trunc);
    out << bank.dump(2);
    return path.string();
}

// Heap string out-parameters, captured and freed in one move.
std::string take(char* str) {
    REQUIRE(str != nullptr);
    std::string owned(str);
    ice_string_free(str);
    return owned;
}

const char* kTranscript =
    "{\"type\":\"meta\",\"session_id\":\"s-1\",\"tokenizer\":{\"mode\":\"whitespace\"},"
    "\"policy\":{\"t\":5,\"s_ice\":2}}\n"
    "{\"kind\":\"system-prompt\",\"text\":\"Be safe.\",\"token_count\":2,\"seq\":0}\n"
    "{\"kind\":\"user\",\"text\":\"a b c d e f g h\",\"token_count\":8,\"seq\":1}\n";

}  // namespace

TEST_CASE("status names, version, and the error slot") {
    CHECK(std::strcmp(ice_status_name(ICE_OK), "ok") == 0);
    CHECK(std::strcmp(ice_status_name(ICE_ERR_INVALID_ARGUMENT), "invalid-argument") == 0);
    CHECK(std::strcmp(ice_status_name(ICE_ERR_INFEASIBLE), "infeasible") == 0);
    CHECK(std::strcmp(ice_status_name(ICE_ERR_BOUND_UNDEFINED), "bound-undefined") == 0);
    CHECK(std::strcmp(ice_status_name(ICE_ERR_INTERNAL), "internal") == 0);
    CHECK(std::strlen(ice_version()) > 0);

    // A failing call leaves its message behind; the next success clears it.
    double ratio = 0.0;
    CHECK(ice_predicted_ratio(0, 25, 500, 0, &ratio) == ICE_ERR_INVALID_ARGUMENT);
    CHECK(std::strlen(ice_last_error()) > 0);
    CHECK(ice_predicted_ratio(600, 25, 500, 1000, &ratio) == ICE_OK);
    CHECK(std::strlen(ice_last_error()) == 0);

    ice_string_free(nullptr);  // documented no-op
}

TEST_CASE("token counting across tokenizer modes") {
    uint64_t count = 0;
    CHECK(ice_count_tokens("whitespace", 0, "alpha  beta\tgamma\n", &count) == ICE_OK);
    CHECK(count == 3);
    CHECK(ice_count_tokens("byte", 0, "abcd", &count) == ICE_OK);
    CHECK(count == 4);
    CHECK(ice_count_tokens("fixed_chars", 0, "0123456789", &count) == ICE_OK);
    CHECK(count == 3);  // chars_per_token 0 falls back to 4: ceil(10 / 4)
    CHECK(ice_count_tokens("fixed_chars", 5, "0123456789", &count) == ICE_OK);
    CHECK(count == 2);
    CHECK(ice_count_tokens("whitespace", 0, "", &count) == ICE_OK);
    CHECK(count == 0);

    CHECK(ice_count_tokens("bpe", 0, "text", &count) == ICE_ERR_INVALID_ARGUMENT);
    CHECK(ice_count_tokens(nullptr, 0, "text", &count) == ICE_ERR_INVALID_ARGUMENT);
    CHECK(ice_count_tokens("whitespace", 0, nullptr, &count) == ICE_ERR_INVALID_ARGUMENT);
    CHECK(ice_count_tokens("whitespace", 0, "text", nullptr) == ICE_ERR_INVALID_ARGUMENT);
}

TEST_CASE("scheduler math round-trips through the C layer") {
    double ratio = 0.0;
    REQUIRE(ice_predicted_ratio(600, 25, 500, 1000, &ratio) == ICE_OK);
    CHECK(ratio == doctest::Approx(600.0 / 1000.0 + 25.0 / 500.0));
    CHECK(ice_predicted_ratio(600, 25, 0, 1000, &ratio) == ICE_ERR_INVALID_ARGUMENT);
    CHECK(ice_predicted_ratio(600, 25, 500, 1000, nullptr) == ICE_ERR_INVALID_ARGUMENT);

    REQUIRE(ice_asymptotic_ratio(25, 500, &ratio) == ICE_OK);
    CHECK(ratio == doctest::Approx(0.05));
    CHECK(ice_asymptotic_ratio(25, 0, &ratio) == ICE_ERR_INVALID_ARGUMENT);

    uint64_t t = 0;
    REQUIRE(ice_solve_period(0.05, 25, &t) == ICE_OK);
    CHECK(t == 500);
    REQUIRE(ice_solve_period(0.9, 50, &t) == ICE_OK);
    CHECK(t == 55);  // 50/55 still clears 0.9, 50/56 does not
    CHECK(ice_solve_period(0.999, 50, &t) == ICE_ERR_INFEASIBLE);
    CHECK(ice_solve_period(0.0, 50, &t) == ICE_ERR_INVALID_ARGUMENT);
    CHECK(ice_solve_period(0.5, 0, &t) == ICE_ERR_INVALID_ARGUMENT);

    double bound = 0.0;
    REQUIRE(ice_lower_bound(25, 500, 10000, &bound) == ICE_OK);
    CHECK(bound == doctest::Approx(0.05 - 25.0 / 10000.0));
    REQUIRE(ice_lower_bound(25, 500, 500, &bound) == ICE_OK);
    CHECK(bound == 0.0);
    CHECK(ice_lower_bound(25, 500, 499, &bound) == ICE_ERR_BOUND_UNDEFINED);
}

TEST_CASE("replay produces the summary and trajectory artifacts") {
    char* summary_text = nullptr;
    char* csv_text = nullptr;
    REQUIRE(ice_replay(kTranscript, &summary_text, &csv_text) == ICE_OK);
    json summary = json::parse(take(summary_text));
    CHECK(summary["session_id"] == "s-1");
    CHECK(summary["policy"]["t"] == 5);
    CHECK(summary["report"]["total_tokens"] == 10);
    CHECK(summary["report"]["measured_ratio"] == doctest::Approx(0.2));
    CHECK(summary["points"] == 2);
    CHECK(summary["warnings"].empty());

    std::string csv = take(csv_text);
    CHECK(csv.rfind("l,measured_ratio,predicted_ratio,lower_bound\n", 0) == 0);
    CHECK(csv.find("\n10,0.2,") != std::string::npos);

    // Either artifact may be declined.
    CHECK(ice_replay(kTranscript, nullptr, nullptr) == ICE_OK);

    CHECK(ice_replay(nullptr, &summary_text, &csv_text) == ICE_ERR_INVALID_ARGUMENT);
    CHECK(ice_replay("", &summary_text, &csv_text) == ICE_ERR_PARSE);
    CHECK(ice_replay("nonsense", &summary_text, &csv_text) == ICE_ERR_PARSE);
    CHECK(std::strlen(ice_last_error()) > 0);
}

TEST_CASE("sweep evaluates a policy grid into CSV") {
    char* csv_text = nullptr;
    REQUIRE(ice_sweep(R"({"t":[500],"s_ice":[25],"s_p":600,"l_max":1000000})", &csv_text) ==
            ICE_OK);
    std::string csv = take(csv_text);
    CHECK(csv.rfind("t,s_ice,feasible,asymptotic_q,overhead_at_l_max,lower_bound_at_l_max,"
                    "baseline_prompt_ratio\n",
                    0) == 0);
    // Shortest round-trip formatting: the bound carries the FP residue of
    // 0.05 - 25e-6 and the baseline collapses to exponent form.
    CHECK(csv.find("\n500,25,true,0.05,0.05,0.049975000000000006,6e-04\n") != std::string::npos);

    CHECK(ice_sweep("nope", &csv_text) == ICE_ERR_PARSE);
    CHECK(ice_sweep(R"({"t":[],"s_ice":[25],"l_max":10})", &csv_text) == ICE_ERR_EMPTY_SPEC);
    CHECK(ice_sweep(R"({"t":[500],"s_ice":[25]})", &csv_text) == ICE_ERR_EMPTY_SPEC);
    CHECK(ice_sweep(nullptr, &csv_text) == ICE_ERR_INVALID_ARGUMENT);
    CHECK(ice_sweep(R"({"t":[500],"s_ice":[25],"l_max":10})", nullptr) ==
          ICE_ERR_INVALID_ARGUMENT);
}

TEST_CASE("mock and gateway handles serve a full exchange over sockets") {
    const std::string fixture = words("f", 300);
    json behavior{{"mode", "scripted"}, {"fixture_text", fixture}};
    ice_mock* mock = nullptr;
    REQUIRE(ice_mock_create(behavior.dump().c_str(), nullptr, 0, &mock) == ICE_OK);
    REQUIRE(mock != nullptr);
    int mock_port = 0;
    REQUIRE(ice_mock_start(mock, &mock_port) == ICE_OK);
    REQUIRE(mock_port > 0);

    json config{
        {"listen_addr", "127.0.0.1:0"},
        {"upstream",
         {{"base_url", "http://127.0.0.1:" + std::to_string(mock_port)},
          {"model", "capi-model"}}},
        {"control_store", {{"path", write_store()}}},
        {"policy",
         {{"t", 100}, {"s_ice", 6}, {"scope", json::array({"conversation", "chain-of-thought"})}}},
    };
    ice_gateway* gateway = nullptr;
    REQUIRE(ice_gateway_create(config.dump().c_str(), &gateway) == ICE_OK);
    REQUIRE(gateway != nullptr);
    int port = 0;
    REQUIRE(ice_gateway_start(gateway, &port) == ICE_OK);
    REQUIRE(port > 0);

    httplib::Client client("127.0.0.1", port);
    json body{{"model", "m"},
              {"messages", json::array({{{"role", "user"}, {"content", "begin analysis now"}}})}};
    auto res = client.Post("/v1/chat/completions", body.dump(), "application/json");
    REQUIRE(res);
    REQUIRE(res->status == 200);
    json out = json::parse(res->body);
    CHECK(out["model"] == "capi-model");
    CHECK(out["choices"][0]["message"]["reasoning_content"] == fixture);
    CHECK(out["usage"]["completion_tokens"] == 300);

    std::string session = res->get_header_value("X-ICE-Session");
    auto report = client.Get(("/admin/sessions/" + session + "/report").c_str());
    REQUIRE(report);
    REQUIRE(report->status == 200);
    CHECK(json::parse(report->body)["ice_injections"] == 3);

    CHECK(ice_gateway_stop(gateway) == ICE_OK);
    CHECK(ice_mock_stop(mock) == ICE_OK);
    ice_gateway_destroy(gateway);
    ice_mock_destroy(mock);
}

TEST_CASE("handle creation rejects bad input without leaking half-built servers") {
    ice_gateway* gateway = reinterpret_cast<ice_gateway*>(0x1);
    CHECK(ice_gateway_create("not json", &gateway) == ICE_ERR_PARSE);
    CHECK(gateway == nullptr);

    json both_periods{
        {"upstream", {{"base_url", "http://127.0.0.1:1"}}},
        {"control_store", {{"path", write_store()}}},
        {"policy", {{"t", 100}, {"target_q", 0.05}, {"s_ice", 6}}},
    };
    CHECK(ice_gateway_create(both_periods.dump().c_str(), &gateway) == ICE_ERR_POLICY_INVALID);
    CHECK(gateway == nullptr);
    CHECK(ice_gateway_create(nullptr, &gateway) == ICE_ERR_INVALID_ARGUMENT);

    ice_mock* mock = reinterpret_cast<ice_mock*>(0x1);
    CHECK(ice_mock_create("not json", nullptr, 0, &mock) == ICE_ERR_PARSE);
    CHECK(mock == nullptr);
    CHECK(ice_mock_create(R"({"mode":"chaos"})", nullptr, 0, &mock) == ICE_ERR_PARSE);
    CHECK(ice_mock_create(R"({"mode":"scripted"})", nullptr, 0, &mock) ==
          ICE_ERR_POLICY_INVALID);  // scripted playback needs a fixture
    CHECK(ice_mock_create(nullptr, nullptr, 0, &mock) == ICE_ERR_INVALID_ARGUMENT);

    CHECK(ice_gateway_start(nullptr, nullptr) == ICE_ERR_INVALID_ARGUMENT);
    CHECK(ice_gateway_stop(nullptr) == ICE_ERR_INVALID_ARGUMENT);
    CHECK(ice_mock_start(nullptr, nullptr) == ICE_ERR_INVALID_ARGUMENT);
    CHECK(ice_mock_stop(nullptr) == ICE_ERR_INVALID_ARGUMENT);
    ice_gateway_destroy(nullptr);
    ice_mock_destroy(nullptr);
}
