// Command-line front end for the ICE library. Everything goes through the
// C API in ice.h; this file deliberately touches no C++ core headers.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ice.h"

namespace {

std::atomic<bool> g_stop{false};

void handle_signal(int) { g_stop.store(true); }

int fail(const std::string& what, ice_status status) {
    std::fprintf(stderr, "error: %s: %s (%s)\n", what.c_str(), ice_last_error(),
                 ice_status_name(status));
    return 1;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CLI::ValidationError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

bool write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << content;
    return out.good();
}

void wait_for_shutdown() {
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    while (!g_stop.load()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
}

int run_serve(const std::string& config_path) {
    std::string config = read_file(config_path);
    ice_gateway* gateway = nullptr;
    ice_status status = ice_gateway_create(config.c_str(), &gateway);
    if (status != ICE_OK) return fail("gateway config", status);
    int port = 0;
    status = ice_gateway_start(gateway, &port);
    if (status != ICE_OK) {
        ice_gateway_destroy(gateway);
        return fail("gateway start", status);
    }
    std::printf("gateway ready on port %d (ctrl-c to stop)\n", port);
    std::fflush(stdout);
    wait_for_shutdown();
    ice_gateway_stop(gateway);
    ice_gateway_destroy(gateway);
    return 0;
}

int run_mock(const std::string& behavior_path, const std::string& host, int port) {
    std::string behavior = behavior_path.empty() ? std::string("{}") : read_file(behavior_path);
    ice_mock* mock = nullptr;
    ice_status status = ice_mock_create(behavior.c_str(), host.c_str(), port, &mock);
    if (status != ICE_OK) return fail("mock behavior", status);
    int bound = 0;
    status = ice_mock_start(mock, &bound);
    if (status != ICE_OK) {
        ice_mock_destroy(mock);
        return fail("mock start", status);
    }
    std::printf("mock model ready on port %d (ctrl-c to stop)\n", bound);
    std::fflush(stdout);
    wait_for_shutdown();
    ice_mock_stop(mock);
    ice_mock_destroy(mock);
    return 0;
}

int run_plan(double target_q, std::uint64_t s_ice) {
    std::uint64_t t = 0;
    ice_status status = ice_solve_period(target_q, s_ice, &t);
    if (status != ICE_OK) return fail("solve period", status);
    double q = 0.0;
    ice_asymptotic_ratio(s_ice, t, &q);
    nlohmann::json out{{"target_q", target_q}, {"s_ice", s_ice}, {"t", t}, {"asymptotic_q", q}};
    std::printf("%s\n", out.dump(2).c_str());
    return 0;
}

int run_replay(const std::string& transcript_path, const std::string& out_path) {
    std::string jsonl = read_file(transcript_path);
    char* summary = nullptr;
    char* trajectory = nullptr;
    ice_status status =
        ice_replay(jsonl.c_str(), &summary, out_path.empty() ? nullptr : &trajectory);
    if (status != ICE_OK) return fail("replay", status);
    std::printf("%s\n", summary);
    ice_string_free(summary);
    int rc = 0;
    if (trajectory) {
        if (!write_file(out_path, trajectory)) {
            std::fprintf(stderr, "error: cannot write %s\n", out_path.c_str());
            rc = 1;
        }
        ice_string_free(trajectory);
    }
    return rc;
}

int run_sweep(const std::string& spec_path, const std::vector<std::uint64_t>& periods,
              const std::vector<std::uint64_t>& ice_sizes, std::uint64_t s_p,
              std::uint64_t l_max, const std::string& out_path) {
    std::string spec;
    if (!spec_path.empty()) {
        spec = read_file(spec_path);
    } else {
        nlohmann::json doc{{"t", periods}, {"s_ice", ice_sizes}, {"s_p", s_p}, {"l_max", l_max}};
        spec = doc.dump();
    }
    char* csv = nullptr;
    ice_status status = ice_sweep(spec.c_str(), &csv);
    if (status != ICE_OK) return fail("sweep", status);
    int rc = 0;
    if (out_path.empty()) {
        std::fputs(csv, stdout);
    } else if (!write_file(out_path, csv)) {
        std::fprintf(stderr, "error: cannot write %s\n", out_path.c_str());
        rc = 1;
    }
    ice_string_free(csv);
    return rc;
}

int run_count(const std::string& mode, std::uint64_t chars_per_token, const std::string& text) {
    std::uint64_t count = 0;
    ice_status status = ice_count_tokens(mode.c_str(), chars_per_token, text.c_str(), &count);
    if (status != ICE_OK) return fail("count tokens", status);
    std::printf("%llu\n", static_cast<unsigned long long>(count));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ICE: context-ratio control gateway and analysis tools"};
    app.require_subcommand(1);

    std::string config_path;
    auto* serve = app.add_subcommand("serve", "Run the gateway from a config file");
    serve->add_option("--config", config_path, "gateway config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);

    std::string behavior_path;
    std::string mock_host = "127.0.0.1";
    int mock_port = 0;
    auto* mock = app.add_subcommand("mock", "Run the deterministic mock model server");
    mock->add_option("--config", behavior_path, "mock behavior (JSON)")->check(CLI::ExistingFile);
    mock->add_option("--host", mock_host, "listen host");
    mock->add_option("--port", mock_port, "listen port (0 picks a free one)");

    double target_q = 0.0;
    std::uint64_t plan_s_ice = 0;
    auto* plan = app.add_subcommand("plan", "Solve the injection period for a target ratio");
    plan->add_option("--q", target_q, "target asymptotic control ratio")->required();
    plan->add_option("--s-ice", plan_s_ice, "control block size in tokens")->required();

    std::string transcript_path;
    std::string replay_out;
    auto* replay = app.add_subcommand("replay", "Recompute ratios from a saved transcript");
    replay->add_option("--transcript", transcript_path, "transcript (.jsonl)")
        ->required()
        ->check(CLI::ExistingFile);
    replay->add_option("--out", replay_out, "write the trajectory CSV here");

    std::string spec_path;
    std::vector<std::uint64_t> sweep_t;
    std::vector<std::uint64_t> sweep_s_ice;
    std::uint64_t sweep_s_p = 0;
    std::uint64_t sweep_l_max = 0;
    std::string sweep_out;
    auto* sweep = app.add_subcommand("sweep", "Evaluate a grid of (t, s_ice) parameters");
    sweep->add_option("--spec", spec_path, "sweep spec file (JSON)")->check(CLI::ExistingFile);
    sweep->add_option("--t", sweep_t, "periods to evaluate");
    sweep->add_option("--s-ice", sweep_s_ice, "control block sizes to evaluate");
    sweep->add_option("--s-p", sweep_s_p, "system prompt tokens for the baseline");
    sweep->add_option("--l-max", sweep_l_max, "context horizon in tokens");
    sweep->add_option("--out", sweep_out, "write the CSV here instead of stdout");

    std::string count_mode = "whitespace";
    std::uint64_t count_cpt = 0;
    std::string count_text;
    auto* count = app.add_subcommand("count", "Count tokens in a string");
    count->add_option("--mode", count_mode, "whitespace | byte | fixed_chars");
    count->add_option("--chars-per-token", count_cpt, "fixed_chars divisor");
    count->add_option("text", count_text, "text to count")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*serve) return run_serve(config_path);
        if (*mock) return run_mock(behavior_path, mock_host, mock_port);
        if (*plan) return run_plan(target_q, plan_s_ice);
        if (*replay) return run_replay(transcript_path, replay_out);
        if (*sweep)
            return run_sweep(spec_path, sweep_t, sweep_s_ice, sweep_s_p, sweep_l_max, sweep_out);
        if (*count) return run_count(count_mode, count_cpt, count_text);
    } catch (const CLI::ValidationError& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 1;
    }
    return 0;
}
