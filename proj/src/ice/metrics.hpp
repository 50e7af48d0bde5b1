#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ice/scheduler.hpp"
#include "ice/transcript.hpp"

namespace ice {

// --- parameter sweep -------------------------------------------------------

// Grid of injection parameters to evaluate at a fixed context horizon.
struct SweepSpec {
    std::vector<std::uint64_t> periods;    // candidate t values
    std::vector<std::uint64_t> ice_sizes;  // candidate s_ice values
    std::uint64_t prompt_tokens = 0;       // s_p, for the no-injection baseline
    std::uint64_t horizon_tokens = 0;      // l_max

    // Keys: t (array), s_ice (array), s_p, l_max. Throws EmptySpec when the
    // grid is empty or the horizon is zero; InvalidArgument on zero entries.
    static SweepSpec from_json(const nlohmann::json& obj);
};

struct SweepRow {
    std::uint64_t period_tokens = 0;
    std::uint64_t ice_tokens = 0;
    bool feasible = false;  // control block must be shorter than the period
    double asymptotic_q = 0.0;
    double overhead_at_horizon = 0.0;  // injected tokens / horizon
    std::optional<double> lower_bound_at_horizon;  // absent when horizon < t
    double baseline_prompt_ratio = 0.0;            // s_p / horizon, decays to zero
};

// One row per (t, s_ice) combination, in spec order. Infeasible combinations
// are reported (flagged), not skipped.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

std::string sweep_to_csv(const std::vector<SweepRow>& rows);

// --- offline replay ---------------------------------------------------------

// Ratio trajectory point after one transcript segment landed.
struct TrajectoryPoint {
    std::uint64_t total_tokens = 0;
    double measured_ratio = 0.0;
    double predicted_ratio = 0.0;
    std::optional<double> lower_bound;  // absent while total < t
};

struct ReplayResult {
    std::string session_id;
    std::uint64_t period_tokens = 0;
    std::uint64_t nominal_ice_tokens = 0;
    RatioReport report;
    std::vector<TrajectoryPoint> trajectory;
    std::vector<std::string> warnings;  // e.g. stored counts that no longer match
};

// Recomputes all accounting from the raw text of a persisted transcript; the
// meta line supplies the tokenizer and policy. Stored token counts are only
// cross-checked (mismatches become warnings, the recount wins).
ReplayResult replay_transcript(std::string_view jsonl);

std::string trajectory_to_csv(const ReplayResult& result);
nlohmann::json replay_to_json(const ReplayResult& result);

// Shortest decimal form that round-trips the double (used by the CSV writers).
std::string format_double(double value);

}  // namespace ice
