#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ice/control_store.hpp"
#include "ice/error.hpp"
#include "ice/transcript.hpp"

namespace ice {

// Which channels periodic injection may write into.
struct ScopeSet {
    bool conversation = false;
    bool chain_of_thought = false;

    bool any() const { return conversation || chain_of_thought; }
};

// Operator policy for periodic control-text injection: one control block of
// roughly nominal_ice_tokens every period_tokens total context tokens, which
// pins the asymptotic control ratio at nominal_ice_tokens / period_tokens.
struct IcePolicy {
    std::uint64_t period_tokens = 0;       // config key policy.t
    std::uint64_t nominal_ice_tokens = 0;  // config key policy.s_ice
    std::optional<double> target_ratio;    // config key policy.target_q
    ScopeSet scope;
    Visibility visibility = Visibility::Hidden;
    SelectionStrategy selection;

    // Throws PolicyInvalid unless period > nominal s_ice >= 1 and, when a
    // target ratio is set, nominal/period still clears it.
    void validate() const;
};

// Per-session injection bookkeeping. The trigger counts *total* context
// tokens (control text included), so the n-th injection lands at the first
// opportunity at or after n * period tokens.
class InjectionPlan {
public:
    explicit InjectionPlan(std::uint64_t period_tokens);

    std::uint64_t period_tokens() const { return period_tokens_; }
    std::uint64_t next_trigger_at() const { return next_trigger_at_; }
    std::uint64_t injections_so_far() const { return injections_so_far_; }
    std::uint64_t ice_tokens_so_far() const { return ice_tokens_so_far_; }

    // True when the context has reached the next trigger (ties inject).
    bool should_inject(std::uint64_t total_tokens_now) const {
        return total_tokens_now >= next_trigger_at_;
    }

    // Advances the trigger by one period and records the actual token length
    // of the control text that landed.
    void record_injection(std::uint64_t actual_ice_tokens);

private:
    std::uint64_t period_tokens_;
    std::uint64_t next_trigger_at_;
    std::uint64_t injections_so_far_ = 0;
    std::uint64_t ice_tokens_so_far_ = 0;
};

// Expected control ratio of a context of l tokens: s_p / l + s_ice / t.
double predicted_ratio(std::uint64_t system_prompt_tokens, std::uint64_t ice_tokens,
                       std::uint64_t period_tokens, std::uint64_t total_tokens);

// Limit ratio of periodic injection alone: s_ice / t.
double asymptotic_q(std::uint64_t ice_tokens, std::uint64_t period_tokens);

// Largest period t with s_ice / t >= target ratio, i.e. floor(s_ice / q)
// adjusted for floating-point edges. Throws Infeasible when no period larger
// than the control block itself qualifies.
std::uint64_t solve_period(double target_ratio, std::uint64_t ice_tokens);

// Worst-case measured ratio at l >= t tokens: s_ice / t - s_ice / l.
// Throws BoundUndefined for l < t (no injection can have landed yet).
double guaranteed_lower_bound(std::uint64_t ice_tokens, std::uint64_t period_tokens,
                              std::uint64_t total_tokens);

// Session-level ratio summary, served live by the gateway and recomputed
// offline by replay. Field names match the wire format.
struct RatioReport {
    double measured_ratio = 0.0;
    double asymptotic_q = 0.0;
    std::optional<double> lower_bound;  // absent while l < t
    double overhead = 0.0;              // injected tokens / total tokens
    std::uint64_t total_tokens = 0;
    std::uint64_t ice_injections = 0;
};

// Builds the report from raw counters; live and replay paths share this so
// their floating-point results agree bit for bit.
RatioReport make_ratio_report(std::uint64_t total_tokens, std::uint64_t control_tokens,
                              std::uint64_t injected_tokens, std::uint64_t injection_count,
                              std::optional<std::uint64_t> min_ice_tokens,
                              std::uint64_t period_tokens, std::uint64_t nominal_ice_tokens);

}  // namespace ice
