#include "ice/scheduler.hpp"

#include <cmath>

namespace ice {

void IcePolicy::validate() const {
    if (nominal_ice_tokens == 0) {
        raise(ErrorCode::PolicyInvalid, "policy needs nominal s_ice >= 1 token");
    }
    if (period_tokens <= nominal_ice_tokens) {
        raise(ErrorCode::PolicyInvalid,
              "period t (" + std::to_string(period_tokens) + ") must exceed s_ice (" +
                  std::to_string(nominal_ice_tokens) + ")");
    }
    if (target_ratio) {
        if (*target_ratio <= 0.0 || *target_ratio >= 1.0) {
            raise(ErrorCode::PolicyInvalid, "target_q must lie strictly between 0 and 1");
        }
        if (asymptotic_q(nominal_ice_tokens, period_tokens) < *target_ratio) {
            raise(ErrorCode::PolicyInvalid,
                  "period t = " + std::to_string(period_tokens) +
                      " cannot sustain the configured target_q");
        }
    }
}

InjectionPlan::InjectionPlan(std::uint64_t period_tokens)
    : period_tokens_(period_tokens), next_trigger_at_(period_tokens) {
    if (period_tokens == 0) {
        raise(ErrorCode::PolicyInvalid, "injection period must be >= 1 token");
    }
}

void InjectionPlan::record_injection(std::uint64_t actual_ice_tokens) {
    ++injections_so_far_;
    ice_tokens_so_far_ += actual_ice_tokens;
    next_trigger_at_ += period_tokens_;
}

double predicted_ratio(std::uint64_t system_prompt_tokens, std::uint64_t ice_tokens,
                       std::uint64_t period_tokens, std::uint64_t total_tokens) {
    if (total_tokens == 0 || period_tokens == 0) {
        raise(ErrorCode::InvalidArgument, "predicted_ratio needs l >= 1 and t >= 1");
    }
    return static_cast<double>(system_prompt_tokens) / static_cast<double>(total_tokens) +
           static_cast<double>(ice_tokens) / static_cast<double>(period_tokens);
}

double asymptotic_q(std::uint64_t ice_tokens, std::uint64_t period_tokens) {
    if (period_tokens == 0) {
        raise(ErrorCode::InvalidArgument, "asymptotic_q needs t >= 1");
    }
    return static_cast<double>(ice_tokens) / static_cast<double>(period_tokens);
}

std::uint64_t solve_period(double target_ratio, std::uint64_t ice_tokens) {
    if (!(target_ratio > 0.0) || !(target_ratio < 1.0)) {
        raise(ErrorCode::InvalidArgument, "target ratio must lie strictly between 0 and 1");
    }
    if (ice_tokens == 0) {
        raise(ErrorCode::InvalidArgument, "solve_period needs s_ice >= 1");
    }
    // floor(s_ice / q), then nudge so the result is exactly the largest t
    // whose s_ice / t still clears the target despite rounding.
    auto clears = [&](std::uint64_t t) {
        return asymptotic_q(ice_tokens, t) >= target_ratio;
    };
    double raw = std::floor(static_cast<double>(ice_tokens) / target_ratio);
    std::uint64_t t = raw < 1.0 ? 1 : static_cast<std::uint64_t>(raw);
    while (t > 1 && !clears(t)) --t;
    while (clears(t + 1)) ++t;
    if (t <= ice_tokens) {
        raise(ErrorCode::Infeasible,
              "no integer period larger than s_ice = " + std::to_string(ice_tokens) +
                  " can sustain a ratio of " + std::to_string(target_ratio));
    }
    return t;
}

double guaranteed_lower_bound(std::uint64_t ice_tokens, std::uint64_t period_tokens,
                              std::uint64_t total_tokens) {
    if (period_tokens == 0) {
        raise(ErrorCode::InvalidArgument, "guaranteed_lower_bound needs t >= 1");
    }
    if (total_tokens < period_tokens) {
        raise(ErrorCode::BoundUndefined,
              "lower bound is undefined before the context reaches one period");
    }
    return static_cast<double>(ice_tokens) / static_cast<double>(period_tokens) -
           static_cast<double>(ice_tokens) / static_cast<double>(total_tokens);
}

RatioReport make_ratio_report(std::uint64_t total_tokens, std::uint64_t control_tokens,
                              std::uint64_t injected_tokens, std::uint64_t injection_count,
                              std::optional<std::uint64_t> min_ice_tokens,
                              std::uint64_t period_tokens, std::uint64_t nominal_ice_tokens) {
    if (total_tokens == 0) {
        raise(ErrorCode::EmptyTranscript, "cannot report on an empty transcript");
    }
    RatioReport report;
    report.total_tokens = total_tokens;
    report.ice_injections = injection_count;
    report.measured_ratio =
        static_cast<double>(control_tokens) / static_cast<double>(total_tokens);
    report.overhead = static_cast<double>(injected_tokens) / static_cast<double>(total_tokens);
    report.asymptotic_q = asymptotic_q(nominal_ice_tokens, period_tokens);
    if (total_tokens >= period_tokens) {
        // Conservative bound: when control sentences vary in length, assume
        // every injection was as short as the shortest one actually seen.
        std::uint64_t s = min_ice_tokens.value_or(nominal_ice_tokens);
        report.lower_bound = guaranteed_lower_bound(s, period_tokens, total_tokens);
    }
    return report;
}

}  // namespace ice
