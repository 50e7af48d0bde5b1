#include "ice/metrics.hpp"

#include <charconv>

#include "ice/gateway.hpp"

namespace ice {
namespace {

std::vector<std::uint64_t> parse_u64_list(const nlohmann::json& obj, const char* key) {
    std::vector<std::uint64_t> out;
    if (!obj.contains(key)) return out;
    const auto& arr = obj.at(key);
    if (!arr.is_array())
        raise(ErrorCode::ParseError, std::string(key) + " must be an array of integers");
    for (const auto& item : arr) {
        // Accept any integer representation as long as the value is >= 0.
        bool ok = item.is_number_unsigned() ||
                  (item.is_number_integer() && item.get<std::int64_t>() >= 0);
        if (!ok)
            raise(ErrorCode::ParseError, std::string(key) + " entries must be non-negative integers");
        out.push_back(item.get<std::uint64_t>());
    }
    return out;
}

}  // namespace

SweepSpec SweepSpec::from_json(const nlohmann::json& obj) {
    if (!obj.is_object()) raise(ErrorCode::ParseError, "sweep spec must be a JSON object");
    SweepSpec spec;
    spec.periods = parse_u64_list(obj, "t");
    spec.ice_sizes = parse_u64_list(obj, "s_ice");
    if (obj.contains("s_p")) spec.prompt_tokens = obj.at("s_p").get<std::uint64_t>();
    if (obj.contains("l_max")) spec.horizon_tokens = obj.at("l_max").get<std::uint64_t>();
    if (spec.periods.empty() || spec.ice_sizes.empty())
        raise(ErrorCode::EmptySpec, "sweep spec needs at least one t and one s_ice value");
    if (spec.horizon_tokens == 0)
        raise(ErrorCode::EmptySpec, "sweep spec needs a positive l_max horizon");
    for (auto t : spec.periods)
        if (t == 0) raise(ErrorCode::InvalidArgument, "period t must be positive");
    // s_ice = 0 stays legal here: it is the no-injection baseline row.
    return spec;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    std::vector<SweepRow> rows;
    rows.reserve(spec.periods.size() * spec.ice_sizes.size());
    const std::uint64_t l = spec.horizon_tokens;
    for (auto t : spec.periods) {
        for (auto s : spec.ice_sizes) {
            SweepRow row;
            row.period_tokens = t;
            row.ice_tokens = s;
            row.feasible = s < t;
            row.asymptotic_q = asymptotic_q(s, t);
            std::uint64_t injections = l / t;  // triggers at t, 2t, ... within l
            row.overhead_at_horizon =
                static_cast<double>(injections * s) / static_cast<double>(l);
            if (l >= t) row.lower_bound_at_horizon = guaranteed_lower_bound(s, t, l);
            row.baseline_prompt_ratio =
                static_cast<double>(spec.prompt_tokens) / static_cast<double>(l);
            rows.push_back(row);
        }
    }
    return rows;
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::string out =
        "t,s_ice,feasible,asymptotic_q,overhead_at_l_max,lower_bound_at_l_max,"
        "baseline_prompt_ratio\n";
    for (const auto& row : rows) {
        out += std::to_string(row.period_tokens);
        out += ',';
        out += std::to_string(row.ice_tokens);
        out += ',';
        out += row.feasible ? "true" : "false";
        out += ',';
        out += format_double(row.asymptotic_q);
        out += ',';
        out += format_double(row.overhead_at_horizon);
        out += ',';
        if (row.lower_bound_at_horizon) out += format_double(*row.lower_bound_at_horizon);
        out += ',';
        out += format_double(row.baseline_prompt_ratio);
        out += '\n';
    }
    return out;
}

ReplayResult replay_transcript(std::string_view jsonl) {
    TranscriptFile file = parse_transcript_jsonl(jsonl);
    if (file.meta.is_null())
        raise(ErrorCode::ParseError,
              "transcript has no meta line; tokenizer and policy are unknown");

    ReplayResult result;
    try {
        result.session_id = file.meta.value("session_id", std::string{});
        const auto& tok = file.meta.at("tokenizer");
        TokenCounter counter = TokenCounter::from_config(
            tok.at("mode").get<std::string>(), tok.value("chars_per_token", std::uint64_t{0}));
        const auto& policy = file.meta.at("policy");
        result.period_tokens = policy.at("t").get<std::uint64_t>();
        result.nominal_ice_tokens = policy.at("s_ice").get<std::uint64_t>();

        Transcript transcript(counter, result.session_id);
        std::size_t line = 2;  // records start after the meta line
        for (const auto& record : file.records) {
            const Segment& seg = transcript.append(record.kind, record.text);
            if (seg.token_count != record.stored_token_count) {
                result.warnings.push_back(
                    "line " + std::to_string(line) + ": stored token_count " +
                    std::to_string(record.stored_token_count) + " != recomputed " +
                    std::to_string(seg.token_count));
            }
            if (transcript.total_tokens() > 0) {
                RatioReport at = make_ratio_report(
                    transcript.total_tokens(), transcript.control_tokens(),
                    transcript.ice_tokens(), transcript.ice_segment_count(),
                    transcript.min_ice_tokens(), result.period_tokens,
                    result.nominal_ice_tokens);
                TrajectoryPoint point;
                point.total_tokens = at.total_tokens;
                point.measured_ratio = at.measured_ratio;
                point.predicted_ratio =
                    predicted_ratio(transcript.system_prompt_tokens(),
                                    result.nominal_ice_tokens, result.period_tokens,
                                    transcript.total_tokens());
                point.lower_bound = at.lower_bound;
                result.trajectory.push_back(point);
            }
            ++line;
        }
        if (transcript.total_tokens() == 0)
            raise(ErrorCode::EmptyTranscript, "transcript contains no tokens");
        result.report = make_ratio_report(
            transcript.total_tokens(), transcript.control_tokens(), transcript.ice_tokens(),
            transcript.ice_segment_count(), transcript.min_ice_tokens(),
            result.period_tokens, result.nominal_ice_tokens);
    } catch (const nlohmann::json::exception& err) {
        raise(ErrorCode::ParseError, std::string("bad transcript meta: ") + err.what());
    }
    return result;
}

std::string trajectory_to_csv(const ReplayResult& result) {
    std::string out = "l,measured_ratio,predicted_ratio,lower_bound\n";
    for (const auto& point : result.trajectory) {
        out += std::to_string(point.total_tokens);
        out += ',';
        out += format_double(point.measured_ratio);
        out += ',';
        out += format_double(point.predicted_ratio);
        out += ',';
        if (point.lower_bound) out += format_double(*point.lower_bound);
        out += '\n';
    }
    return out;
}

nlohmann::json replay_to_json(const ReplayResult& result) {
    return nlohmann::json{
        {"session_id", result.session_id},
        {"policy", {{"t", result.period_tokens}, {"s_ice", result.nominal_ice_tokens}}},
        {"report", ratio_report_to_json(result.report)},
        {"points", result.trajectory.size()},
        {"warnings", result.warnings},
    };
}

}  // namespace ice
