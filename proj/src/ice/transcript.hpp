#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ice/error.hpp"
#include "ice/tokenizer.hpp"

namespace ice {

enum class SegmentKind {
    SystemPrompt,
    User,
    Assistant,
    Reasoning,
    IceControl,
};

const char* segment_kind_name(SegmentKind kind);
SegmentKind segment_kind_from_name(std::string_view name);  // throws ParseError

// Whether injected control text is surfaced to the client or kept server-side.
enum class Visibility { Hidden, Visible };

const char* visibility_name(Visibility v);
Visibility visibility_from_name(std::string_view name);  // throws ParseError

struct Segment {
    SegmentKind kind;
    std::string text;
    std::uint64_t token_count = 0;
    std::uint64_t sequence_index = 0;
    bool injected_by_policy = false;
};

// One wire-protocol chat message (role is "system" | "user" | "assistant").
struct ChatMessage {
    std::string role;
    std::string content;
};

// Ordered log of everything that entered a session's context, with running
// token accounting. total/control/payload counters are maintained on append
// and always equal the recount over all segments.
class Transcript {
public:
    explicit Transcript(TokenCounter counter, std::string session_id = {});

    // Appends a segment; token_count is always recomputed from text with the
    // active counter. A system prompt is only legal as the first segment.
    const Segment& append(SegmentKind kind, std::string text);

    const std::vector<Segment>& segments() const { return segments_; }
    const TokenCounter& counter() const { return counter_; }
    const std::string& session_id() const { return session_id_; }

    std::uint64_t total_tokens() const { return total_tokens_; }
    std::uint64_t control_tokens() const { return control_tokens_; }
    std::uint64_t payload_tokens() const { return total_tokens_ - control_tokens_; }
    std::uint64_t system_prompt_tokens() const { return system_prompt_tokens_; }
    // Injected control tokens only (control minus the system prompt).
    std::uint64_t ice_tokens() const { return control_tokens_ - system_prompt_tokens_; }
    std::uint64_t ice_segment_count() const { return ice_segment_count_; }
    // Shortest injected control segment seen so far, if any.
    std::optional<std::uint64_t> min_ice_tokens() const { return min_ice_tokens_; }

    // control_tokens / total_tokens. Throws EmptyTranscript when no tokens
    // have been recorded yet.
    double current_ratio() const;

    // Serializes segments to wire messages, every segment exactly once and in
    // order, with one exception: a run of reasoning segments interleaved only
    // with control segments (a single model generation that was spliced)
    // renders as one merged assistant message followed by the run's control
    // messages. Control segments always carry role "system".
    std::vector<ChatMessage> render_for_upstream() const;

    // The client-facing view: hidden visibility filters control segments.
    std::vector<Segment> client_view(Visibility visibility) const;

    // Trailing payload text (user/assistant/reasoning only), capped at
    // max_tokens counted with the active counter. Used for lexical selection.
    std::string payload_tail(std::uint64_t max_tokens) const;

private:
    TokenCounter counter_;
    std::string session_id_;
    std::vector<Segment> segments_;
    std::uint64_t total_tokens_ = 0;
    std::uint64_t control_tokens_ = 0;
    std::uint64_t system_prompt_tokens_ = 0;
    std::uint64_t ice_segment_count_ = 0;
    std::optional<std::uint64_t> min_ice_tokens_;
};

// --- line-delimited JSON persistence -------------------------------------

// One parsed line of a persisted transcript.
struct TranscriptRecord {
    SegmentKind kind;
    std::string text;
    std::uint64_t stored_token_count = 0;
    std::uint64_t seq = 0;
};

struct TranscriptFile {
    nlohmann::json meta;  // null when the file carries no meta line
    std::vector<TranscriptRecord> records;
};

// Serializes one segment per line with fields kind/text/token_count/seq.
// A non-null meta object is written as an extra first line and lets offline
// tools recover the tokenizer and policy that produced the file.
std::string transcript_to_jsonl(const Transcript& transcript, const nlohmann::json& meta);

// Parses the line-delimited format. Malformed input raises ParseError with
// the offending line number; an empty file is also a ParseError.
TranscriptFile parse_transcript_jsonl(std::string_view content);

// Rebuilds a transcript by re-appending every record's text; accounting is
// recomputed with `counter` and matches the original when the counter matches.
Transcript transcript_from_records(const std::vector<TranscriptRecord>& records,
                                   TokenCounter counter, std::string session_id = {});

}  // namespace ice
