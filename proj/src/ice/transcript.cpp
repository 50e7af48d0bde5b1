#include "ice/transcript.hpp"

#include <sstream>

namespace ice {

const char* segment_kind_name(SegmentKind kind) {
    switch (kind) {
        case SegmentKind::SystemPrompt: return "system-prompt";
        case SegmentKind::User: return "user";
        case SegmentKind::Assistant: return "assistant";
        case SegmentKind::Reasoning: return "reasoning";
        case SegmentKind::IceControl: return "ice-control";
    }
    return "?";
}

SegmentKind segment_kind_from_name(std::string_view name) {
    if (name == "system-prompt") return SegmentKind::SystemPrompt;
    if (name == "user") return SegmentKind::User;
    if (name == "assistant") return SegmentKind::Assistant;
    if (name == "reasoning") return SegmentKind::Reasoning;
    if (name == "ice-control") return SegmentKind::IceControl;
    raise(ErrorCode::ParseError, "unknown segment kind '" + std::string(name) + "'");
}

const char* visibility_name(Visibility v) {
    return v == Visibility::Hidden ? "hidden" : "visible";
}

Visibility visibility_from_name(std::string_view name) {
    if (name == "hidden") return Visibility::Hidden;
    if (name == "visible") return Visibility::Visible;
    raise(ErrorCode::ParseError, "unknown visibility '" + std::string(name) + "'");
}

Transcript::Transcript(TokenCounter counter, std::string session_id)
    : counter_(counter), session_id_(std::move(session_id)) {}

const Segment& Transcript::append(SegmentKind kind, std::string text) {
    if (kind == SegmentKind::SystemPrompt && !segments_.empty()) {
        raise(ErrorCode::SystemPromptMisplaced,
              "system prompt must be the first segment of a transcript");
    }
    Segment seg;
    seg.kind = kind;
    seg.token_count = counter_.count(text);
    seg.text = std::move(text);
    seg.sequence_index = segments_.size();
    seg.injected_by_policy = (kind == SegmentKind::IceControl);

    total_tokens_ += seg.token_count;
    if (kind == SegmentKind::SystemPrompt) {
        control_tokens_ += seg.token_count;
        system_prompt_tokens_ += seg.token_count;
    } else if (kind == SegmentKind::IceControl) {
        control_tokens_ += seg.token_count;
        ++ice_segment_count_;
        if (!min_ice_tokens_ || seg.token_count < *min_ice_tokens_) {
            min_ice_tokens_ = seg.token_count;
        }
    }
    segments_.push_back(std::move(seg));
    return segments_.back();
}

double Transcript::current_ratio() const {
    if (total_tokens_ == 0) {
        raise(ErrorCode::EmptyTranscript, "transcript has no tokens to measure");
    }
    return static_cast<double>(control_tokens_) / static_cast<double>(total_tokens_);
}

std::vector<ChatMessage> Transcript::render_for_upstream() const {
    std::vector<ChatMessage> messages;
    std::size_t i = 0;
    while (i < segments_.size()) {
        const Segment& seg = segments_[i];
        if (seg.kind == SegmentKind::Reasoning) {
            // A spliced generation: merge its reasoning parts into one
            // assistant message, then emit the run's control messages.
            std::string reasoning;
            std::vector<const std::string*> controls;
            std::size_t j = i;
            while (j < segments_.size() && (segments_[j].kind == SegmentKind::Reasoning ||
                                            segments_[j].kind == SegmentKind::IceControl)) {
                if (segments_[j].kind == SegmentKind::Reasoning) {
                    reasoning += segments_[j].text;
                } else {
                    controls.push_back(&segments_[j].text);
                }
                ++j;
            }
            messages.push_back({"assistant", std::move(reasoning)});
            for (const std::string* text : controls) {
                messages.push_back({"system", *text});
            }
            i = j;
            continue;
        }
        switch (seg.kind) {
            case SegmentKind::SystemPrompt:
            case SegmentKind::IceControl:
                messages.push_back({"system", seg.text});
                break;
            case SegmentKind::User:
                messages.push_back({"user", seg.text});
                break;
            case SegmentKind::Assistant:
                messages.push_back({"assistant", seg.text});
                break;
            case SegmentKind::Reasoning:
                break;  // handled above
        }
        ++i;
    }
    return messages;
}

std::vector<Segment> Transcript::client_view(Visibility visibility) const {
    std::vector<Segment> view;
    view.reserve(segments_.size());
    for (const Segment& seg : segments_) {
        if (visibility == Visibility::Hidden && seg.kind == SegmentKind::IceControl) {
            continue;
        }
        view.push_back(seg);
    }
    return view;
}

std::string Transcript::payload_tail(std::uint64_t max_tokens) const {
    std::string joined;
    for (const Segment& seg : segments_) {
        if (seg.kind == SegmentKind::User || seg.kind == SegmentKind::Assistant ||
            seg.kind == SegmentKind::Reasoning) {
            if (!joined.empty()) joined += ' ';
            joined += seg.text;
        }
    }
    std::uint64_t total = counter_.count(joined);
    if (total <= max_tokens) return joined;
    return counter_.split_at_token(joined, total - max_tokens).second;
}

std::string transcript_to_jsonl(const Transcript& transcript, const nlohmann::json& meta) {
    std::string out;
    if (!meta.is_null()) {
        nlohmann::json line = meta;
        line["type"] = "meta";
        out += line.dump();
        out += '\n';
    }
    for (const Segment& seg : transcript.segments()) {
        nlohmann::json line = {
            {"kind", segment_kind_name(seg.kind)},
            {"text", seg.text},
            {"token_count", seg.token_count},
            {"seq", seg.sequence_index},
        };
        out += line.dump();
        out += '\n';
    }
    return out;
}

TranscriptFile parse_transcript_jsonl(std::string_view content) {
    TranscriptFile file;
    file.meta = nlohmann::json();
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool saw_line = false;
    while (pos <= content.size()) {
        std::size_t eol = content.find('\n', pos);
        std::string_view line = (eol == std::string_view::npos)
                                    ? content.substr(pos)
                                    : content.substr(pos, eol - pos);
        pos = (eol == std::string_view::npos) ? content.size() + 1 : eol + 1;
        ++line_no;
        if (line.empty()) continue;
        saw_line = true;

        nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) {
            raise(ErrorCode::ParseError,
                  "transcript line " + std::to_string(line_no) + ": not a JSON object");
        }
        if (obj.value("type", "") == "meta") {
            if (!file.records.empty() || !file.meta.is_null()) {
                raise(ErrorCode::ParseError,
                      "transcript line " + std::to_string(line_no) +
                          ": meta must be the single first line");
            }
            file.meta = obj;
            continue;
        }
        if (!obj.contains("kind") || !obj.contains("text")) {
            raise(ErrorCode::ParseError,
                  "transcript line " + std::to_string(line_no) + ": missing kind or text");
        }
        TranscriptRecord rec;
        try {
            rec.kind = segment_kind_from_name(obj["kind"].get<std::string>());
            rec.text = obj["text"].get<std::string>();
            rec.stored_token_count = obj.value("token_count", std::uint64_t{0});
            rec.seq = obj.value("seq", std::uint64_t{file.records.size()});
        } catch (const nlohmann::json::exception& e) {
            raise(ErrorCode::ParseError,
                  "transcript line " + std::to_string(line_no) + ": " + e.what());
        }
        file.records.push_back(std::move(rec));
    }
    if (!saw_line) {
        raise(ErrorCode::ParseError, "transcript file is empty");
    }
    return file;
}

Transcript transcript_from_records(const std::vector<TranscriptRecord>& records,
                                   TokenCounter counter, std::string session_id) {
    Transcript transcript(counter, std::move(session_id));
    for (const TranscriptRecord& rec : records) {
        transcript.append(rec.kind, rec.text);
    }
    return transcript;
}

}  // namespace ice
