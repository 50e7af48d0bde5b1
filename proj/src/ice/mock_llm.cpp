#include "ice/mock_llm.hpp"

#include <algorithm>
#include <random>

#include "ice/control_store.hpp"
#include "ice/tokenizer.hpp"
#include "ice/wire.hpp"

namespace ice {

namespace {

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

}  // namespace

const char* MockBehavior::mode_name(Mode mode) {
    switch (mode) {
        case Mode::EchoDeterministic: return "echo-deterministic";
        case Mode::Scripted: return "scripted";
        case Mode::ComplianceProbe: return "compliance-probe";
    }
    return "?";
}

MockBehavior MockBehavior::from_json(const nlohmann::json& obj) {
    if (!obj.is_object()) {
        raise(ErrorCode::ParseError, "mock behavior must be a JSON object");
    }
    MockBehavior b;
    std::string mode = obj.value("mode", "echo-deterministic");
    if (mode == "echo-deterministic") {
        b.mode = Mode::EchoDeterministic;
    } else if (mode == "scripted") {
        b.mode = Mode::Scripted;
        b.reasoning_channel = true;  // scripted fixtures play back as reasoning
    } else if (mode == "compliance-probe") {
        b.mode = Mode::ComplianceProbe;
    } else {
        raise(ErrorCode::ParseError, "unknown mock mode '" + mode + "'");
    }
    b.seed = obj.value("seed", std::uint64_t{0});
    b.emit_chunk_tokens = obj.value("emit_chunk_tokens", std::uint64_t{8});
    b.total_tokens_to_emit = obj.value("total_tokens_to_emit", std::uint64_t{64});
    b.probe_window = obj.value("probe_window", std::uint64_t{256});
    b.fixture_text = obj.value("fixture_text", "");
    if (obj.contains("channel")) {
        std::string channel = obj["channel"].get<std::string>();
        if (channel == "reasoning") {
            b.reasoning_channel = true;
        } else if (channel == "content") {
            b.reasoning_channel = false;
        } else {
            raise(ErrorCode::ParseError, "mock channel must be 'reasoning' or 'content'");
        }
    }
    if (obj.contains("control_sentences")) {
        b.control_sentences = obj["control_sentences"].get<std::vector<std::string>>();
    }
    if (obj.contains("control_bank_path")) {
        ControlStore bank = ControlStore::load_file(obj["control_bank_path"].get<std::string>(),
                                                    TokenCounter::whitespace());
        for (const ControlSentence& s : bank.sentences()) {
            b.control_sentences.push_back(s.text);
        }
    }
    b.validate();
    return b;
}

nlohmann::json MockBehavior::to_json() const {
    nlohmann::json obj = {
        {"mode", mode_name(mode)},
        {"seed", seed},
        {"emit_chunk_tokens", emit_chunk_tokens},
        {"total_tokens_to_emit", total_tokens_to_emit},
        {"probe_window", probe_window},
        {"channel", reasoning_channel ? "reasoning" : "content"},
    };
    if (!fixture_text.empty()) obj["fixture_text"] = fixture_text;
    if (!control_sentences.empty()) obj["control_sentences"] = control_sentences;
    return obj;
}

void MockBehavior::validate() const {
    if (emit_chunk_tokens == 0) {
        raise(ErrorCode::PolicyInvalid, "mock emit_chunk_tokens must be >= 1");
    }
    switch (mode) {
        case Mode::EchoDeterministic:
        case Mode::ComplianceProbe:
            if (total_tokens_to_emit == 0 || emit_chunk_tokens > total_tokens_to_emit) {
                raise(ErrorCode::PolicyInvalid,
                      "mock needs 1 <= emit_chunk_tokens <= total_tokens_to_emit");
            }
            break;
        case Mode::Scripted:
            if (fixture_text.empty()) {
                raise(ErrorCode::PolicyInvalid, "scripted mock needs fixture_text");
            }
            break;
    }
    if (mode == Mode::ComplianceProbe && probe_window == 0) {
        raise(ErrorCode::PolicyInvalid, "compliance probe needs probe_window >= 1");
    }
}

std::string request_contents(const nlohmann::json& request) {
    if (!request.is_object() || !request.contains("messages") ||
        !request["messages"].is_array() || request["messages"].empty()) {
        raise(ErrorCode::MalformedRequest, "mock request needs a non-empty messages array");
    }
    std::string contents;
    for (const nlohmann::json& m : request["messages"]) {
        if (!m.is_object() || !m.contains("content") || !m["content"].is_string()) {
            raise(ErrorCode::MalformedRequest, "mock request message without string content");
        }
        if (!contents.empty()) contents += '\n';
        contents += m["content"].get<std::string>();
    }
    return contents;
}

MockLlm::MockLlm(MockBehavior behavior) : behavior_(std::move(behavior)) {
    behavior_.validate();
}

void MockLlm::generate(const nlohmann::json& request,
                       const std::function<bool(const UpstreamChunk&)>& on_chunk) const {
    std::string contents = request_contents(request);  // validates shape
    switch (behavior_.mode) {
        case MockBehavior::Mode::EchoDeterministic:
            generate_echo(request, on_chunk);
            return;
        case MockBehavior::Mode::Scripted:
            generate_scripted(contents, on_chunk);
            return;
        case MockBehavior::Mode::ComplianceProbe:
            generate_probe(contents, on_chunk);
            return;
    }
}

void MockLlm::generate_echo(const nlohmann::json& request,
                            const std::function<bool(const UpstreamChunk&)>& on_chunk) const {
    // Seeded by the full rendered request so identical requests yield
    // identical streams and any change yields a different one.
    std::string rendered;
    for (const nlohmann::json& m : request["messages"]) {
        rendered += m.value("role", "");
        rendered += ':';
        rendered += m.value("content", "");
        rendered += '\n';
    }
    std::mt19937_64 rng(behavior_.seed ^ fnv1a(rendered));
    UpstreamChunk::Kind kind = behavior_.reasoning_channel ? UpstreamChunk::Kind::Reasoning
                                                           : UpstreamChunk::Kind::Content;
    std::string chunk;
    std::uint64_t in_chunk = 0;
    for (std::uint64_t i = 0; i < behavior_.total_tokens_to_emit; ++i) {
        if (i > 0) chunk += ' ';
        chunk += 'w';
        chunk += std::to_string(rng() % 10000);
        if (++in_chunk == behavior_.emit_chunk_tokens) {
            if (!on_chunk({kind, chunk})) return;
            chunk.clear();
            in_chunk = 0;
        }
    }
    if (!chunk.empty()) on_chunk({kind, chunk});
}

void MockLlm::generate_scripted(const std::string& contents,
                                const std::function<bool(const UpstreamChunk&)>& on_chunk) const {
    const std::string& fixture = behavior_.fixture_text;
    // Longest fixture prefix that already appears in the request decides the
    // resume point. Locate occurrences of a short anchor and extend each one;
    // fixtures should use distinctive text so only genuine replays match.
    std::size_t anchor_len = std::min<std::size_t>(fixture.size(), 24);
    std::string anchor = fixture.substr(0, anchor_len);
    std::size_t best = 0;
    for (std::size_t pos = contents.find(anchor); pos != std::string::npos;
         pos = contents.find(anchor, pos + 1)) {
        std::size_t k = anchor_len;
        while (pos + k < contents.size() && k < fixture.size() &&
               contents[pos + k] == fixture[k]) {
            ++k;
        }
        best = std::max(best, k);
        if (best == fixture.size()) break;
    }
    if (best == 0) {
        // The replayed part may be shorter than the anchor itself.
        for (std::size_t len = anchor_len > 0 ? anchor_len - 1 : 0; len > 0; --len) {
            if (contents.find(fixture.substr(0, len)) != std::string::npos) {
                best = len;
                break;
            }
        }
    }
    std::string_view rest(fixture);
    rest.remove_prefix(best);

    UpstreamChunk::Kind kind = behavior_.reasoning_channel ? UpstreamChunk::Kind::Reasoning
                                                           : UpstreamChunk::Kind::Content;
    // Emit whole tokens per chunk while preserving the byte stream exactly:
    // each chunk ends right after a token, separators stay with the next one.
    TokenCounter counter = TokenCounter::whitespace();
    while (!rest.empty()) {
        std::uint64_t available = counter.count(rest);
        if (available == 0) {
            // Trailing separators only; flush them with the final chunk.
            if (!on_chunk({kind, std::string(rest)})) return;
            break;
        }
        std::uint64_t take = std::min<std::uint64_t>(behavior_.emit_chunk_tokens, available);
        std::size_t at = counter.boundary_offset(rest, take);
        if (take == available) at = rest.size();  // carry trailing whitespace out too
        if (!on_chunk({kind, std::string(rest.substr(0, at))})) return;
        rest.remove_prefix(at);
    }
}

void MockLlm::generate_probe(const std::string& contents,
                             const std::function<bool(const UpstreamChunk&)>& on_chunk) const {
    // The probe's context: everything it received plus everything it already
    // said. Before each token it checks whether any control sentence still
    // lies inside the trailing probe_window tokens.
    std::string context = contents;
    std::vector<std::size_t> token_starts;
    {
        bool in_word = false;
        for (std::size_t i = 0; i < context.size(); ++i) {
            if (is_token_space(context[i])) {
                in_word = false;
            } else if (!in_word) {
                in_word = true;
                token_starts.push_back(i);
            }
        }
    }
    auto window_has_control = [&]() {
        std::size_t from = 0;
        if (token_starts.size() > behavior_.probe_window) {
            from = token_starts[token_starts.size() - behavior_.probe_window];
        }
        std::string_view window(context.data() + from, context.size() - from);
        for (const std::string& sentence : behavior_.control_sentences) {
            if (!sentence.empty() && window.find(sentence) != std::string_view::npos) {
                return true;
            }
        }
        return false;
    };

    UpstreamChunk::Kind kind = behavior_.reasoning_channel ? UpstreamChunk::Kind::Reasoning
                                                           : UpstreamChunk::Kind::Content;
    std::string chunk;
    std::uint64_t in_chunk = 0;
    for (std::uint64_t i = 0; i < behavior_.total_tokens_to_emit; ++i) {
        const char* word = window_has_control() ? "MARKER" : "DRIFT";
        if (!chunk.empty() || i > 0) chunk += ' ';
        // Own output joins the context the same way the next check sees it.
        context += ' ';
        token_starts.push_back(context.size());
        context += word;
        chunk += word;
        if (++in_chunk == behavior_.emit_chunk_tokens) {
            if (!on_chunk({kind, chunk})) return;
            chunk.clear();
            in_chunk = 0;
        }
    }
    if (!chunk.empty()) on_chunk({kind, chunk});
}

}  // namespace ice
