#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ice/error.hpp"
#include "ice/upstream.hpp"

namespace ice {

// Deterministic test backend: every mode is a pure function of its
// configuration and the full request, so runs are reproducible bit for bit.
struct MockBehavior {
    enum class Mode {
        EchoDeterministic,  // seeded token stream derived from the request
        Scripted,           // replays a fixture, resuming across continuations
        ComplianceProbe,    // emits MARKER/DRIFT depending on control recency
    };

    Mode mode = Mode::EchoDeterministic;
    std::uint64_t seed = 0;
    std::uint64_t emit_chunk_tokens = 8;
    std::uint64_t total_tokens_to_emit = 64;
    std::uint64_t probe_window = 256;
    std::string fixture_text;                      // scripted
    bool reasoning_channel = false;                // emit reasoning deltas instead of content
    std::vector<std::string> control_sentences;    // compliance probe's bank

    static MockBehavior from_json(const nlohmann::json& obj);
    nlohmann::json to_json() const;
    static const char* mode_name(Mode mode);

    // Throws PolicyInvalid on nonsense parameter combinations.
    void validate() const;
};

// Generates one response stream per request. Stateless: continuation
// handling for scripted mode works purely off the request contents.
class MockLlm {
public:
    explicit MockLlm(MockBehavior behavior);

    // Streams chunks; stops early when on_chunk returns false. Throws
    // MalformedRequest when the request is not wire-shaped.
    void generate(const nlohmann::json& request,
                  const std::function<bool(const UpstreamChunk&)>& on_chunk) const;

    const MockBehavior& behavior() const { return behavior_; }

private:
    void generate_echo(const nlohmann::json& request,
                       const std::function<bool(const UpstreamChunk&)>& on_chunk) const;
    void generate_scripted(const std::string& contents,
                           const std::function<bool(const UpstreamChunk&)>& on_chunk) const;
    void generate_probe(const std::string& contents,
                        const std::function<bool(const UpstreamChunk&)>& on_chunk) const;

    MockBehavior behavior_;
};

// In-process upstream adapter: lets the gateway talk to the mock without
// sockets (unit tests and fuzz runs).
class MockUpstream final : public UpstreamClient {
public:
    explicit MockUpstream(MockBehavior behavior) : llm_(std::move(behavior)) {}

    void stream_chat(const nlohmann::json& request,
                     const std::function<bool(const UpstreamChunk&)>& on_chunk) override {
        llm_.generate(request, on_chunk);
    }

    const MockLlm& llm() const { return llm_; }

private:
    MockLlm llm_;
};

// Concatenated message contents of a chat request (newline separated); the
// "received context" from the mock's point of view.
std::string request_contents(const nlohmann::json& request);

}  // namespace ice
