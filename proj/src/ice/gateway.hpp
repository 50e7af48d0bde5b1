#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "ice/config.hpp"
#include "ice/control_store.hpp"
#include "ice/scheduler.hpp"
#include "ice/transcript.hpp"
#include "ice/upstream.hpp"
#include "ice/wire.hpp"

namespace ice {

// Session header used on requests and echoed on responses.
inline constexpr const char* kSessionHeader = "X-ICE-Session";

// Lexical selection looks at this much trailing payload.
inline constexpr std::uint64_t kSelectionTailTokens = 512;

// Mid-stream splice bookkeeping for one session.
struct SpliceStats {
    std::vector<std::uint64_t> splice_points;  // absolute total-token triggers
    std::uint64_t continuation_count = 0;
    std::uint64_t emitted_payload_tokens = 0;
};

struct Session {
    Session(std::string id_, TokenCounter counter, std::uint64_t period_tokens)
        : id(std::move(id_)), transcript(counter, id), plan(period_tokens) {}

    const std::string id;
    Transcript transcript;
    InjectionPlan plan;
    SpliceStats splices;
    // Rejects concurrent requests on the same session (conflict error).
    std::atomic<bool> busy{false};
    // Guards state mutation against concurrent admin reads; the busy flag
    // already serializes chat turns themselves.
    mutable std::mutex state_mu;
};

// Holds a session's busy flag for the duration of one request.
class SessionLock {
public:
    explicit SessionLock(std::shared_ptr<Session> session);
    ~SessionLock();
    SessionLock(const SessionLock&) = delete;
    SessionLock& operator=(const SessionLock&) = delete;

    Session& operator*() const { return *session_; }
    Session* operator->() const { return session_.get(); }

private:
    std::shared_ptr<Session> session_;
};

// One event of the client-facing stream.
struct ClientEvent {
    enum class Kind { Reasoning, Content, Ice, Error };
    Kind kind;
    std::string text;
};

// Summary of one handled chat turn.
struct ChatOutcome {
    std::string session_id;
    std::string content;    // payload delivered on the content channel
    std::string reasoning;  // payload delivered on the reasoning channel
    std::uint64_t prompt_tokens = 0;
    std::uint64_t completion_tokens = 0;
    std::uint64_t splices_this_turn = 0;
    bool had_error = false;
    ErrorCode error_code = ErrorCode::None;
    std::string error_message;
};

// Delivers stream events to the client; return false when the client is
// gone. A null function means "collect only" (non-streaming requests).
using EventSink = std::function<bool(const ClientEvent&)>;

// The proxy core: session state, policy enforcement, and the halt/insert/
// resume interception loop. Transport-agnostic; the HTTP layer is a thin
// wrapper and tests can drive it in-process.
class GatewayCore {
public:
    GatewayCore(GatewaySettings settings, std::unique_ptr<UpstreamClient> upstream);

    // Finds or creates the session for a request header value (empty means
    // "new session with a generated id").
    std::shared_ptr<Session> resolve_session(const std::string& header_value);

    // Full turn: append request messages, fire due conversation-scope
    // injections, call upstream with chain-of-thought interception, record
    // the response. The caller must hold the session lock.
    ChatOutcome chat_on_session(Session& session, const wire::ChatRequest& request,
                                const EventSink& sink);

    // Convenience wrapper used by in-process callers.
    ChatOutcome handle_chat(const nlohmann::json& body, const std::string& session_header,
                            const EventSink& sink);

    RatioReport ratio_report(const std::string& session_id) const;
    std::string transcript_jsonl(const std::string& session_id) const;

    // Re-reads the control bank from disk; returns the new sentence count.
    std::size_t reload_store();

    const GatewaySettings& settings() const { return settings_; }
    std::shared_ptr<Session> find_session(const std::string& session_id) const;

private:
    friend class GenerationEngine;

    void fire_due_injections(Session& session);
    nlohmann::json build_meta(const Session& session) const;
    void persist(Session& session) const;
    std::string generate_session_id();

    GatewaySettings settings_;
    std::unique_ptr<UpstreamClient> upstream_;
    ControlStoreHandle store_;

    mutable std::mutex sessions_mu_;
    std::unordered_map<std::string, std::shared_ptr<Session>> sessions_;
    std::atomic<std::uint64_t> session_counter_{0};
};

nlohmann::json ratio_report_to_json(const RatioReport& report);

}  // namespace ice
