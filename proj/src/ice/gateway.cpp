#include "ice/gateway.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "ice/log.hpp"

namespace ice {

SessionLock::SessionLock(std::shared_ptr<Session> session) : session_(std::move(session)) {
    bool expected = false;
    if (!session_->busy.compare_exchange_strong(expected, true)) {
        raise(ErrorCode::SessionBusy,
              "session '" + session_->id + "' already has a request in flight");
    }
}

SessionLock::~SessionLock() { session_->busy.store(false); }

GatewayCore::GatewayCore(GatewaySettings settings, std::unique_ptr<UpstreamClient> upstream)
    : settings_(std::move(settings)),
      upstream_(std::move(upstream)),
      store_(ControlStore::load_file(settings_.control_store_path, settings_.counter)) {
    settings_.policy.validate();
    auto snapshot = store_.snapshot();
    if (snapshot->empty()) {
        raise(ErrorCode::EmptyStore, "control store '" + settings_.control_store_path +
                                         "' has no sentences");
    }
    // Accounting uses nominal s_ice; flag sentences that stray far from it.
    std::uint64_t nominal = settings_.policy.nominal_ice_tokens;
    for (const ControlSentence& s : snapshot->sentences()) {
        std::uint64_t diff = s.token_count > nominal ? s.token_count - nominal
                                                     : nominal - s.token_count;
        if (diff * 10 > nominal) {
            log_warn("control sentence '" + s.id + "' is " + std::to_string(s.token_count) +
                     " tokens; nominal s_ice is " + std::to_string(nominal));
        }
    }
}

std::shared_ptr<Session> GatewayCore::resolve_session(const std::string& header_value) {
    std::lock_guard<std::mutex> lock(sessions_mu_);
    std::string id = header_value.empty() ? generate_session_id() : header_value;
    auto it = sessions_.find(id);
    if (it != sessions_.end()) return it->second;
    auto session =
        std::make_shared<Session>(id, settings_.counter, settings_.policy.period_tokens);
    sessions_.emplace(id, session);
    return session;
}

std::shared_ptr<Session> GatewayCore::find_session(const std::string& session_id) const {
    std::lock_guard<std::mutex> lock(sessions_mu_);
    auto it = sessions_.find(session_id);
    return it == sessions_.end() ? nullptr : it->second;
}

std::string GatewayCore::generate_session_id() {
    std::random_device rd;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "s-%06llu-%08x",
                  static_cast<unsigned long long>(session_counter_.fetch_add(1)), rd());
    return buf;
}

void GatewayCore::fire_due_injections(Session& session) {
    std::lock_guard<std::mutex> state(session.state_mu);
    auto snapshot = store_.snapshot();
    while (session.plan.should_inject(session.transcript.total_tokens())) {
        const ControlSentence& sentence =
            snapshot->select(settings_.policy.selection,
                             session.transcript.payload_tail(kSelectionTailTokens),
                             session.plan.injections_so_far());
        const Segment& seg = session.transcript.append(SegmentKind::IceControl, sentence.text);
        session.plan.record_injection(seg.token_count);
    }
}

// ---------------------------------------------------------------------------
// Generation engine: one model turn with halt/insert/resume interception.
// ---------------------------------------------------------------------------

class GenerationEngine {
public:
    GenerationEngine(GatewayCore& core, Session& session, const EventSink& sink,
                     ChatOutcome& outcome)
        : core_(core),
          session_(session),
          sink_(sink),
          outcome_(outcome),
          policy_(core.settings_.policy),
          counter_(session.transcript.counter()),
          buffer_count_(counter_) {}

    void run() {
        bool first_pass = true;
        std::uint64_t continuations = 0;
        for (;;) {
            spliced_this_stream_ = false;
            nlohmann::json request =
                first_pass ? wire::build_chat_request(session_.transcript.render_for_upstream(),
                                                      core_.settings_.upstream_model, true)
                           : continuation_request();
            try {
                core_.upstream_->stream_chat(
                    request, [this](const UpstreamChunk& chunk) { return on_chunk(chunk); });
            } catch (const IceError& e) {
                if (first_pass) throw;  // surfaces as UpstreamUnreachable
                fail_continuation(std::string("resume request failed: ") + e.what());
                return;
            }
            if (!spliced_this_stream_ || client_gone_) break;
            if (++continuations > core_.settings_.max_continuations_per_turn) {
                fail_continuation("continuation limit exceeded for this turn");
                return;
            }
            first_pass = false;
        }
        flush_buffer();
        if (policy_.scope.conversation) core_.fire_due_injections(session_);
    }

private:
    bool on_chunk(const UpstreamChunk& chunk) {
        SegmentKind kind = chunk.kind == UpstreamChunk::Kind::Reasoning
                               ? SegmentKind::Reasoning
                               : SegmentKind::Assistant;
        if (buffer_active_ && buffer_kind_ != kind) {
            // Channel switch is a segment boundary.
            flush_buffer();
            if (policy_.scope.conversation) core_.fire_due_injections(session_);
        }
        if (!buffer_active_) {
            buffer_active_ = true;
            buffer_kind_ = kind;
        }
        buffer_text_ += chunk.text;
        buffer_count_.append(chunk.text);

        if (policy_.scope.chain_of_thought && kind == SegmentKind::Reasoning) {
            std::uint64_t total_now =
                session_.transcript.total_tokens() + buffer_count_.tokens();
            if (session_.plan.should_inject(total_now)) {
                splice();
                return false;  // halt the upstream stream
            }
        }
        if (!deliver({kind == SegmentKind::Reasoning ? ClientEvent::Kind::Reasoning
                                                     : ClientEvent::Kind::Content,
                      chunk.text})) {
            client_gone_ = true;
            return false;
        }
        delivered_bytes_ = buffer_text_.size();
        return true;
    }

    // Cuts the stream at the exact trigger boundary: deliver and record the
    // prefix, insert control text, and leave the rest to the resumed stream.
    void splice() {
        std::uint64_t trigger = 0;
        std::string prefix;
        std::string control_text;
        {
            std::lock_guard<std::mutex> state(session_.state_mu);
            trigger = session_.plan.next_trigger_at();
            std::uint64_t before = session_.transcript.total_tokens();
            std::uint64_t room = trigger > before ? trigger - before : 0;
            room = std::min<std::uint64_t>(room, buffer_count_.tokens());
            prefix = counter_.split_at_token(buffer_text_, room).first;

            if (!prefix.empty()) {
                append_payload_locked(SegmentKind::Reasoning, prefix);
            }

            auto snapshot = core_.store_.snapshot();
            const ControlSentence& sentence =
                snapshot->select(policy_.selection,
                                 session_.transcript.payload_tail(kSelectionTailTokens),
                                 session_.plan.injections_so_far());
            const Segment& seg =
                session_.transcript.append(SegmentKind::IceControl, sentence.text);
            session_.plan.record_injection(seg.token_count);
            session_.splices.splice_points.push_back(trigger);
            session_.splices.continuation_count += 1;
            ++outcome_.splices_this_turn;
            control_text = sentence.text;
        }

        // Deliveries can block on the client socket, so they run unlocked.
        if (prefix.size() > delivered_bytes_) {
            if (!deliver({ClientEvent::Kind::Reasoning, prefix.substr(delivered_bytes_)})) {
                client_gone_ = true;
            }
        }
        if (policy_.visibility == Visibility::Visible && !client_gone_) {
            if (!deliver({ClientEvent::Kind::Ice, control_text})) client_gone_ = true;
        }

        reset_buffer();
        spliced_this_stream_ = true;
    }

    nlohmann::json continuation_request() {
        const auto& segments = session_.transcript.segments();
        if (segments.empty() || segments.back().kind != SegmentKind::IceControl) {
            raise(ErrorCode::Internal, "continuation without a trailing control segment");
        }
        std::vector<ChatMessage> messages = session_.transcript.render_for_upstream();
        // The resume directive rides on the final control message so the
        // request still ends with operator text.
        messages.back().content += "\n";
        messages.back().content += core_.settings_.continuation_instruction;
        return wire::build_chat_request(messages, core_.settings_.upstream_model, true);
    }

    void fail_continuation(const std::string& message) {
        flush_buffer();
        outcome_.had_error = true;
        outcome_.error_code = ErrorCode::ContinuationFailed;
        outcome_.error_message = message;
        deliver({ClientEvent::Kind::Error, message});
    }

    void flush_buffer() {
        if (!buffer_active_) return;
        if (!buffer_text_.empty()) {
            append_payload(buffer_kind_, buffer_text_);
        }
        reset_buffer();
    }

    void append_payload(SegmentKind kind, const std::string& text) {
        std::lock_guard<std::mutex> state(session_.state_mu);
        append_payload_locked(kind, text);
    }

    // Caller must hold session_.state_mu.
    void append_payload_locked(SegmentKind kind, const std::string& text) {
        const Segment& seg = session_.transcript.append(kind, text);
        session_.splices.emitted_payload_tokens += seg.token_count;
        outcome_.completion_tokens += seg.token_count;
    }

    void reset_buffer() {
        buffer_active_ = false;
        buffer_text_.clear();
        buffer_count_.reset();
        delivered_bytes_ = 0;
    }

    bool deliver(const ClientEvent& event) {
        if (event.kind == ClientEvent::Kind::Reasoning) outcome_.reasoning += event.text;
        if (event.kind == ClientEvent::Kind::Content) outcome_.content += event.text;
        if (!sink_) return true;
        return sink_(event);
    }

    GatewayCore& core_;
    Session& session_;
    const EventSink& sink_;
    ChatOutcome& outcome_;
    const IcePolicy& policy_;
    const TokenCounter& counter_;

    bool buffer_active_ = false;
    SegmentKind buffer_kind_ = SegmentKind::Reasoning;
    std::string buffer_text_;
    StreamTokenCount buffer_count_;
    std::size_t delivered_bytes_ = 0;

    bool spliced_this_stream_ = false;
    bool client_gone_ = false;
};

ChatOutcome GatewayCore::chat_on_session(Session& session, const wire::ChatRequest& request,
                                         const EventSink& sink) {
    ChatOutcome outcome;
    outcome.session_id = session.id;

    for (const ChatMessage& m : request.messages) {
        SegmentKind kind;
        if (m.role == "system") {
            kind = SegmentKind::SystemPrompt;
        } else if (m.role == "user") {
            kind = SegmentKind::User;
        } else {
            kind = SegmentKind::Assistant;
        }
        {
            std::lock_guard<std::mutex> state(session.state_mu);
            session.transcript.append(kind, m.content);
        }
        if (settings_.policy.scope.conversation) fire_due_injections(session);
    }
    // Due triggers always land before the model call, whatever the scope:
    // control text the model never saw would be bookkeeping fiction.
    if (settings_.policy.scope.any()) fire_due_injections(session);

    outcome.prompt_tokens = session.transcript.total_tokens();

    GenerationEngine engine(*this, session, sink, outcome);
    engine.run();

    persist(session);
    return outcome;
}

ChatOutcome GatewayCore::handle_chat(const nlohmann::json& body,
                                     const std::string& session_header, const EventSink& sink) {
    wire::ChatRequest request = wire::parse_chat_request(body);
    std::shared_ptr<Session> session = resolve_session(session_header);
    SessionLock lock(session);
    return chat_on_session(*session, request, sink);
}

RatioReport GatewayCore::ratio_report(const std::string& session_id) const {
    std::shared_ptr<Session> session = find_session(session_id);
    if (!session) {
        raise(ErrorCode::UnknownSession, "no session '" + session_id + "'");
    }
    std::lock_guard<std::mutex> state(session->state_mu);
    const Transcript& t = session->transcript;
    return make_ratio_report(t.total_tokens(), t.control_tokens(), t.ice_tokens(),
                             t.ice_segment_count(), t.min_ice_tokens(),
                             settings_.policy.period_tokens,
                             settings_.policy.nominal_ice_tokens);
}

nlohmann::json GatewayCore::build_meta(const Session& session) const {
    nlohmann::json scope = nlohmann::json::array();
    if (settings_.policy.scope.conversation) scope.push_back("conversation");
    if (settings_.policy.scope.chain_of_thought) scope.push_back("chain-of-thought");
    return {
        {"session_id", session.id},
        {"tokenizer",
         {{"mode", settings_.counter.mode_name()},
          {"chars_per_token", settings_.counter.chars_per_token()}}},
        {"policy",
         {{"t", settings_.policy.period_tokens},
          {"s_ice", settings_.policy.nominal_ice_tokens},
          {"scope", scope},
          {"visibility", visibility_name(settings_.policy.visibility)}}},
    };
}

std::string GatewayCore::transcript_jsonl(const std::string& session_id) const {
    std::shared_ptr<Session> session = find_session(session_id);
    if (!session) {
        raise(ErrorCode::UnknownSession, "no session '" + session_id + "'");
    }
    std::lock_guard<std::mutex> state(session->state_mu);
    return transcript_to_jsonl(session->transcript, build_meta(*session));
}

void GatewayCore::persist(Session& session) const {
    if (settings_.transcript_dir.empty()) return;
    try {
        std::filesystem::create_directories(settings_.transcript_dir);
        std::filesystem::path path =
            std::filesystem::path(settings_.transcript_dir) / (session.id + ".jsonl");
        std::lock_guard<std::mutex> state(session.state_mu);
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << transcript_to_jsonl(session.transcript, build_meta(session));
    } catch (const std::exception& e) {
        log_warn(std::string("failed to persist transcript: ") + e.what());
    }
}

std::size_t GatewayCore::reload_store() {
    ControlStore next = ControlStore::load_file(settings_.control_store_path, settings_.counter);
    return store_.replace(std::move(next));
}

nlohmann::json ratio_report_to_json(const RatioReport& report) {
    nlohmann::json obj = {
        {"measured_ratio", report.measured_ratio},
        {"asymptotic_q", report.asymptotic_q},
        {"overhead", report.overhead},
        {"total_tokens", report.total_tokens},
        {"ice_injections", report.ice_injections},
    };
    if (report.lower_bound) {
        obj["lower_bound"] = *report.lower_bound;
    } else {
        obj["lower_bound"] = nullptr;
    }
    return obj;
}

}  // namespace ice
