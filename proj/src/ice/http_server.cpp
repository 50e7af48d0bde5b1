#include "ice/http_server.hpp"

#include <httplib.h>

#include <nlohmann/json.hpp>
#include <utility>

#include "ice/log.hpp"
#include "ice/wire.hpp"

namespace ice {
namespace {

int status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::MalformedRequest:
        case ErrorCode::SystemPromptMisplaced:
        case ErrorCode::ParseError:
            return 400;
        case ErrorCode::UnknownSession:
            return 404;
        case ErrorCode::SessionBusy:
            return 409;
        case ErrorCode::PolicyInvalid:
        case ErrorCode::EmptyStore:
        case ErrorCode::EmptyTranscript:
        case ErrorCode::UnknownId:
        case ErrorCode::Infeasible:
        case ErrorCode::BoundUndefined:
        case ErrorCode::InvalidArgument:
        case ErrorCode::OutOfRange:
            return 422;
        case ErrorCode::UpstreamUnreachable:
        case ErrorCode::ContinuationFailed:
            return 502;
        default:
            return 500;
    }
}

nlohmann::json error_json(ErrorCode code, const std::string& message) {
    return nlohmann::json{{"error",
                           {{"message", message},
                            {"type", "ice_error"},
                            {"code", error_code_name(code)}}}};
}

void error_response(httplib::Response& res, ErrorCode code, const std::string& message) {
    res.status = status_for(code);
    res.set_content(error_json(code, message).dump(), "application/json");
}

void error_response(httplib::Response& res, const IceError& err) {
    error_response(res, err.code(), err.what());
}

nlohmann::json non_stream_body(const ChatOutcome& outcome, const std::string& model) {
    nlohmann::json message{{"role", "assistant"}, {"content", outcome.content}};
    if (!outcome.reasoning.empty()) message["reasoning_content"] = outcome.reasoning;
    return nlohmann::json{
        {"id", outcome.session_id},
        {"object", "chat.completion"},
        {"model", model},
        {"choices",
         nlohmann::json::array({{{"index", 0},
                                 {"message", message},
                                 {"finish_reason", "stop"}}})},
        {"usage",
         {{"prompt_tokens", outcome.prompt_tokens},
          {"completion_tokens", outcome.completion_tokens},
          {"total_tokens", outcome.prompt_tokens + outcome.completion_tokens}}},
    };
}

}  // namespace

struct GatewayServer::Impl {
    httplib::Server server;
};

GatewayServer::GatewayServer(GatewaySettings settings, std::unique_ptr<UpstreamClient> upstream)
    : core_(std::make_unique<GatewayCore>(std::move(settings), std::move(upstream))),
      impl_(std::make_unique<Impl>()) {
    auto& svr = impl_->server;
    GatewayCore* core = core_.get();

    svr.Post("/v1/chat/completions", [core](const httplib::Request& req, httplib::Response& res) {
        wire::ChatRequest chat;
        std::shared_ptr<Session> session;
        std::shared_ptr<SessionLock> lock;
        try {
            chat = wire::parse_chat_request(
                nlohmann::json::parse(req.body, nullptr, false));
            session = core->resolve_session(req.get_header_value(kSessionHeader));
            lock = std::make_shared<SessionLock>(session);
        } catch (const IceError& err) {
            error_response(res, err);
            return;
        }
        res.set_header(kSessionHeader, session->id);

        if (!chat.stream) {
            try {
                ChatOutcome outcome = core->chat_on_session(*session, chat, nullptr);
                if (outcome.had_error) {
                    error_response(res, outcome.error_code, outcome.error_message);
                    return;
                }
                res.set_content(non_stream_body(outcome, core->settings().upstream_model).dump(),
                                "application/json");
            } catch (const IceError& err) {
                error_response(res, err);
            }
            return;
        }

        auto request = std::make_shared<wire::ChatRequest>(std::move(chat));
        std::string model = core->settings().upstream_model;
        res.set_chunked_content_provider(
            "text/event-stream",
            [core, request, session, lock, model](std::size_t offset, httplib::DataSink& sink) {
                if (offset != 0) return false;  // the whole stream is written in one pass
                auto write = [&sink](const nlohmann::json& payload) {
                    std::string frame = wire::sse_frame(payload.dump());
                    return sink.write(frame.data(), frame.size());
                };
                bool client_gone = false;
                EventSink events = [&](const ClientEvent& event) {
                    nlohmann::json payload;
                    switch (event.kind) {
                        case ClientEvent::Kind::Content:
                            payload = wire::make_stream_chunk(session->id, model,
                                                              wire::ChunkKind::Content, event.text);
                            break;
                        case ClientEvent::Kind::Reasoning:
                            payload = wire::make_stream_chunk(session->id, model,
                                                              wire::ChunkKind::Reasoning, event.text);
                            break;
                        case ClientEvent::Kind::Ice:
                            payload = wire::make_stream_chunk(session->id, model,
                                                              wire::ChunkKind::Ice, event.text);
                            break;
                        case ClientEvent::Kind::Error:
                            payload = error_json(ErrorCode::ContinuationFailed, event.text);
                            break;
                    }
                    if (!write(payload)) {
                        client_gone = true;
                        return false;
                    }
                    return true;
                };
                try {
                    core->chat_on_session(*session, *request, events);
                } catch (const IceError& err) {
                    // Failure before the first upstream token: surface it as an
                    // in-stream error frame since headers are already out.
                    write(error_json(err.code(), err.what()));
                }
                if (!client_gone) {
                    write(wire::make_finish_chunk(session->id, model));
                    std::string done = wire::sse_frame("[DONE]");
                    sink.write(done.data(), done.size());
                }
                sink.done();
                return false;
            });
    });

    svr.Get(R"(/admin/sessions/([^/]+)/report)",
            [core](const httplib::Request& req, httplib::Response& res) {
                try {
                    RatioReport report = core->ratio_report(req.matches[1]);
                    res.set_content(ratio_report_to_json(report).dump(), "application/json");
                } catch (const IceError& err) {
                    error_response(res, err);
                }
            });

    svr.Get(R"(/admin/sessions/([^/]+)/transcript)",
            [core](const httplib::Request& req, httplib::Response& res) {
                try {
                    res.set_content(core->transcript_jsonl(req.matches[1]),
                                    "application/x-ndjson");
                } catch (const IceError& err) {
                    error_response(res, err);
                }
            });

    svr.Post("/admin/reload", [core](const httplib::Request&, httplib::Response& res) {
        try {
            std::size_t count = core->reload_store();
            res.set_content(nlohmann::json{{"sentences", count}}.dump(), "application/json");
        } catch (const IceError& err) {
            error_response(res, err);
        }
    });
}

GatewayServer::~GatewayServer() { stop(); }

int GatewayServer::start() {
    auto& svr = impl_->server;
    const auto& settings = core_->settings();
    if (settings.listen_port == 0) {
        port_ = svr.bind_to_any_port(settings.listen_host);
        if (port_ < 0) raise(ErrorCode::IoError, "could not bind " + settings.listen_host);
    } else {
        if (!svr.bind_to_port(settings.listen_host, settings.listen_port))
            raise(ErrorCode::IoError, "could not bind " + settings.listen_host + ":" +
                                          std::to_string(settings.listen_port));
        port_ = settings.listen_port;
    }
    thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
    svr.wait_until_ready();
    log_info("gateway listening on " + settings.listen_host + ":" + std::to_string(port_));
    return port_;
}

void GatewayServer::stop() {
    if (thread_.joinable()) {
        impl_->server.stop();
        thread_.join();
    }
}

}  // namespace ice
