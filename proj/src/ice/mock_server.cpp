#include "ice/mock_server.hpp"

#include <httplib.h>

#include <nlohmann/json.hpp>
#include <utility>

#include "ice/log.hpp"
#include "ice/wire.hpp"

namespace ice {
namespace {

nlohmann::json error_json(ErrorCode code, const std::string& message) {
    return nlohmann::json{{"error",
                           {{"message", message},
                            {"type", "mock_error"},
                            {"code", error_code_name(code)}}}};
}

MockBehavior effective_behavior(const MockBehavior& base, const httplib::Request& req) {
    std::string header = req.get_header_value("X-Mock-Behavior");
    if (header.empty()) return base;
    nlohmann::json patch = nlohmann::json::parse(header, nullptr, false);
    if (patch.is_discarded()) patch = nlohmann::json{{"mode", header}};
    nlohmann::json merged = base.to_json();
    if (!patch.is_object())
        raise(ErrorCode::MalformedRequest, "X-Mock-Behavior must be a mode name or object");
    for (const auto& [key, value] : patch.items()) merged[key] = value;
    MockBehavior behavior = MockBehavior::from_json(merged);
    behavior.validate();
    return behavior;
}

}  // namespace

struct MockServer::Impl {
    httplib::Server server;
};

MockServer::MockServer(MockBehavior behavior, std::string host, int port)
    : behavior_(std::move(behavior)),
      host_(std::move(host)),
      requested_port_(port),
      impl_(std::make_unique<Impl>()) {
    behavior_.validate();
    auto& svr = impl_->server;
    MockBehavior* base = &behavior_;

    svr.Post("/v1/chat/completions", [base](const httplib::Request& req, httplib::Response& res) {
        nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
        MockBehavior behavior;
        bool stream = false;
        try {
            behavior = effective_behavior(*base, req);
            wire::ChatRequest chat = wire::parse_chat_request(body);
            stream = chat.stream;
        } catch (const IceError& err) {
            res.status = 400;
            res.set_content(error_json(err.code(), err.what()).dump(), "application/json");
            return;
        }

        if (!stream) {
            std::string content;
            std::string reasoning;
            try {
                MockLlm(behavior).generate(body, [&](const UpstreamChunk& chunk) {
                    (chunk.kind == UpstreamChunk::Kind::Reasoning ? reasoning : content) +=
                        chunk.text;
                    return true;
                });
            } catch (const IceError& err) {
                res.status = 400;
                res.set_content(error_json(err.code(), err.what()).dump(), "application/json");
                return;
            }
            nlohmann::json message{{"role", "assistant"}, {"content", content}};
            if (!reasoning.empty()) message["reasoning_content"] = reasoning;
            nlohmann::json out{
                {"id", "mock-1"},
                {"object", "chat.completion"},
                {"model", "mock"},
                {"choices",
                 nlohmann::json::array({{{"index", 0},
                                         {"message", message},
                                         {"finish_reason", "stop"}}})},
            };
            res.set_content(out.dump(), "application/json");
            return;
        }

        auto request = std::make_shared<nlohmann::json>(std::move(body));
        res.set_chunked_content_provider(
            "text/event-stream",
            [behavior, request](std::size_t offset, httplib::DataSink& sink) {
                if (offset != 0) return false;
                bool client_gone = false;
                auto write = [&sink](const std::string& payload) {
                    std::string frame = wire::sse_frame(payload);
                    return sink.write(frame.data(), frame.size());
                };
                try {
                    MockLlm(behavior).generate(*request, [&](const UpstreamChunk& chunk) {
                        wire::ChunkKind kind = chunk.kind == UpstreamChunk::Kind::Reasoning
                                                   ? wire::ChunkKind::Reasoning
                                                   : wire::ChunkKind::Content;
                        if (!write(wire::make_stream_chunk("mock-1", "mock", kind, chunk.text)
                                       .dump())) {
                            client_gone = true;
                            return false;
                        }
                        return true;
                    });
                } catch (const IceError& err) {
                    write(error_json(err.code(), err.what()).dump());
                }
                if (!client_gone) {
                    write(wire::make_finish_chunk("mock-1", "mock").dump());
                    write("[DONE]");
                }
                sink.done();
                return false;
            });
    });
}

MockServer::~MockServer() { stop(); }

int MockServer::start() {
    auto& svr = impl_->server;
    if (requested_port_ == 0) {
        port_ = svr.bind_to_any_port(host_);
        if (port_ < 0) raise(ErrorCode::IoError, "could not bind " + host_);
    } else {
        if (!svr.bind_to_port(host_, requested_port_))
            raise(ErrorCode::IoError,
                  "could not bind " + host_ + ":" + std::to_string(requested_port_));
        port_ = requested_port_;
    }
    thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
    svr.wait_until_ready();
    log_info("mock model listening on " + host_ + ":" + std::to_string(port_));
    return port_;
}

void MockServer::stop() {
    if (thread_.joinable()) {
        impl_->server.stop();
        thread_.join();
    }
}

std::string MockServer::base_url() const {
    return "http://" + host_ + ":" + std::to_string(port_);
}

}  // namespace ice
