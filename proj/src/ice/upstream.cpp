#include "ice/upstream.hpp"

#include <cstdlib>

#include <httplib.h>

#include "ice/wire.hpp"

namespace ice {

struct HttpUpstream::Impl {
    std::string base_url;
    std::string auth_env;
};

HttpUpstream::HttpUpstream(std::string base_url, std::string auth_env)
    : impl_(new Impl{std::move(base_url), std::move(auth_env)}) {}

HttpUpstream::~HttpUpstream() = default;

void HttpUpstream::stream_chat(const nlohmann::json& request,
                               const std::function<bool(const UpstreamChunk&)>& on_chunk) {
    httplib::Client client(impl_->base_url);
    client.set_connection_timeout(5, 0);
    client.set_read_timeout(60, 0);

    httplib::Headers headers;
    if (!impl_->auth_env.empty()) {
        if (const char* token = std::getenv(impl_->auth_env.c_str())) {
            headers.emplace("Authorization", std::string("Bearer ") + token);
        }
    }

    bool aborted = false;    // we cancelled on purpose (splice)
    bool done_seen = false;  // upstream finished cleanly
    wire::SseReader reader([&](std::string_view data) {
        wire::StreamDelta delta = wire::parse_stream_event(data);
        if (delta.done) {
            done_seen = true;
            return false;
        }
        if (!delta.reasoning.empty()) {
            if (!on_chunk({UpstreamChunk::Kind::Reasoning, delta.reasoning})) {
                aborted = true;
                return false;
            }
        }
        if (!delta.content.empty()) {
            if (!on_chunk({UpstreamChunk::Kind::Content, delta.content})) {
                aborted = true;
                return false;
            }
        }
        return true;
    });

    // This httplib has no streaming-receiver Post overload, so build the
    // request by hand and go through the generic send path.
    httplib::Request req;
    req.method = "POST";
    req.path = "/v1/chat/completions";
    req.headers = headers;
    req.set_header("Content-Type", "application/json");
    req.body = request.dump();
    req.content_receiver = [&](const char* data, std::size_t len, std::uint64_t /*offset*/,
                               std::uint64_t /*total*/) { return reader.feed(data, len); };
    auto result = client.send(req);

    if (aborted || done_seen) return;
    if (!result) {
        raise(ErrorCode::UpstreamUnreachable,
              "upstream request failed: " + httplib::to_string(result.error()));
    }
    if (result->status != 200) {
        raise(ErrorCode::UpstreamUnreachable,
              "upstream returned HTTP " + std::to_string(result->status));
    }
    reader.finish();
}

}  // namespace ice
