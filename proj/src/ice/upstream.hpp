#pragma once

#include <functional>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "ice/error.hpp"

namespace ice {

// One delta received from the model provider.
struct UpstreamChunk {
    enum class Kind { Reasoning, Content };
    Kind kind;
    std::string text;
};

// Streaming chat transport to the model provider. Implementations must call
// on_chunk in arrival order and stop promptly when it returns false (that is
// the gateway's abort: close the stream, discard the rest). Transport or
// provider failures raise UpstreamUnreachable.
class UpstreamClient {
public:
    virtual ~UpstreamClient() = default;

    virtual void stream_chat(const nlohmann::json& request,
                             const std::function<bool(const UpstreamChunk&)>& on_chunk) = 0;
};

// HTTP implementation speaking the chat-completions SSE protocol.
class HttpUpstream final : public UpstreamClient {
public:
    // base_url like "http://127.0.0.1:8081". When auth_env names a set
    // environment variable, its value is sent as a bearer token.
    HttpUpstream(std::string base_url, std::string auth_env);
    ~HttpUpstream() override;

    void stream_chat(const nlohmann::json& request,
                     const std::function<bool(const UpstreamChunk&)>& on_chunk) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace ice
