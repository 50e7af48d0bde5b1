#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ice/error.hpp"
#include "ice/transcript.hpp"

namespace ice::wire {

// Client request to POST /v1/chat/completions after validation.
struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    bool stream = false;
};

// Validates the wire shape: messages must be a non-empty array of objects
// with string role/content. Throws MalformedRequest otherwise.
ChatRequest parse_chat_request(const nlohmann::json& body);

// Serializes messages into an upstream chat-completions request body.
nlohmann::json build_chat_request(const std::vector<ChatMessage>& messages,
                                  const std::string& model, bool stream);

// One delta parsed from an upstream stream chunk.
struct StreamDelta {
    bool done = false;           // saw the [DONE] sentinel
    bool finish = false;         // finish_reason was set
    std::string content;         // delta.content
    std::string reasoning;       // delta.reasoning_content
};

// Parses one SSE data payload ("[DONE]" or a chat.completion.chunk object).
StreamDelta parse_stream_event(std::string_view data);

// Chunk builders for the client-facing stream. `kind` picks the delta field:
// content, reasoning_content, or flagged control text.
enum class ChunkKind { Content, Reasoning, Ice };

nlohmann::json make_stream_chunk(const std::string& id, const std::string& model,
                                 ChunkKind kind, std::string_view text);
nlohmann::json make_finish_chunk(const std::string& id, const std::string& model);

// Wraps a payload in an SSE frame: "data: <payload>\n\n".
std::string sse_frame(std::string_view payload);

// Incremental server-sent-events reader: feed raw bytes, get each event's
// data payload via the callback. Returns false once the callback asks to
// stop. A final call to finish() flushes an unterminated trailing event.
class SseReader {
public:
    explicit SseReader(std::function<bool(std::string_view)> on_data)
        : on_data_(std::move(on_data)) {}

    bool feed(const char* data, std::size_t len);
    void finish();

private:
    bool dispatch_line(std::string_view line);

    std::function<bool(std::string_view)> on_data_;
    std::string buffer_;
};

}  // namespace ice::wire
