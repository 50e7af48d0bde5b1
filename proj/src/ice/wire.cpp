#include "ice/wire.hpp"

namespace ice::wire {

ChatRequest parse_chat_request(const nlohmann::json& body) {
    if (!body.is_object()) {
        raise(ErrorCode::MalformedRequest, "request body must be a JSON object");
    }
    if (!body.contains("messages") || !body["messages"].is_array() || body["messages"].empty()) {
        raise(ErrorCode::MalformedRequest, "request needs a non-empty messages array");
    }
    ChatRequest req;
    req.model = body.value("model", "");
    if (body.contains("stream")) {
        if (!body["stream"].is_boolean()) {
            raise(ErrorCode::MalformedRequest, "stream must be a boolean");
        }
        req.stream = body["stream"].get<bool>();
    }
    for (const nlohmann::json& m : body["messages"]) {
        if (!m.is_object() || !m.contains("role") || !m.contains("content") ||
            !m["role"].is_string() || !m["content"].is_string()) {
            raise(ErrorCode::MalformedRequest,
                  "each message needs string role and string content");
        }
        std::string role = m["role"].get<std::string>();
        if (role != "system" && role != "user" && role != "assistant") {
            raise(ErrorCode::MalformedRequest, "unsupported message role '" + role + "'");
        }
        req.messages.push_back({std::move(role), m["content"].get<std::string>()});
    }
    return req;
}

nlohmann::json build_chat_request(const std::vector<ChatMessage>& messages,
                                  const std::string& model, bool stream) {
    nlohmann::json body;
    body["model"] = model;
    body["stream"] = stream;
    body["messages"] = nlohmann::json::array();
    for (const ChatMessage& m : messages) {
        body["messages"].push_back({{"role", m.role}, {"content", m.content}});
    }
    return body;
}

StreamDelta parse_stream_event(std::string_view data) {
    StreamDelta delta;
    if (data == "[DONE]") {
        delta.done = true;
        return delta;
    }
    nlohmann::json obj = nlohmann::json::parse(data, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
        raise(ErrorCode::ParseError, "stream event is not valid JSON");
    }
    if (!obj.contains("choices") || !obj["choices"].is_array() || obj["choices"].empty()) {
        return delta;  // keep-alive or unknown event shape; nothing to forward
    }
    const nlohmann::json& choice = obj["choices"][0];
    if (choice.contains("finish_reason") && !choice["finish_reason"].is_null()) {
        delta.finish = true;
    }
    if (choice.contains("delta") && choice["delta"].is_object()) {
        const nlohmann::json& d = choice["delta"];
        if (d.contains("content") && d["content"].is_string()) {
            delta.content = d["content"].get<std::string>();
        }
        if (d.contains("reasoning_content") && d["reasoning_content"].is_string()) {
            delta.reasoning = d["reasoning_content"].get<std::string>();
        }
    }
    return delta;
}

namespace {

nlohmann::json chunk_envelope(const std::string& id, const std::string& model) {
    return {
        {"id", id},
        {"object", "chat.completion.chunk"},
        {"model", model},
        {"choices",
         nlohmann::json::array({{{"index", 0},
                                 {"delta", nlohmann::json::object()},
                                 {"finish_reason", nullptr}}})},
    };
}

}  // namespace

nlohmann::json make_stream_chunk(const std::string& id, const std::string& model,
                                 ChunkKind kind, std::string_view text) {
    nlohmann::json chunk = chunk_envelope(id, model);
    nlohmann::json& delta = chunk["choices"][0]["delta"];
    switch (kind) {
        case ChunkKind::Content:
            delta["content"] = text;
            break;
        case ChunkKind::Reasoning:
            delta["reasoning_content"] = text;
            break;
        case ChunkKind::Ice:
            // Control text rides in its own field so payload concatenation
            // stays pure for clients that ignore the flag.
            delta["ice_content"] = text;
            delta["ice"] = true;
            break;
    }
    return chunk;
}

nlohmann::json make_finish_chunk(const std::string& id, const std::string& model) {
    nlohmann::json chunk = chunk_envelope(id, model);
    chunk["choices"][0]["finish_reason"] = "stop";
    return chunk;
}

std::string sse_frame(std::string_view payload) {
    std::string frame = "data: ";
    frame += payload;
    frame += "\n\n";
    return frame;
}

bool SseReader::feed(const char* data, std::size_t len) {
    buffer_.append(data, len);
    std::size_t start = 0;
    for (;;) {
        std::size_t eol = buffer_.find('\n', start);
        if (eol == std::string::npos) break;
        std::string_view line(buffer_.data() + start, eol - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        start = eol + 1;
        if (!dispatch_line(line)) {
            buffer_.erase(0, start);
            return false;
        }
    }
    buffer_.erase(0, start);
    return true;
}

void SseReader::finish() {
    if (!buffer_.empty()) {
        std::string_view line(buffer_);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        dispatch_line(line);
        buffer_.clear();
    }
}

bool SseReader::dispatch_line(std::string_view line) {
    if (line.rfind("data:", 0) != 0) return true;  // comments/other fields
    line.remove_prefix(5);
    if (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    if (line.empty()) return true;
    return on_data_(line);
}

}  // namespace ice::wire
