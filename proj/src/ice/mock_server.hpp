#pragma once

#include <memory>
#include <string>
#include <thread>

#include "ice/mock_llm.hpp"

namespace ice {

// Stands in for a real model provider over HTTP. Serves the chat-completions
// wire shape; per-request behavior can be overridden with the X-Mock-Behavior
// header (either a bare mode name or a JSON behavior object).
class MockServer {
public:
    MockServer(MockBehavior behavior, std::string host = "127.0.0.1", int port = 0);
    ~MockServer();

    int start();  // throws IoError when the address cannot be bound
    void stop();

    int port() const { return port_; }
    std::string base_url() const;

private:
    struct Impl;
    MockBehavior behavior_;
    std::string host_;
    int requested_port_;
    int port_ = 0;
    std::unique_ptr<Impl> impl_;
    std::thread thread_;
};

}  // namespace ice
