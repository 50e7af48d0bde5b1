#pragma once

#include <memory>
#include <string>
#include <thread>

#include "ice/gateway.hpp"

namespace ice {

// HTTP front end for GatewayCore: the chat-completions route plus the admin
// surface. Owns a listener thread; start() returns the bound port (useful
// with port 0 in tests).
class GatewayServer {
public:
    GatewayServer(GatewaySettings settings, std::unique_ptr<UpstreamClient> upstream);
    ~GatewayServer();

    int start();  // throws IoError when the address cannot be bound
    void stop();

    int port() const { return port_; }
    GatewayCore& core() { return *core_; }

private:
    struct Impl;
    std::unique_ptr<GatewayCore> core_;
    std::unique_ptr<Impl> impl_;
    std::thread thread_;
    int port_ = 0;
};

}  // namespace ice
