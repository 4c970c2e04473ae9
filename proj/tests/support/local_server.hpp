#pragma once

#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

namespace sitekeeper::test {

// httplib server on 127.0.0.1:<any>, logging every raw request target.
// Register routes on server() before start().
class LocalHttpServer {
public:
    LocalHttpServer() {
        server_.set_logger([this](const httplib::Request& req, const httplib::Response&) {
            std::lock_guard<std::mutex> lock(mu_);
            targets_.push_back(req.target);
        });
    }

    ~LocalHttpServer() { stop(); }

    httplib::Server& server() { return server_; }

    void start() {
        port_ = server_.bind_to_any_port("127.0.0.1");
        if (port_ <= 0) throw std::runtime_error("cannot bind test server");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    void stop() {
        if (thread_.joinable()) {
            server_.stop();
            thread_.join();
        }
    }

    int port() const { return port_; }
    std::string origin() const { return "http://127.0.0.1:" + std::to_string(port_); }

    std::vector<std::string> request_targets() const {
        std::lock_guard<std::mutex> lock(mu_);
        return targets_;
    }

private:
    mutable std::mutex mu_;
    std::vector<std::string> targets_;
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

} // namespace sitekeeper::test
