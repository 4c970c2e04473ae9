#pragma once

// Shared httplib client setup. Keep the feature defines here so every
// translation unit sees the same httplib configuration.

#include <cstdlib>
#include <memory>
#include <string>

#include <httplib.h>

#include "sitekeeper/url.hpp"

namespace sitekeeper::detail {

// "http://proxy:3128" -> (proxy, 3128)
inline void apply_proxy_env(httplib::Client& client, const std::string& scheme) {
    const char* raw = nullptr;
    if (scheme == "https") {
        raw = std::getenv("https_proxy");
        if (!raw) raw = std::getenv("HTTPS_PROXY");
    } else {
        raw = std::getenv("http_proxy");
        if (!raw) raw = std::getenv("HTTP_PROXY");
    }
    if (!raw || !*raw) return;
    if (auto proxy = parse_absolute(raw)) {
        std::string host = proxy->host;
        int port = proxy->scheme == "https" ? 443 : 80;
        if (const std::size_t colon = host.find(':'); colon != std::string::npos) {
            port = std::atoi(host.c_str() + colon + 1);
            host.erase(colon);
        }
        client.set_proxy(host, port);
    }
}

inline std::unique_ptr<httplib::Client> make_http_client(const std::string& scheme,
                                                         const std::string& host,
                                                         const std::string& user_agent,
                                                         Duration timeout) {
    auto client = std::make_unique<httplib::Client>(scheme + "://" + host);
    client->set_url_encode(false); // request targets go out byte-exact
    client->set_follow_location(false);
    client->set_decompress(true);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    client->set_connection_timeout(secs);
    client->set_read_timeout(secs);
    client->set_default_headers({{"User-Agent", user_agent}, {"Accept-Encoding", "gzip"}});
    apply_proxy_env(*client, scheme);
    return client;
}

} // namespace sitekeeper::detail
