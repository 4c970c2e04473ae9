#include "sitekeeper/http_fetcher.hpp"

#include <map>
#include <mutex>

#include "http_common.hpp"

namespace sitekeeper {

struct HttpFetcher::Impl {
    struct HostClient {
        std::mutex mu; // one request at a time per httplib client
        std::unique_ptr<httplib::Client> client;
    };

    Options options;
    Clock* clock = nullptr;

    mutable std::mutex mu;
    std::map<std::string, std::unique_ptr<HostClient>> clients; // keyed by scheme://host
    std::map<std::string, TimePoint> last_request;              // keyed by host
    std::vector<std::pair<NormalizedUrl, TimePoint>> log;

    HostClient& client_for(const NormalizedUrl& url) {
        std::lock_guard<std::mutex> lock(mu);
        const std::string key = url.scheme + "://" + url.host;
        auto it = clients.find(key);
        if (it == clients.end()) {
            auto host_client = std::make_unique<HostClient>();
            host_client->client = detail::make_http_client(url.scheme, url.host,
                                                           options.user_agent, options.timeout);
            it = clients.emplace(key, std::move(host_client)).first;
        }
        return *it->second;
    }

    // Block (via the injected clock) until this host is due another request,
    // then stamp it. Safe under concurrent discovery workers.
    void politeness_gate(const NormalizedUrl& url) {
        for (;;) {
            Duration wait{};
            {
                std::lock_guard<std::mutex> lock(mu);
                const TimePoint now = clock->now();
                const auto it = last_request.find(url.host);
                if (it == last_request.end() || now - it->second >= options.politeness_delay) {
                    last_request[url.host] = now;
                    log.emplace_back(url, now);
                    return;
                }
                wait = options.politeness_delay - (now - it->second);
            }
            clock->sleep_for(wait);
        }
    }

    httplib::Result request(const char* method, const NormalizedUrl& url) {
        politeness_gate(url);
        std::string target = url.path;
        if (!url.query.empty()) target += "?" + url.query;
        HostClient& host = client_for(url);
        std::lock_guard<std::mutex> lock(host.mu);
        if (method[0] == 'H') return host.client->Head(target);
        return host.client->Get(target);
    }
};

HttpFetcher::HttpFetcher(Options options, Clock& clock) : impl_(std::make_unique<Impl>()) {
    impl_->options = std::move(options);
    impl_->clock = &clock;
}

HttpFetcher::~HttpFetcher() = default;

namespace {

bool is_redirect(int status) {
    return status == 301 || status == 302 || status == 303 || status == 307 || status == 308;
}

} // namespace

std::optional<FetchResult> HttpFetcher::fetch(const NormalizedUrl& url, std::string* error) {
    NormalizedUrl current = url;
    std::vector<NormalizedUrl> chain;

    for (int hop = 0; hop <= impl_->options.max_redirects; ++hop) {
        auto res = impl_->request("GET", current);
        if (!res) {
            if (error) *error = httplib::to_string(res.error());
            return std::nullopt;
        }
        if (is_redirect(res->status) && res->has_header("Location") &&
            hop < impl_->options.max_redirects) {
            auto next = normalize(res->get_header_value("Location"), current);
            if (!next) break; // unparseable target: surface the 3xx as final
            chain.push_back(*next);
            current = *next;
            continue;
        }
        FetchResult result;
        result.requested = url;
        result.final_url = current;
        result.status_code = res->status;
        result.body = res->body;
        result.redirect_chain = chain;
        result.fetched_at = impl_->clock->now();
        return result;
    }
    // redirect budget exhausted; report the loop as a transport failure
    if (error) *error = "redirect limit exceeded after " +
                        std::to_string(impl_->options.max_redirects) + " hops";
    return std::nullopt;
}

std::optional<ResourceMeta> HttpFetcher::head(const NormalizedUrl& url, std::string* error) {
    NormalizedUrl current = url;
    for (int hop = 0; hop <= impl_->options.max_redirects; ++hop) {
        auto res = impl_->request("HEAD", current);
        if (!res) {
            if (error) *error = httplib::to_string(res.error());
            return std::nullopt;
        }
        if (is_redirect(res->status) && res->has_header("Location") &&
            hop < impl_->options.max_redirects) {
            auto next = normalize(res->get_header_value("Location"), current);
            if (!next) break;
            current = *next;
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            if (error) *error = "HTTP " + std::to_string(res->status);
            return std::nullopt;
        }
        ResourceMeta meta;
        if (res->has_header("Content-Length"))
            meta.content_length = std::stoull(res->get_header_value("Content-Length"));
        if (res->has_header("Last-Modified"))
            meta.last_modified = res->get_header_value("Last-Modified");
        return meta;
    }
    if (error) *error = "redirect limit exceeded";
    return std::nullopt;
}

std::vector<std::pair<NormalizedUrl, TimePoint>> HttpFetcher::request_log() const {
    std::lock_guard<std::mutex> lock(impl_->mu);
    return impl_->log;
}

} // namespace sitekeeper
