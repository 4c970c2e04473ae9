#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "sitekeeper/archive_client.hpp"
#include "sitekeeper/clock.hpp"
#include "sitekeeper/fetch.hpp"

namespace sitekeeper {

// Real transport. Redirects are followed by hand (at most 10 hops) so the
// chain lands in FetchResult; the politeness gate spaces consecutive
// requests to one host through the injected clock.
class HttpFetcher final : public Fetcher {
public:
    struct Options {
        std::string user_agent = kDefaultUserAgent;
        Duration politeness_delay = std::chrono::seconds(1);
        Duration timeout = std::chrono::seconds(30);
        int max_redirects = 10;
    };

    HttpFetcher(Options options, Clock& clock);
    ~HttpFetcher() override;

    HttpFetcher(const HttpFetcher&) = delete;
    HttpFetcher& operator=(const HttpFetcher&) = delete;

    std::optional<FetchResult> fetch(const NormalizedUrl& url, std::string* error) override;
    std::optional<ResourceMeta> head(const NormalizedUrl& url, std::string* error) override;

    // (url, politeness-clock timestamp) per issued request, in order.
    std::vector<std::pair<NormalizedUrl, TimePoint>> request_log() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace sitekeeper
