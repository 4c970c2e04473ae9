#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sitekeeper/clock.hpp"
#include "sitekeeper/url.hpp"

namespace sitekeeper {

struct FetchResult {
    NormalizedUrl requested;
    NormalizedUrl final_url;
    int status_code = 0; // [100, 599]
    std::string body;
    std::vector<NormalizedUrl> redirect_chain; // successive Location targets; empty iff no redirect
    TimePoint fetched_at{};
};

// What a HEAD request reveals without downloading the body.
struct ResourceMeta {
    std::optional<std::uint64_t> content_length;
    std::optional<std::string> last_modified;

    bool any() const { return content_length.has_value() || last_modified.has_value(); }
};

// Transport abstraction so discovery and the proactive pass are testable
// against scripted fixtures. Implementations honor the politeness delay
// between consecutive requests to the same host, follow at most 10
// redirects, and bound each request's total time (default 30 s).
class Fetcher {
public:
    virtual ~Fetcher() = default;

    // nullopt on connection failure; *error carries the cause.
    virtual std::optional<FetchResult> fetch(const NormalizedUrl& url,
                                             std::string* error = nullptr) = 0;

    // Metadata-only probe. Default: not supported, caller falls back to fetch().
    virtual std::optional<ResourceMeta> head(const NormalizedUrl& url,
                                             std::string* error = nullptr) {
        (void)url;
        if (error) *error = "HEAD not supported";
        return std::nullopt;
    }
};

} // namespace sitekeeper
