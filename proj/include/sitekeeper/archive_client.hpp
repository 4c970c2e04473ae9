#pragma once

#include <memory>
#include <optional>
#include <string>

#include "sitekeeper/clock.hpp"
#include "sitekeeper/url.hpp"

namespace sitekeeper {

inline constexpr const char* kDefaultUserAgent =
    "sitekeeper/0.1 (+https://github.com/sitekeeper/sitekeeper)";
inline constexpr const char* kDefaultEndpointBase = "https://web.archive.org/save";

// Result of one save request. Every response and every transport failure
// becomes a value; submit() never throws.
struct SubmissionOutcome {
    enum class Kind { Accepted, RateLimited, ServerError, ConnectionError, RejectedByPolicy };

    Kind kind = Kind::ConnectionError;
    std::optional<std::string> snapshot_hint; // Accepted: Content-Location when present
    std::optional<Duration> retry_after;      // RateLimited: parsed Retry-After
    int status = 0;                           // ServerError [500,599]; RejectedByPolicy {401,403,404,451}
    std::string cause;                        // ConnectionError

    bool ok() const { return kind == Kind::Accepted; }

    static SubmissionOutcome accepted(std::optional<std::string> hint = std::nullopt);
    static SubmissionOutcome rate_limited(std::optional<Duration> retry_after = std::nullopt);
    static SubmissionOutcome server_error(int status);
    static SubmissionOutcome connection_error(std::string cause);
    static SubmissionOutcome rejected_by_policy(int status);

    bool operator==(const SubmissionOutcome&) const = default;
};

const char* to_string(SubmissionOutcome::Kind k);

// Pure status mapping, total over [100,599]. Statuses the protocol does not
// speak (1xx, unfollowed 3xx, other 4xx) come back as ConnectionError with
// the status named in the cause; Algorithm semantics report and move on.
SubmissionOutcome map_save_response(int status, const std::optional<std::string>& content_location,
                                    const std::optional<std::string>& retry_after_header);

class ArchiveClient {
public:
    virtual ~ArchiveClient() = default;
    virtual SubmissionOutcome submit(const NormalizedUrl& url) = 0;
};

struct BackoffPolicy {
    int max_attempts = 3;
    Duration base_delay = std::chrono::seconds(10);
    double multiplier = 2.0;
    bool honor_retry_after = true;

    void validate() const; // max_attempts >= 1, multiplier >= 1
};

// Retries only RateLimited and ServerError outcomes. Connection errors are
// not retried within a run: the scheduled-run redundancy picks those up.
SubmissionOutcome submit_with_backoff(ArchiveClient& client, const NormalizedUrl& url,
                            const BackoffPolicy& policy, Clock& clock);

// Speaks GET {endpoint_base}/{url} with the URL text appended verbatim.
class HttpArchiveClient final : public ArchiveClient {
public:
    struct Options {
        std::string endpoint_base = kDefaultEndpointBase;
        std::string user_agent = kDefaultUserAgent;
        Duration timeout = std::chrono::seconds(120); // bounds worst-case budget overshoot
    };

    explicit HttpArchiveClient(Options options);
    ~HttpArchiveClient() override;

    HttpArchiveClient(const HttpArchiveClient&) = delete;
    HttpArchiveClient& operator=(const HttpArchiveClient&) = delete;

    SubmissionOutcome submit(const NormalizedUrl& url) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace sitekeeper
