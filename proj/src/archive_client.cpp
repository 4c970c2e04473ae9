#include "sitekeeper/archive_client.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "http_common.hpp"
#include "sitekeeper/timeutil.hpp"

namespace sitekeeper {

SubmissionOutcome SubmissionOutcome::accepted(std::optional<std::string> hint) {
    SubmissionOutcome o;
    o.kind = Kind::Accepted;
    o.snapshot_hint = std::move(hint);
    return o;
}

SubmissionOutcome SubmissionOutcome::rate_limited(std::optional<Duration> retry_after) {
    SubmissionOutcome o;
    o.kind = Kind::RateLimited;
    o.retry_after = retry_after;
    return o;
}

SubmissionOutcome SubmissionOutcome::server_error(int status) {
    SubmissionOutcome o;
    o.kind = Kind::ServerError;
    o.status = status;
    return o;
}

SubmissionOutcome SubmissionOutcome::connection_error(std::string cause) {
    SubmissionOutcome o;
    o.kind = Kind::ConnectionError;
    o.cause = std::move(cause);
    return o;
}

SubmissionOutcome SubmissionOutcome::rejected_by_policy(int status) {
    SubmissionOutcome o;
    o.kind = Kind::RejectedByPolicy;
    o.status = status;
    return o;
}

const char* to_string(SubmissionOutcome::Kind k) {
    switch (k) {
    case SubmissionOutcome::Kind::Accepted: return "accepted";
    case SubmissionOutcome::Kind::RateLimited: return "rate_limited";
    case SubmissionOutcome::Kind::ServerError: return "server_error";
    case SubmissionOutcome::Kind::ConnectionError: return "connection_error";
    case SubmissionOutcome::Kind::RejectedByPolicy: return "rejected_by_policy";
    }
    return "connection_error";
}

SubmissionOutcome map_save_response(int status, const std::optional<std::string>& content_location,
                                    const std::optional<std::string>& retry_after_header) {
    if (status >= 200 && status < 300) return SubmissionOutcome::accepted(content_location);
    if (status == 429) {
        std::optional<Duration> retry_after;
        if (retry_after_header) {
            // integer-seconds form only; the HTTP-date form is ignored
            const std::string& h = *retry_after_header;
            if (!h.empty() && std::all_of(h.begin(), h.end(), [](unsigned char c) {
                    return std::isdigit(c);
                })) {
                retry_after = std::chrono::seconds(std::stoll(h));
            }
        }
        return SubmissionOutcome::rate_limited(retry_after);
    }
    if (status >= 500 && status < 600) return SubmissionOutcome::server_error(status);
    if (status == 401 || status == 403 || status == 404 || status == 451)
        return SubmissionOutcome::rejected_by_policy(status);
    return SubmissionOutcome::connection_error("unexpected HTTP status " + std::to_string(status));
}

void BackoffPolicy::validate() const {
    if (max_attempts < 1) throw std::invalid_argument("backoff: max_attempts must be >= 1");
    if (multiplier < 1.0) throw std::invalid_argument("backoff: multiplier must be >= 1");
    if (base_delay < Duration::zero()) throw std::invalid_argument("backoff: negative base_delay");
}

SubmissionOutcome submit_with_backoff(ArchiveClient& client, const NormalizedUrl& url,
                            const BackoffPolicy& policy, Clock& clock) {
    policy.validate();
    SubmissionOutcome outcome = client.submit(url);
    for (int attempt = 1; attempt < policy.max_attempts; ++attempt) {
        const bool retryable = outcome.kind == SubmissionOutcome::Kind::RateLimited ||
                               outcome.kind == SubmissionOutcome::Kind::ServerError;
        if (!retryable) break;
        Duration delay = seconds_duration(duration_seconds(policy.base_delay) *
                                          std::pow(policy.multiplier, attempt - 1));
        if (policy.honor_retry_after && outcome.retry_after && *outcome.retry_after > delay)
            delay = *outcome.retry_after;
        clock.sleep_for(delay);
        outcome = client.submit(url);
    }
    return outcome;
}

struct HttpArchiveClient::Impl {
    Options options;
    std::string base_path; // e.g. "/save"
    std::unique_ptr<httplib::Client> client;
};

HttpArchiveClient::HttpArchiveClient(Options options) : impl_(std::make_unique<Impl>()) {
    impl_->options = std::move(options);
    auto endpoint = parse_absolute(impl_->options.endpoint_base);
    if (!endpoint)
        throw std::invalid_argument("invalid endpoint base: " + impl_->options.endpoint_base);
    impl_->base_path = endpoint->path == "/" ? "" : endpoint->path;
    while (!impl_->base_path.empty() && impl_->base_path.back() == '/') impl_->base_path.pop_back();
    impl_->client = detail::make_http_client(endpoint->scheme, endpoint->host,
                                             impl_->options.user_agent, impl_->options.timeout);
    impl_->client->set_follow_location(true); // save endpoints redirect to the capture
}

HttpArchiveClient::~HttpArchiveClient() = default;

SubmissionOutcome HttpArchiveClient::submit(const NormalizedUrl& url) {
    const std::string target = impl_->base_path + "/" + url.str();
    auto res = impl_->client->Get(target);
    if (!res) return SubmissionOutcome::connection_error(httplib::to_string(res.error()));
    std::optional<std::string> content_location;
    if (res->has_header("Content-Location")) content_location = res->get_header_value("Content-Location");
    std::optional<std::string> retry_after;
    if (res->has_header("Retry-After")) retry_after = res->get_header_value("Retry-After");
    return map_save_response(res->status, content_location, retry_after);
}

} // namespace sitekeeper
