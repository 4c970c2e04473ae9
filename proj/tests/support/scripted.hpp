#pragma once

#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sitekeeper/archive_client.hpp"
#include "sitekeeper/fetch.hpp"
#include "support/fake_clock.hpp"

namespace sitekeeper::test {

// In-memory site: pages keyed by full URL text. Unknown URLs 404; URLs in
// the fail set raise connection errors. Thread-safe for K>1 discovery.
class MapFetcher final : public Fetcher {
public:
    explicit MapFetcher(Clock& clock) : clock_(&clock) {}

    void add_page(const std::string& url, std::string body, int status = 200) {
        std::lock_guard<std::mutex> lock(mu_);
        pages_[url] = Page{std::move(body), status, std::nullopt};
    }

    void add_redirect(const std::string& url, const std::string& target) {
        std::lock_guard<std::mutex> lock(mu_);
        pages_[url] = Page{"", 301, target};
    }

    void set_meta(const std::string& url, ResourceMeta meta) {
        std::lock_guard<std::mutex> lock(mu_);
        meta_[url] = meta;
    }

    void fail_connections_to(const std::string& url) {
        std::lock_guard<std::mutex> lock(mu_);
        fail_.insert(url);
    }

    void clear_failure(const std::string& url) {
        std::lock_guard<std::mutex> lock(mu_);
        fail_.erase(url);
    }

    void mutate_page(const std::string& url, std::string body) { add_page(url, std::move(body)); }

    std::optional<FetchResult> fetch(const NormalizedUrl& url, std::string* error) override {
        std::lock_guard<std::mutex> lock(mu_);
        requests_.push_back(url.str());

        NormalizedUrl current = url;
        std::vector<NormalizedUrl> chain;
        for (int hop = 0; hop <= 10; ++hop) {
            const std::string key = current.str();
            if (fail_.count(key)) {
                if (error) *error = "connection refused (scripted)";
                return std::nullopt;
            }
            const auto it = pages_.find(key);
            if (it == pages_.end()) {
                FetchResult result;
                result.requested = url;
                result.final_url = current;
                result.status_code = 404;
                result.redirect_chain = chain;
                result.fetched_at = clock_->now();
                return result;
            }
            if (it->second.redirect_to) {
                auto next = normalize(*it->second.redirect_to, current);
                if (!next) break;
                chain.push_back(*next);
                current = *next;
                continue;
            }
            FetchResult result;
            result.requested = url;
            result.final_url = current;
            result.status_code = it->second.status;
            result.body = it->second.body;
            result.redirect_chain = chain;
            result.fetched_at = clock_->now();
            return result;
        }
        if (error) *error = "redirect loop (scripted)";
        return std::nullopt;
    }

    std::optional<ResourceMeta> head(const NormalizedUrl& url, std::string* error) override {
        std::lock_guard<std::mutex> lock(mu_);
        head_requests_.push_back(url.str());
        const auto it = meta_.find(url.str());
        if (it == meta_.end()) {
            if (error) *error = "no metadata (scripted)";
            return std::nullopt;
        }
        return it->second;
    }

    std::vector<std::string> requests() const {
        std::lock_guard<std::mutex> lock(mu_);
        return requests_;
    }

    std::vector<std::string> head_requests() const {
        std::lock_guard<std::mutex> lock(mu_);
        return head_requests_;
    }

    // Frontier fetches only: robots.txt probes filtered out.
    std::vector<std::string> crawl_requests() const {
        std::vector<std::string> out;
        for (const auto& r : requests())
            if (r.find("/robots.txt") == std::string::npos) out.push_back(r);
        return out;
    }

private:
    struct Page {
        std::string body;
        int status = 200;
        std::optional<std::string> redirect_to;
    };

    mutable std::mutex mu_;
    Clock* clock_;
    std::map<std::string, Page> pages_;
    std::map<std::string, ResourceMeta> meta_;
    std::set<std::string> fail_;
    std::vector<std::string> requests_;
    std::vector<std::string> head_requests_;
};

// Endpoint double at the client interface: scripted outcomes, optional
// simulated per-submission latency on a FakeClock.
class ScriptedClient final : public ArchiveClient {
public:
    ScriptedClient() = default;
    ScriptedClient(FakeClock& clock, Duration latency) : clock_(&clock), latency_(latency) {}

    void script(std::vector<SubmissionOutcome> outcomes) {
        for (auto& o : outcomes) script_.push_back(std::move(o));
    }

    void script_for(const std::string& url, std::vector<SubmissionOutcome> outcomes) {
        for (auto& o : outcomes) per_url_[url].push_back(std::move(o));
    }

    SubmissionOutcome submit(const NormalizedUrl& url) override {
        submissions.push_back(url.str());
        if (clock_) clock_->advance(latency_);
        if (const auto it = per_url_.find(url.str());
            it != per_url_.end() && !it->second.empty()) {
            SubmissionOutcome o = it->second.front();
            it->second.pop_front();
            return o;
        }
        if (!script_.empty()) {
            SubmissionOutcome o = script_.front();
            script_.pop_front();
            return o;
        }
        return SubmissionOutcome::accepted();
    }

    std::vector<std::string> submissions;

private:
    FakeClock* clock_ = nullptr;
    Duration latency_{};
    std::deque<SubmissionOutcome> script_;
    std::map<std::string, std::deque<SubmissionOutcome>> per_url_;
};

} // namespace sitekeeper::test
