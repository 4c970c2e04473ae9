#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sitekeeper/clock.hpp"
#include "sitekeeper/fetch.hpp"
#include "sitekeeper/url.hpp"

namespace sitekeeper {

// The set F of archival targets: insertion-ordered, unique by URL, and never
// holding ExcludedResource or External entries.
class DiscoveredSet {
public:
    using Entry = std::pair<NormalizedUrl, LinkClass>;

    explicit DiscoveredSet(NormalizedUrl seed = {}, TimePoint discovered_at = {})
        : seed_(std::move(seed)), discovered_at_(discovered_at) {}

    // true if inserted, false if already present.
    bool add(const NormalizedUrl& url, LinkClass c);
    bool contains(const NormalizedUrl& url) const { return index_.count(url.str()) != 0; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    const std::vector<Entry>& entries() const { return entries_; }
    const NormalizedUrl& seed() const { return seed_; }
    TimePoint discovered_at() const { return discovered_at_; }

private:
    std::vector<Entry> entries_;
    std::set<std::string> index_;
    NormalizedUrl seed_;
    TimePoint discovered_at_;
};

// Every maximal substring enclosed in matching single or double quotes that
// begins with "http://", "https://", "//", or "/". This is deliberately a
// quoted-string scan, not an HTML parse: it also catches links inside inline
// scripts and CSS url() values. First-appearance order, duplicates kept.
std::vector<std::string> extract_candidate_links(std::string_view page_source);

// Minimal robots.txt reading: Disallow path prefixes from the "*" group.
struct RobotsRules {
    std::vector<std::string> disallow;

    bool allows(const NormalizedUrl& url) const;
    bool empty() const { return disallow.empty(); }
};

RobotsRules parse_robots(std::string_view body);

struct FetchFailure {
    NormalizedUrl url;
    std::string cause;
};

struct DiscoveryResult {
    DiscoveredSet set;
    std::vector<FetchFailure> failures;
    std::vector<NormalizedUrl> robots_flagged; // disallowed URLs seen (or skipped when enforcing)
    std::size_t excluded_seen = 0;             // distinct ExcludedResource URLs dropped
    std::size_t external_seen = 0;             // distinct External URLs dropped
    Duration elapsed{};                        // so the caller can charge discovery to the budget
    bool truncated = false;                    // stopped early at max_pages
};

struct DiscoverOptions {
    bool respect_robots = false; // default per design: warn only
    int concurrency = 1;         // K in-flight fetches; membership is K-invariant
    int seed_attempts = 3;
    Duration seed_retry_delay = std::chrono::seconds(1);
};

// The only fatal discovery error: the seed did not yield a page after retries.
class SeedUnreachable : public std::runtime_error {
public:
    explicit SeedUnreachable(const std::string& what) : std::runtime_error(what) {}
};

// Breadth-first internal-link discovery from seed. Media links join the set
// without ever being fetched; page links are queued at most once; excluded
// and external links are dropped (counted); per-page fetch failures are
// recorded and skipped.
DiscoveryResult discover(const NormalizedUrl& seed, Fetcher& fetcher, const CrawlPolicy& policy,
                         Clock& clock, const DiscoverOptions& options = {});

} // namespace sitekeeper
