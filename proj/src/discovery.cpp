#include "sitekeeper/discovery.hpp"

#include <algorithm>
#include <cctype>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>

namespace sitekeeper {

bool DiscoveredSet::add(const NormalizedUrl& url, LinkClass c) {
    if (!index_.insert(url.str()).second) return false;
    entries_.emplace_back(url, c);
    return true;
}

std::vector<std::string> extract_candidate_links(std::string_view page_source) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < page_source.size()) {
        const char quote = page_source[i];
        if (quote != '"' && quote != '\'') {
            ++i;
            continue;
        }
        const std::size_t close = page_source.find(quote, i + 1);
        if (close == std::string_view::npos) break;
        const std::string_view inner = page_source.substr(i + 1, close - i - 1);
        if (!inner.empty() && (inner[0] == '/' || inner.rfind("http://", 0) == 0 ||
                               inner.rfind("https://", 0) == 0)) {
            out.emplace_back(inner);
        }
        i = close + 1;
    }
    return out;
}

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    }
    return true;
}

} // namespace

bool RobotsRules::allows(const NormalizedUrl& url) const {
    for (const auto& prefix : disallow) {
        if (url.path.rfind(prefix, 0) == 0) return false;
    }
    return true;
}

RobotsRules parse_robots(std::string_view body) {
    RobotsRules rules;
    bool group_applies = false;
    bool last_was_agent = false;
    std::size_t pos = 0;
    while (pos <= body.size()) {
        std::size_t eol = body.find('\n', pos);
        if (eol == std::string_view::npos) eol = body.size();
        std::string line = trim(body.substr(pos, eol - pos));
        pos = eol + 1;
        if (const std::size_t hash = line.find('#'); hash != std::string::npos)
            line = trim(std::string_view(line).substr(0, hash));
        if (line.empty()) continue;
        const std::size_t colon = line.find(':');
        if (colon == std::string::npos) continue;
        const std::string key = trim(std::string_view(line).substr(0, colon));
        const std::string value = trim(std::string_view(line).substr(colon + 1));
        if (iequals(key, "user-agent")) {
            if (!last_was_agent) group_applies = false; // a new group starts
            if (value == "*") group_applies = true;
            last_was_agent = true;
        } else {
            if (iequals(key, "disallow") && group_applies && !value.empty())
                rules.disallow.push_back(value);
            last_was_agent = false;
        }
    }
    return rules;
}

namespace {

// Shared crawl state; all mutation happens under mu.
struct CrawlState {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<NormalizedUrl> queue;
    std::set<std::string> in_flight;
    std::set<std::string> excluded_seen;
    std::set<std::string> external_seen;
    std::set<std::string> robots_flagged_index;
    DiscoveryResult result;
    const CrawlPolicy* policy = nullptr;
    RobotsRules robots;
    bool respect_robots = false;
    std::exception_ptr failure;

    bool cap_reached_locked() const { return result.set.size() >= policy->max_pages; }

    void flag_robots_locked(const NormalizedUrl& url) {
        if (robots_flagged_index.insert(url.str()).second)
            result.robots_flagged.push_back(url);
    }

    // Fold one fetched page into F and the frontier. Pages that redirect
    // off-site terminate their branch: the URL is still archived (capturing
    // the redirect), but no links are taken from the foreign body.
    void integrate_locked(const NormalizedUrl& url, const FetchResult& fetched) {
        if (!cap_reached_locked()) {
            result.set.add(url, LinkClass::Page);
        } else {
            result.truncated = true;
            return;
        }
        if (classify(fetched.final_url, *policy) == LinkClass::External) return;

        for (const auto& raw : extract_candidate_links(fetched.body)) {
            auto link = normalize(raw, fetched.final_url);
            if (!link) continue;
            switch (classify(*link, *policy)) {
            case LinkClass::External:
                external_seen.insert(link->str());
                break;
            case LinkClass::ExcludedResource:
                excluded_seen.insert(link->str());
                break;
            case LinkClass::Media:
                if (!cap_reached_locked()) {
                    result.set.add(*link, LinkClass::Media);
                } else if (!result.set.contains(*link)) {
                    result.truncated = true;
                }
                break;
            case LinkClass::Page:
                if (!result.set.contains(*link)) queue.push_back(*link);
                break;
            }
        }
    }
};

void crawl_worker(CrawlState& state, Fetcher& fetcher) {
    try {
        for (;;) {
            NormalizedUrl url;
            {
                std::unique_lock<std::mutex> lock(state.mu);
                for (;;) {
                    if (state.failure) return;
                    if (state.cap_reached_locked()) {
                        if (!state.queue.empty() || !state.in_flight.empty())
                            state.result.truncated = true;
                        return;
                    }
                    if (state.queue.empty()) {
                        if (state.in_flight.empty()) return;
                        state.cv.wait(lock);
                        continue;
                    }
                    url = state.queue.front();
                    state.queue.pop_front();
                    if (state.result.set.contains(url)) continue; // fetched already
                    if (state.in_flight.count(url.str())) continue;
                    if (!state.robots.allows(url)) {
                        state.flag_robots_locked(url);
                        if (state.respect_robots) continue;
                    }
                    state.in_flight.insert(url.str());
                    break;
                }
            }

            std::string error;
            auto fetched = fetcher.fetch(url, &error);

            {
                std::lock_guard<std::mutex> lock(state.mu);
                state.in_flight.erase(url.str());
                if (fetched && fetched->status_code >= 200 && fetched->status_code < 400) {
                    state.integrate_locked(url, *fetched);
                } else {
                    const std::string cause =
                        fetched ? "HTTP " + std::to_string(fetched->status_code) : error;
                    state.result.failures.push_back({url, cause});
                }
                state.cv.notify_all();
            }
        }
    } catch (...) {
        std::lock_guard<std::mutex> lock(state.mu);
        if (!state.failure) state.failure = std::current_exception();
        state.cv.notify_all();
    }
}

} // namespace

DiscoveryResult discover(const NormalizedUrl& seed, Fetcher& fetcher, const CrawlPolicy& policy,
                         Clock& clock, const DiscoverOptions& options) {
    policy.validate();
    const TimePoint started = clock.now();

    CrawlState state;
    state.result.set = DiscoveredSet(seed, started);
    state.policy = &policy;
    state.respect_robots = options.respect_robots;

    // robots.txt is consulted once per crawl; a miss means no rules.
    if (auto robots_url = normalize("/robots.txt", seed)) {
        if (auto fetched = fetcher.fetch(*robots_url);
            fetched && fetched->status_code >= 200 && fetched->status_code < 300) {
            state.robots = parse_robots(fetched->body);
        }
    }

    const auto finalize = [&] {
        state.result.excluded_seen = state.excluded_seen.size();
        state.result.external_seen = state.external_seen.size();
        state.result.elapsed = clock.now() - started;
        return std::move(state.result);
    };

    if (!state.robots.allows(seed)) {
        state.flag_robots_locked(seed);
        if (options.respect_robots) return finalize();
    }

    // The seed is the one fetch that must succeed; retry, then give up loudly.
    std::optional<FetchResult> seed_fetch;
    std::string last_cause = "no attempts";
    for (int attempt = 0; attempt < std::max(1, options.seed_attempts); ++attempt) {
        if (attempt > 0) clock.sleep_for(options.seed_retry_delay);
        std::string error;
        auto fetched = fetcher.fetch(seed, &error);
        if (fetched && fetched->status_code >= 200 && fetched->status_code < 400) {
            seed_fetch = std::move(fetched);
            break;
        }
        last_cause = fetched ? "HTTP " + std::to_string(fetched->status_code) : error;
    }
    if (!seed_fetch) throw SeedUnreachable("seed " + seed.str() + " unreachable: " + last_cause);
    state.integrate_locked(seed, *seed_fetch);

    const int workers = std::max(1, options.concurrency);
    if (workers == 1) {
        crawl_worker(state, fetcher);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int i = 0; i < workers; ++i)
            pool.emplace_back([&] { crawl_worker(state, fetcher); });
        for (auto& t : pool) t.join();
    }
    if (state.failure) std::rethrow_exception(state.failure);

    return finalize();
}

} // namespace sitekeeper
