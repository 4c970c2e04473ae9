#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sitekeeper/archive_client.hpp"
#include "sitekeeper/clock.hpp"
#include "sitekeeper/discovery.hpp"
#include "sitekeeper/url.hpp"

namespace sitekeeper {

inline constexpr Duration kDefaultCutoff =
    std::chrono::hours(3) + std::chrono::minutes(55); // under the platform's 6 h ceiling
inline constexpr Duration kDefaultPacing = std::chrono::seconds(5);

struct RunBudget {
    Duration cutoff = kDefaultCutoff;
    TimePoint started_at{};

    void validate() const; // 0 < cutoff <= 6 h
};

enum class StopReason { ListExhausted, BudgetExhausted };

const char* to_string(StopReason r);

struct PerLinkOutcome {
    NormalizedUrl url;
    SubmissionOutcome outcome;
    TimePoint at{};
};

struct RunReport {
    std::size_t attempted = 0;
    std::size_t accepted = 0;
    std::size_t connection_errors = 0;
    std::size_t rate_limited = 0;
    std::size_t other_failures = 0;    // server errors + policy rejections
    std::size_t skipped_unchanged = 0; // proactive mode: NoChange entries
    Duration elapsed{};
    StopReason stopped_by = StopReason::ListExhausted;
    std::vector<PerLinkOutcome> per_link;

    std::size_t errors() const { return connection_errors + rate_limited + other_failures; }
    void tally(const NormalizedUrl& url, const SubmissionOutcome& outcome, TimePoint at);
};

// Uniform random permutation of the set's URLs. Reproducible for a fixed
// seed, entropy-seeded otherwise. Throws std::invalid_argument on an empty set.
std::vector<NormalizedUrl> shuffle(const DiscoveredSet& set,
                                   std::optional<std::uint64_t> rng_seed = std::nullopt);

// Algorithm lines 16-23: submit in order, report errors and continue, check
// the budget AFTER each submission (a run may overshoot by one submission),
// pace between submissions.
RunReport run_submissions(const std::vector<NormalizedUrl>& links, ArchiveClient& client,
                          const RunBudget& budget, Clock& clock, Duration pacing = kDefaultPacing);

// Coverage model: each run archives a uniformly random C-subset of N links.
struct CoverageParams {
    std::size_t n_links = 0;         // N
    std::size_t per_run_capacity = 0; // C <= N
    std::size_t n_runs = 0;          // R

    void validate() const;
};

// P(link archived at least once in R runs) = 1 - (1 - C/N)^R
double coverage_probability(const CoverageParams& params);

enum class SubmissionOrder { Shuffled, FixedOrder };

struct CoverageSimulation {
    std::vector<double> coverage;         // per link: fraction of trials archived >= once
    std::vector<double> mean_submissions; // per link: mean total submissions (expect R*C/N)
};

CoverageSimulation simulate_coverage(const CoverageParams& params, std::size_t trials,
                                     std::uint64_t rng_seed,
                                     SubmissionOrder order = SubmissionOrder::Shuffled);

// Advisory file lock; prevents overlapping runs (6 x 3h55m leaves no margin).
// Released on destruction and on process death.
class RunLock {
public:
    static std::optional<RunLock> acquire(const std::filesystem::path& path);

    RunLock(RunLock&& other) noexcept;
    RunLock& operator=(RunLock&& other) noexcept;
    ~RunLock();

    RunLock(const RunLock&) = delete;
    RunLock& operator=(const RunLock&) = delete;

private:
    explicit RunLock(int fd) : fd_(fd) {}
    int fd_ = -1;
};

} // namespace sitekeeper
