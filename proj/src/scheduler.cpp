#include "sitekeeper/scheduler.hpp"

#include <cerrno>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include "sitekeeper/random.hpp"

namespace sitekeeper {

void RunBudget::validate() const {
    // zero is legal: the post-submission check then stops after one link
    if (cutoff < Duration::zero()) throw std::invalid_argument("run budget: negative cutoff");
    if (cutoff > std::chrono::hours(6))
        throw std::invalid_argument("run budget: cutoff exceeds the 6 h platform ceiling");
}

const char* to_string(StopReason r) {
    return r == StopReason::BudgetExhausted ? "budget_exhausted" : "list_exhausted";
}

void RunReport::tally(const NormalizedUrl& url, const SubmissionOutcome& outcome, TimePoint at) {
    ++attempted;
    switch (outcome.kind) {
    case SubmissionOutcome::Kind::Accepted: ++accepted; break;
    case SubmissionOutcome::Kind::ConnectionError: ++connection_errors; break;
    case SubmissionOutcome::Kind::RateLimited: ++rate_limited; break;
    case SubmissionOutcome::Kind::ServerError:
    case SubmissionOutcome::Kind::RejectedByPolicy: ++other_failures; break;
    }
    per_link.push_back({url, outcome, at});
}

std::vector<NormalizedUrl> shuffle(const DiscoveredSet& set,
                                   std::optional<std::uint64_t> rng_seed) {
    if (set.empty()) throw std::invalid_argument("shuffle: empty set");
    std::vector<NormalizedUrl> links;
    links.reserve(set.size());
    for (const auto& [url, link_class] : set.entries()) links.push_back(url);
    Rng rng = rng_seed ? Rng(*rng_seed) : Rng();
    rng.shuffle(links);
    return links;
}

RunReport run_submissions(const std::vector<NormalizedUrl>& links, ArchiveClient& client,
                          const RunBudget& budget, Clock& clock, Duration pacing) {
    budget.validate();
    if (pacing < Duration::zero()) throw std::invalid_argument("run: negative pacing");

    RunReport report;
    for (std::size_t i = 0; i < links.size(); ++i) {
        const SubmissionOutcome outcome = client.submit(links[i]);
        report.tally(links[i], outcome, clock.now());
        // Cutoff check comes after the submission, never before.
        if (clock.now() - budget.started_at >= budget.cutoff) {
            report.stopped_by = StopReason::BudgetExhausted;
            break;
        }
        if (i + 1 < links.size()) clock.sleep_for(pacing);
    }
    report.elapsed = clock.now() - budget.started_at;
    return report;
}

void CoverageParams::validate() const {
    if (n_links == 0 || per_run_capacity == 0 || n_runs == 0)
        throw std::invalid_argument("coverage params: all values must be positive");
    if (per_run_capacity > n_links)
        throw std::invalid_argument("coverage params: capacity C exceeds N");
}

double coverage_probability(const CoverageParams& params) {
    params.validate();
    const double miss = 1.0 - static_cast<double>(params.per_run_capacity) /
                                  static_cast<double>(params.n_links);
    return 1.0 - std::pow(miss, static_cast<double>(params.n_runs));
}

CoverageSimulation simulate_coverage(const CoverageParams& params, std::size_t trials,
                                     std::uint64_t rng_seed, SubmissionOrder order) {
    params.validate();
    if (trials == 0) throw std::invalid_argument("coverage simulation: trials must be >= 1");

    const std::size_t n = params.n_links;
    Rng rng(rng_seed);

    std::vector<std::size_t> permutation(n);
    std::vector<std::uint64_t> covered_trials(n, 0);
    std::vector<std::uint64_t> total_submissions(n, 0);
    std::vector<std::uint8_t> hit(n, 0);

    for (std::size_t trial = 0; trial < trials; ++trial) {
        std::fill(hit.begin(), hit.end(), 0);
        for (std::size_t run = 0; run < params.n_runs; ++run) {
            for (std::size_t i = 0; i < n; ++i) permutation[i] = i;
            if (order == SubmissionOrder::Shuffled) rng.shuffle(permutation);
            for (std::size_t i = 0; i < params.per_run_capacity; ++i) {
                const std::size_t link = permutation[i];
                ++total_submissions[link];
                hit[link] = 1;
            }
        }
        for (std::size_t i = 0; i < n; ++i) covered_trials[i] += hit[i];
    }

    CoverageSimulation sim;
    sim.coverage.resize(n);
    sim.mean_submissions.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        sim.coverage[i] = static_cast<double>(covered_trials[i]) / static_cast<double>(trials);
        sim.mean_submissions[i] =
            static_cast<double>(total_submissions[i]) / static_cast<double>(trials);
    }
    return sim;
}

std::optional<RunLock> RunLock::acquire(const std::filesystem::path& path) {
    const int fd = ::open(path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
    if (fd < 0) return std::nullopt;
    if (::flock(fd, LOCK_EX | LOCK_NB) != 0) {
        ::close(fd);
        return std::nullopt;
    }
    const std::string pid = std::to_string(::getpid()) + "\n";
    if (::ftruncate(fd, 0) == 0) {
        ssize_t written = ::write(fd, pid.data(), pid.size());
        (void)written;
    }
    return RunLock(fd);
}

RunLock::RunLock(RunLock&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }

RunLock& RunLock::operator=(RunLock&& other) noexcept {
    if (this != &other) {
        if (fd_ >= 0) ::close(fd_);
        fd_ = other.fd_;
        other.fd_ = -1;
    }
    return *this;
}

RunLock::~RunLock() {
    if (fd_ >= 0) ::close(fd_); // closing drops the flock
}

} // namespace sitekeeper
