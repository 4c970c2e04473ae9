#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "sitekeeper/random.hpp"
#include "sitekeeper/scheduler.hpp"
#include "support/fake_clock.hpp"
#include "support/scripted.hpp"
#include "support/temp_dir.hpp"

using namespace sitekeeper;
using namespace sitekeeper::test;
using namespace std::chrono_literals;

namespace {

DiscoveredSet set_of(std::size_t n) {
    const auto seed = *parse_absolute("https://s.test/");
    DiscoveredSet set(seed, {});
    for (std::size_t i = 0; i < n; ++i)
        set.add(*parse_absolute("https://s.test/p" + std::to_string(i)), LinkClass::Page);
    return set;
}

RunBudget budget_of(FakeClock& clock, Duration cutoff) {
    RunBudget budget;
    budget.cutoff = cutoff;
    budget.started_at = clock.now();
    return budget;
}

} // namespace

TEST_CASE("shuffle of a single element returns that element") {
    const auto set = set_of(1);
    const auto order = shuffle(set, 123);
    REQUIRE(order.size() == 1);
    CHECK(order[0] == set.entries()[0].first);
}

TEST_CASE("shuffle is reproducible under a fixed seed") {
    const auto small = set_of(3);
    CHECK(shuffle(small, 42) == shuffle(small, 42));
    const auto larger = set_of(32);
    CHECK(shuffle(larger, 42) == shuffle(larger, 42));
    CHECK(shuffle(larger, 42) != shuffle(larger, 43));
}

TEST_CASE("shuffle output is always a permutation") {
    for (const std::size_t n : {1u, 2u, 7u, 64u, 500u}) {
        const auto set = set_of(n);
        auto order = shuffle(set, 99 + n);
        REQUIRE(order.size() == n);
        std::sort(order.begin(), order.end());
        CHECK(std::adjacent_find(order.begin(), order.end()) == order.end());
        for (const auto& [url, link_class] : set.entries())
            CHECK(std::binary_search(order.begin(), order.end(), url));
    }
}

TEST_CASE("shuffle throws on an empty set") {
    DiscoveredSet empty;
    CHECK_THROWS_AS(shuffle(empty, 1), std::invalid_argument);
}

TEST_CASE("unseeded shuffle is uniform over permutations of three elements") {
    const auto set = set_of(3);
    std::map<std::string, int> counts;
    const int trials = 60000;
    for (int i = 0; i < trials; ++i) {
        std::string key;
        for (const auto& url : shuffle(set)) key += url.path;
        ++counts[key];
    }
    REQUIRE(counts.size() == 6);
    for (const auto& [perm, count] : counts) {
        const double freq = static_cast<double>(count) / trials;
        CHECK(freq == doctest::Approx(1.0 / 6.0).epsilon(0.06)); // 1/6 +- 0.01
        CHECK(std::abs(freq - 1.0 / 6.0) < 0.01);
    }
}

TEST_CASE("run_submissions stops by list exhaustion when the budget is generous") {
    FakeClock clock;
    ScriptedClient client(clock, 1s);
    const auto links = shuffle(set_of(5), 1);

    const RunReport report = run_submissions(links, client, budget_of(clock, 10s), clock, 0s);
    CHECK(report.attempted == 5);
    CHECK(report.accepted == 5);
    CHECK(report.stopped_by == StopReason::ListExhausted);
    CHECK(client.submissions.size() == 5);
}

TEST_CASE("run_submissions enforces the budget after each submission") {
    FakeClock clock;
    ScriptedClient client(clock, 1s);
    const auto links = shuffle(set_of(100), 2);

    const RunReport report = run_submissions(links, client, budget_of(clock, 10s), clock, 0s);
    CHECK(report.attempted == 10); // elapsed reaches 10 s exactly at the 10th submission
    CHECK(report.stopped_by == StopReason::BudgetExhausted);
    CHECK(report.per_link.size() == 10);

    SUBCASE("zero cutoff still submits exactly once (post-submission check)") {
        FakeClock clock2;
        ScriptedClient client2(clock2, 1s);
        const RunReport one = run_submissions(links, client2, budget_of(clock2, 0s), clock2, 0s);
        CHECK(one.attempted == 1);
        CHECK(one.stopped_by == StopReason::BudgetExhausted);
    }
}

TEST_CASE("run_submissions continues after connection errors") {
    FakeClock clock;
    ScriptedClient client(clock, 1s);
    client.script({SubmissionOutcome::accepted(),
                   SubmissionOutcome::connection_error("refused"),
                   SubmissionOutcome::accepted()});
    const auto links = shuffle(set_of(3), 3);

    const RunReport report = run_submissions(links, client, budget_of(clock, 1h), clock, 0s);
    CHECK(report.attempted == 3);
    CHECK(report.accepted == 2);
    CHECK(report.connection_errors == 1);
    CHECK(report.stopped_by == StopReason::ListExhausted);
}

TEST_CASE("pacing sleeps between submissions but not after the last") {
    FakeClock clock;
    const auto start = clock.now();
    ScriptedClient client(clock, 1s);
    const auto links = shuffle(set_of(3), 4);

    const RunReport report = run_submissions(links, client, budget_of(clock, 1h), clock, 5s);
    // 3 x 1 s submissions + 2 x 5 s pacing gaps
    CHECK(clock.now() - start == 13s);
    CHECK(report.elapsed == 13s);
}

TEST_CASE("budget hard-stop bound holds for arbitrary latency profiles") {
    Rng rng(2026);
    for (int round = 0; round < 50; ++round) {
        FakeClock clock;
        const Duration cutoff = std::chrono::seconds(1 + rng.below(30));
        const Duration pacing = std::chrono::seconds(rng.below(4));

        // per-submission latencies in [0, 7] s
        class VariableLatencyClient final : public ArchiveClient {
        public:
            VariableLatencyClient(FakeClock& clock, Rng& rng) : clock_(clock), rng_(rng) {}
            SubmissionOutcome submit(const NormalizedUrl&) override {
                const auto latency = std::chrono::seconds(rng_.below(8));
                max_latency = std::max(max_latency, Duration(latency));
                clock_.advance(latency);
                return SubmissionOutcome::accepted();
            }
            FakeClock& clock_;
            Rng& rng_;
            Duration max_latency{};
        };

        VariableLatencyClient client(clock, rng);
        const auto links = shuffle(set_of(40), round + 1);
        const RunReport report = run_submissions(links, client, budget_of(clock, cutoff), clock, pacing);

        CHECK(report.elapsed <= cutoff + client.max_latency + pacing);
        CHECK(report.attempted == report.per_link.size());
        CHECK(report.attempted <= links.size());
        CHECK(report.attempted ==
              report.accepted + report.connection_errors + report.rate_limited +
                  report.other_failures);
    }
}

TEST_CASE("coverage probability matches the closed form") {
    CHECK(coverage_probability({100, 100, 1}) == doctest::Approx(1.0));
    CHECK(coverage_probability({100, 40, 6}) == doctest::Approx(0.953344).epsilon(1e-9));
    CHECK(coverage_probability({2, 1, 2}) == doctest::Approx(0.75));

    CHECK_THROWS_AS(coverage_probability({0, 1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(coverage_probability({10, 11, 1}), std::invalid_argument);
    CHECK_THROWS_AS(coverage_probability({10, 0, 1}), std::invalid_argument);
}

TEST_CASE("Monte Carlo coverage agrees with the analytic model") {
    const CoverageParams params{100, 40, 6};
    const std::size_t trials = 10000;
    const CoverageSimulation sim = simulate_coverage(params, trials, 20260115);
    const double analytic = coverage_probability(params);

    // 3 sigma binomial bound per link
    const double sigma = std::sqrt(analytic * (1 - analytic) / static_cast<double>(trials));
    double min_cov = 1.0, max_cov = 0.0;
    for (std::size_t i = 0; i < 100; ++i) {
        CHECK(sim.coverage[i] == doctest::Approx(analytic).epsilon(0.021));
        CHECK(std::abs(sim.coverage[i] - analytic) < 3.5 * sigma);
        CHECK(sim.mean_submissions[i] == doctest::Approx(2.4).epsilon(0.042)); // 2.4 +- 0.1
        min_cov = std::min(min_cov, sim.coverage[i]);
        max_cov = std::max(max_cov, sim.coverage[i]);
    }
    // fairness: uniform across link indices
    CHECK(max_cov - min_cov < 0.03);
}

TEST_CASE("fixed-order baseline starves the tail of the list") {
    const CoverageParams params{100, 40, 6};
    const CoverageSimulation sim =
        simulate_coverage(params, 200, 7, SubmissionOrder::FixedOrder);
    for (std::size_t i = 0; i < 40; ++i) {
        CHECK(sim.coverage[i] == doctest::Approx(1.0));
        CHECK(sim.mean_submissions[i] == doctest::Approx(6.0));
    }
    for (std::size_t i = 40; i < 100; ++i) {
        CHECK(sim.coverage[i] == doctest::Approx(0.0));
        CHECK(sim.mean_submissions[i] == doctest::Approx(0.0));
    }
}

TEST_CASE("degenerate single-link simulation covers fully") {
    const CoverageSimulation sim = simulate_coverage({1, 1, 1}, 17, 9);
    REQUIRE(sim.coverage.size() == 1);
    CHECK(sim.coverage[0] == doctest::Approx(1.0));
    CHECK(sim.mean_submissions[0] == doctest::Approx(1.0));
}

TEST_CASE("run budget validation") {
    RunBudget budget;
    budget.cutoff = std::chrono::hours(7);
    CHECK_THROWS_AS(budget.validate(), std::invalid_argument);
    budget.cutoff = kDefaultCutoff;
    CHECK_NOTHROW(budget.validate());
    CHECK(kDefaultCutoff == std::chrono::minutes(235)); // 3 h 55 m
}

TEST_CASE("the run lock admits one holder at a time") {
    TempDir dir;
    const auto lock_path = dir / "run.lock";
    auto first = RunLock::acquire(lock_path);
    REQUIRE(first.has_value());
    CHECK_FALSE(RunLock::acquire(lock_path).has_value()); // second holder refused
    first.reset();
    CHECK(RunLock::acquire(lock_path).has_value()); // released on destruction
}
