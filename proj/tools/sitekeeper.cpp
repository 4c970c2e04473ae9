#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sitekeeper/change_detect.hpp"
#include "sitekeeper/config.hpp"
#include "sitekeeper/continuity.hpp"
#include "sitekeeper/discovery.hpp"
#include "sitekeeper/http_fetcher.hpp"
#include "sitekeeper/random.hpp"
#include "sitekeeper/scheduler.hpp"
#include "sitekeeper/state_store.hpp"
#include "sitekeeper/timeutil.hpp"

namespace {

using json = nlohmann::json;
using namespace sitekeeper;

// 0 success/Healthy; 1 Stale; 2 AtRisk; 3 Lapsed; 4 usage; 5 seed
// unreachable; 6 already running; 7 corrupt store; 70 internal.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 4;
constexpr int kExitSeedUnreachable = 5;
constexpr int kExitAlreadyRunning = 6;
constexpr int kExitCorruptStore = 7;
constexpr int kExitInternal = 70;

constexpr int kJsonSchema = 1;

void print_json_line(const json& j) { std::cout << j.dump() << "\n"; }

HttpFetcher::Options fetcher_options(const Config& config) {
    HttpFetcher::Options options;
    options.user_agent = config.user_agent;
    options.politeness_delay = config.politeness_delay;
    options.timeout = config.fetch_timeout;
    return options;
}

DiscoverOptions discover_options(const Config& config) {
    DiscoverOptions options;
    options.respect_robots = config.respect_robots;
    options.concurrency = config.concurrency;
    return options;
}

void report_discovery_noise(const DiscoveryResult& result, const CrawlPolicy& policy) {
    for (const auto& url : result.robots_flagged)
        std::cerr << "warning: robots.txt disallows " << url.str() << "\n";
    for (const auto& failure : result.failures)
        std::cerr << "warning: fetch failed for " << failure.url.str() << ": " << failure.cause
                  << "\n";
    if (result.truncated)
        std::cerr << "warning: discovery stopped at max_pages=" << policy.max_pages
                  << " before exhausting the frontier\n";
}

struct DiscoveryCounts {
    std::size_t pages = 0;
    std::size_t media = 0;
};

DiscoveryCounts count_classes(const DiscoveredSet& set) {
    DiscoveryCounts counts;
    for (const auto& [url, link_class] : set.entries()) {
        if (link_class == LinkClass::Media) ++counts.media;
        else ++counts.pages;
    }
    return counts;
}

void persist_discovery(StoreSnapshot& store, const DiscoveredSet& set, TimePoint now) {
    for (const auto& [url, link_class] : set.entries()) store.upsert(url, link_class, now);
}

int cmd_discover(const Config& config, bool json_output) {
    const NormalizedUrl seed = config.require_seed();
    const CrawlPolicy policy = config.crawl_policy();
    SystemClock clock;
    HttpFetcher fetcher(fetcher_options(config), clock);

    const DiscoveryResult result = discover(seed, fetcher, policy, clock, discover_options(config));
    report_discovery_noise(result, policy);

    StoreSnapshot store = load_store(config.state_path);
    persist_discovery(store, result.set, clock.now());
    save_store(store, config.state_path);

    const DiscoveryCounts counts = count_classes(result.set);
    std::printf("pages: %zu, media: %zu, excluded: %zu, external: %zu\n", counts.pages,
                counts.media, result.excluded_seen, result.external_seen);
    std::printf("%zu urls recorded in %s\n", result.set.size(),
                config.state_path.string().c_str());

    if (json_output) {
        print_json_line(json{{"schema", kJsonSchema},
                             {"command", "discover"},
                             {"pages", counts.pages},
                             {"media", counts.media},
                             {"excluded", result.excluded_seen},
                             {"external", result.external_seen},
                             {"truncated", result.truncated},
                             {"failures", result.failures.size()},
                             {"elapsed_seconds", duration_seconds(result.elapsed)},
                             {"state", config.state_path.string()}});
    }
    return kExitOk;
}

int cmd_run(const Config& config, bool json_output) {
    const NormalizedUrl seed = config.require_seed();
    const CrawlPolicy policy = config.crawl_policy();

    auto lock = RunLock::acquire(config.lock_path);
    if (!lock) {
        std::cerr << "error: another run holds the lock at " << config.lock_path.string() << "\n";
        return kExitAlreadyRunning;
    }

    SystemClock clock;
    const TimePoint run_started = clock.now();
    RunBudget budget;
    budget.cutoff = config.cutoff;
    budget.started_at = run_started; // discovery is charged against the budget
    budget.validate();

    HttpFetcher fetcher(fetcher_options(config), clock);
    const DiscoveryResult discovery =
        discover(seed, fetcher, policy, clock, discover_options(config));
    report_discovery_noise(discovery, policy);

    StoreSnapshot store = load_store(config.state_path);
    persist_discovery(store, discovery.set, clock.now());

    HttpArchiveClient::Options client_options;
    client_options.endpoint_base = config.endpoint_base;
    client_options.user_agent = config.user_agent;
    client_options.timeout = config.submission_timeout;
    HttpArchiveClient client(std::move(client_options));

    RunReport report;
    if (!discovery.set.empty()) {
        if (config.mode == "proactive") {
            ProactiveOptions options;
            options.pacing = config.pacing;
            options.volatile_patterns = config.effective_volatile_patterns();
            options.rng_seed = config.rng_seed;
            report = proactive_pass(discovery.set, fetcher, store, client, budget, clock, options);
        } else {
            const auto links = shuffle(discovery.set, config.rng_seed);
            report = run_submissions(links, client, budget, clock, config.pacing);
            for (const auto& entry : report.per_link)
                record_submission(store, entry.url, entry.outcome, entry.at);
        }
    }

    RunLedgerEntry entry;
    entry.run_id = store.next_run_id();
    entry.kind = RunKind::Productive;
    entry.started_at = floor_seconds(run_started);
    entry.wall_duration = clock.now() - run_started;
    entry.in_budget_duration = report.elapsed;
    entry.attempted = report.attempted;
    entry.accepted = report.accepted;
    entry.errors = report.errors();
    entry.stopped_by = to_string(report.stopped_by);
    store.ledger.push_back(entry);
    save_store(store, config.state_path);

    std::printf("attempted: %zu, accepted: %zu, connection errors: %zu, rate limited: %zu, "
                "other failures: %zu\n",
                report.attempted, report.accepted, report.connection_errors, report.rate_limited,
                report.other_failures);
    if (config.mode == "proactive")
        std::printf("skipped unchanged: %zu\n", report.skipped_unchanged);
    std::printf("stopped by: %s, elapsed: %s\n", to_string(report.stopped_by),
                format_duration(report.elapsed).c_str());
    std::printf("run %llu recorded in %s\n", static_cast<unsigned long long>(entry.run_id),
                config.state_path.string().c_str());

    if (json_output) {
        print_json_line(json{{"schema", kJsonSchema},
                             {"command", "run"},
                             {"mode", config.mode},
                             {"run_id", entry.run_id},
                             {"attempted", report.attempted},
                             {"accepted", report.accepted},
                             {"connection_errors", report.connection_errors},
                             {"rate_limited", report.rate_limited},
                             {"other_failures", report.other_failures},
                             {"skipped_unchanged", report.skipped_unchanged},
                             {"stopped_by", to_string(report.stopped_by)},
                             {"budget_exhausted", report.stopped_by == StopReason::BudgetExhausted},
                             {"elapsed_seconds", duration_seconds(report.elapsed)},
                             {"wall_seconds", duration_seconds(entry.wall_duration)}});
    }
    return kExitOk;
}

json continuity_json(const ContinuityStatus& status) {
    json j{{"status", to_string(status.kind)},
           {"exit_code", exit_code_for(status.kind)},
           {"gap_seconds", status.gap ? json(duration_seconds(*status.gap)) : json(nullptr)},
           {"last_run_at",
            status.last_run_at ? json(format_rfc3339(*status.last_run_at)) : json(nullptr)}};
    if (status.kind == ContinuityStatus::Kind::Stale) j["missed_runs"] = status.missed_runs;
    if (status.kind == ContinuityStatus::Kind::AtRisk)
        j["days_until_disable"] = duration_seconds(status.until_disable) / 86400.0;
    return j;
}

int cmd_status(const Config& config, bool json_output) {
    const StoreSnapshot store = load_store(config.state_path);
    const AggregateStats stats = aggregate_stats(store);
    SystemClock clock;
    const ContinuityStatus status = check(clock.now(), store, config.continuity_policy());

    std::printf("total runs: %llu, heartbeats: %llu\n",
                static_cast<unsigned long long>(stats.total_runs),
                static_cast<unsigned long long>(stats.heartbeats));
    std::printf("total hours: %.1f, mean run hours: %.2f, in-budget hours: %.1f\n",
                stats.total_wall_hours, stats.mean_run_hours, stats.total_in_budget_hours);
    std::printf("submissions: attempted %llu, accepted %llu\n",
                static_cast<unsigned long long>(stats.total_attempted),
                static_cast<unsigned long long>(stats.total_accepted));
    std::string classes;
    for (const auto& [name, count] : stats.per_class)
        classes += (classes.empty() ? "" : ", ") + std::string(name) + " " + std::to_string(count);
    std::printf("urls: %s\n", classes.empty() ? "none" : classes.c_str());
    std::printf("redundancy: never %llu, 1-9 %llu, 10-49 %llu, 50+ %llu\n",
                static_cast<unsigned long long>(stats.redundancy[0]),
                static_cast<unsigned long long>(stats.redundancy[1]),
                static_cast<unsigned long long>(stats.redundancy[2]),
                static_cast<unsigned long long>(stats.redundancy[3]));

    if (status.gap) {
        std::printf("continuity: %s (last run %s ago)\n", to_string(status.kind),
                    format_duration(*status.gap).c_str());
    } else {
        std::printf("continuity: %s (never ran)\n", to_string(status.kind));
    }

    if (status.kind != ContinuityStatus::Kind::Healthy) {
        AlertSinks sinks;
        sinks.stream = &std::cerr;
        sinks.file = config.alert_file;
        emit_alert(status, sinks);
    }

    if (json_output) {
        print_json_line(json{{"schema", kJsonSchema},
                             {"command", "status"},
                             {"total_runs", stats.total_runs},
                             {"heartbeats", stats.heartbeats},
                             {"total_wall_hours", stats.total_wall_hours},
                             {"mean_run_hours", stats.mean_run_hours},
                             {"total_in_budget_hours", stats.total_in_budget_hours},
                             {"attempted", stats.total_attempted},
                             {"accepted", stats.total_accepted},
                             {"per_class", stats.per_class},
                             {"redundancy",
                              {{"0", stats.redundancy[0]},
                               {"1-9", stats.redundancy[1]},
                               {"10-49", stats.redundancy[2]},
                               {"50+", stats.redundancy[3]}}},
                             {"continuity", continuity_json(status)}});
    }
    return exit_code_for(status.kind);
}

int cmd_heartbeat(const Config& config, bool json_output) {
    StoreSnapshot store = load_store(config.state_path);
    SystemClock clock;
    record_heartbeat(clock.now(), store);
    save_store(store, config.state_path);
    const RunLedgerEntry& entry = store.ledger.back();
    std::printf("heartbeat recorded (run %llu at %s)\n",
                static_cast<unsigned long long>(entry.run_id),
                format_rfc3339(entry.started_at).c_str());
    if (json_output) {
        print_json_line(json{{"schema", kJsonSchema},
                             {"command", "heartbeat"},
                             {"run_id", entry.run_id},
                             {"at", format_rfc3339(entry.started_at)}});
    }
    return kExitOk;
}

int cmd_simulate(const Config& config, bool json_output, std::size_t n, std::size_t c,
                 std::size_t r, std::size_t trials, bool fixed_order) {
    CoverageParams params;
    params.n_links = n;
    params.per_run_capacity = c;
    params.n_runs = r;
    params.validate();

    const double analytic = coverage_probability(params);
    const std::uint64_t seed = config.rng_seed ? *config.rng_seed : Rng().below(1ull << 62);
    const SubmissionOrder order =
        fixed_order ? SubmissionOrder::FixedOrder : SubmissionOrder::Shuffled;
    const CoverageSimulation sim = simulate_coverage(params, trials, seed, order);

    double min_cov = 1.0, max_cov = 0.0, sum_cov = 0.0, sum_subs = 0.0;
    for (std::size_t i = 0; i < sim.coverage.size(); ++i) {
        min_cov = std::min(min_cov, sim.coverage[i]);
        max_cov = std::max(max_cov, sim.coverage[i]);
        sum_cov += sim.coverage[i];
        sum_subs += sim.mean_submissions[i];
    }
    const double mean_cov = sum_cov / static_cast<double>(n);
    const double mean_subs = sum_subs / static_cast<double>(n);
    const double expected_subs = static_cast<double>(r * c) / static_cast<double>(n);

    std::printf("N=%zu C=%zu R=%zu trials=%zu order=%s\n", n, c, r, trials,
                fixed_order ? "fixed" : "shuffled");
    std::printf("analytic coverage: %.6f\n", analytic);
    std::printf("empirical coverage: min %.4f, mean %.4f, max %.4f\n", min_cov, mean_cov, max_cov);
    std::printf("mean submissions per link: %.3f (expected %.3f)\n", mean_subs, expected_subs);

    if (json_output) {
        print_json_line(json{{"schema", kJsonSchema},
                             {"command", "simulate"},
                             {"n", n},
                             {"c", c},
                             {"r", r},
                             {"trials", trials},
                             {"order", fixed_order ? "fixed" : "shuffled"},
                             {"analytic", analytic},
                             {"empirical_min", min_cov},
                             {"empirical_mean", mean_cov},
                             {"empirical_max", max_cov},
                             {"mean_submissions", mean_subs},
                             {"expected_mean_submissions", expected_subs}});
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sitekeeper: proactive website archiving under a runtime budget"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string state_path;
    std::string endpoint;
    std::string mode;
    std::string cutoff;
    std::uint64_t seed_rng = 0;
    bool json_output = false;
    bool respect_robots = false;

    app.add_option("--config", config_path, "Config file (key = value lines)");
    app.add_option("--state", state_path, "State store path");
    app.add_option("--endpoint", endpoint, "Save endpoint base URL");
    app.add_option("--mode", mode, "blind | proactive")
        ->check(CLI::IsMember({"blind", "proactive"}));
    app.add_option("--cutoff", cutoff, "Runtime budget, e.g. 3h55m");
    auto* seed_rng_opt = app.add_option("--seed-rng", seed_rng, "Fix the shuffle RNG seed");
    app.add_flag("--json", json_output, "End output with a machine-readable JSON line");
    auto* robots_flag = app.add_flag("--respect-robots", respect_robots,
                                     "Enforce robots.txt instead of warning");

    auto* discover_cmd = app.add_subcommand("discover", "Crawl internal links; update the store");
    auto* run_cmd = app.add_subcommand("run", "Discover, shuffle, and submit under the budget");
    auto* status_cmd = app.add_subcommand("status", "Aggregate stats and continuity check");
    auto* heartbeat_cmd = app.add_subcommand("heartbeat", "Record a zero-work liveness entry");
    auto* simulate_cmd = app.add_subcommand("simulate", "Coverage model: analytic vs Monte Carlo");

    std::size_t sim_n = 100, sim_c = 40, sim_r = 6, sim_trials = 10000;
    bool sim_fixed = false;
    simulate_cmd->add_option("--n", sim_n, "Number of links N");
    simulate_cmd->add_option("--c", sim_c, "Per-run capacity C");
    simulate_cmd->add_option("--r", sim_r, "Number of runs R");
    simulate_cmd->add_option("--trials", sim_trials, "Monte Carlo trials");
    simulate_cmd->add_flag("--fixed-order", sim_fixed, "Disable the shuffle (baseline)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        FlagOverrides flags;
        if (!state_path.empty()) flags.state = state_path;
        if (!endpoint.empty()) flags.endpoint = endpoint;
        if (!mode.empty()) flags.mode = mode;
        if (!cutoff.empty()) flags.cutoff = cutoff;
        if (seed_rng_opt->count() > 0) flags.seed_rng = seed_rng;
        if (robots_flag->count() > 0) flags.respect_robots = true;

        std::optional<std::filesystem::path> config_file;
        if (!config_path.empty()) config_file = config_path;
        const Config config = build_config(
            config_file, [](const char* name) { return std::getenv(name); }, flags);

        if (discover_cmd->parsed()) return cmd_discover(config, json_output);
        if (run_cmd->parsed()) return cmd_run(config, json_output);
        if (status_cmd->parsed()) return cmd_status(config, json_output);
        if (heartbeat_cmd->parsed()) return cmd_heartbeat(config, json_output);
        if (simulate_cmd->parsed())
            return cmd_simulate(config, json_output, sim_n, sim_c, sim_r, sim_trials, sim_fixed);
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const SeedUnreachable& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSeedUnreachable;
    } catch (const StoreError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind == StoreError::Kind::Corrupt ? kExitCorruptStore : kExitInternal;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    }
}
