#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sitekeeper/archive_client.hpp"
#include "sitekeeper/change_detect.hpp"
#include "sitekeeper/clock.hpp"
#include "sitekeeper/continuity.hpp"
#include "sitekeeper/scheduler.hpp"
#include "sitekeeper/url.hpp"

namespace sitekeeper {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Flat key=value file; '#' comments; lists comma-separated except
// volatile_pattern, which repeats one regex per line. Precedence:
// flag > environment (SITEKEEPER_<KEY>) > file > default.
struct Config {
    std::string seed_url;
    std::vector<std::string> internal_hosts;
    std::string endpoint_base = kDefaultEndpointBase;
    Duration cutoff = kDefaultCutoff;
    Duration pacing = kDefaultPacing;
    std::string mode = "blind"; // blind | proactive
    std::filesystem::path state_path = "sitekeeper.state";
    std::filesystem::path lock_path = "sitekeeper.lock";

    std::vector<std::string> media_path_markers = {"/wp-content/"};
    std::vector<std::string> media_extensions = {"jpg",  "jpeg", "png",  "gif", "webp", "pdf",
                                                 "doc",  "docx", "ppt",  "pptx", "mp4"};
    std::vector<std::string> excluded_extensions = {"css", "js", "mjs", "map"};
    std::size_t max_pages = 50000;
    Duration politeness_delay = std::chrono::seconds(1);
    bool respect_robots = false;
    int concurrency = 1;
    std::string user_agent = kDefaultUserAgent;
    Duration fetch_timeout = std::chrono::seconds(30);
    Duration submission_timeout = std::chrono::seconds(120);

    Duration expected_cadence = std::chrono::hours(4);
    Duration warn_after = std::chrono::hours(12);
    Duration platform_disable_after = std::chrono::hours(24) * 60;
    Duration alarm_margin = std::chrono::hours(24) * 7;

    std::optional<std::uint64_t> rng_seed;
    std::vector<std::string> volatile_patterns; // empty -> defaults
    std::optional<std::filesystem::path> alert_file;

    CrawlPolicy crawl_policy() const;
    ContinuityPolicy continuity_policy() const;
    std::vector<std::string> effective_volatile_patterns() const;

    void validate() const;          // cross-field checks (no seed needed)
    NormalizedUrl require_seed() const; // parsed seed or ConfigError
};

// Applies one key=value pair; throws ConfigError on unknown keys/bad values.
void apply_config_key(Config& config, const std::string& key, const std::string& value);

void apply_config_file(Config& config, const std::filesystem::path& path);

using EnvGetter = std::function<const char*(const char*)>;

// Reads SITEKEEPER_<KEY> for every scalar/list key (volatile_pattern excluded).
void apply_env(Config& config, const EnvGetter& getenv_fn);

// The spec'd global flags, already parsed by the CLI layer.
struct FlagOverrides {
    std::optional<std::string> state;
    std::optional<std::string> endpoint;
    std::optional<std::string> mode;
    std::optional<std::string> cutoff;
    std::optional<std::uint64_t> seed_rng;
    std::optional<bool> respect_robots;
};

void apply_flags(Config& config, const FlagOverrides& flags);

Config build_config(const std::optional<std::filesystem::path>& config_file,
                    const EnvGetter& getenv_fn, const FlagOverrides& flags);

} // namespace sitekeeper
