#include "sitekeeper/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "sitekeeper/timeutil.hpp"

namespace sitekeeper {
namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= value.size()) {
        std::size_t comma = value.find(',', pos);
        if (comma == std::string::npos) comma = value.size();
        std::string item = trim(std::string_view(value).substr(pos, comma - pos));
        if (!item.empty()) out.push_back(std::move(item));
        pos = comma + 1;
    }
    return out;
}

bool parse_bool(const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw ConfigError("not a boolean: '" + value + "'");
}

Duration parse_duration_or_fail(const std::string& key, const std::string& value) {
    try {
        return parse_duration(value);
    } catch (const std::exception& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const std::uint64_t n = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return n;
    } catch (const std::exception&) {
        throw ConfigError(key + ": not an unsigned integer: '" + value + "'");
    }
}

} // namespace

CrawlPolicy Config::crawl_policy() const {
    CrawlPolicy policy;
    policy.internal_hosts = {internal_hosts.begin(), internal_hosts.end()};
    policy.media_path_markers = media_path_markers;
    policy.media_extensions = {media_extensions.begin(), media_extensions.end()};
    policy.excluded_extensions = {excluded_extensions.begin(), excluded_extensions.end()};
    policy.max_pages = max_pages;
    policy.politeness_delay = politeness_delay;
    return policy;
}

ContinuityPolicy Config::continuity_policy() const {
    ContinuityPolicy policy;
    policy.expected_cadence = expected_cadence;
    policy.warn_after = warn_after;
    policy.platform_disable_after = platform_disable_after;
    policy.alarm_margin = alarm_margin;
    return policy;
}

std::vector<std::string> Config::effective_volatile_patterns() const {
    return volatile_patterns.empty() ? default_volatile_patterns() : volatile_patterns;
}

void Config::validate() const {
    if (mode != "blind" && mode != "proactive")
        throw ConfigError("mode must be 'blind' or 'proactive', got '" + mode + "'");
    if (cutoff < Duration::zero() || cutoff > std::chrono::hours(6))
        throw ConfigError("cutoff must be in [0, 6h]");
    if (pacing < Duration::zero()) throw ConfigError("pacing must be >= 0");
    if (max_pages == 0) throw ConfigError("max_pages must be positive");
    if (concurrency < 1) throw ConfigError("concurrency must be >= 1");
    try {
        continuity_policy().validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    if (!internal_hosts.empty()) {
        try {
            crawl_policy().validate();
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
    }
}

NormalizedUrl Config::require_seed() const {
    if (seed_url.empty()) throw ConfigError("seed_url is required for this command");
    auto seed = parse_absolute(seed_url);
    if (!seed) throw ConfigError("seed_url is not an absolute http(s) URL: " + seed_url);
    if (internal_hosts.empty())
        throw ConfigError("internal_hosts is required (at least the seed host)");
    return *seed;
}

void apply_config_key(Config& config, const std::string& key, const std::string& value) {
    if (key == "seed_url") config.seed_url = value;
    else if (key == "internal_hosts") config.internal_hosts = split_list(value);
    else if (key == "endpoint_base") config.endpoint_base = value;
    else if (key == "cutoff") config.cutoff = parse_duration_or_fail(key, value);
    else if (key == "pacing") config.pacing = parse_duration_or_fail(key, value);
    else if (key == "mode") config.mode = value;
    else if (key == "state_path") config.state_path = value;
    else if (key == "lock_path") config.lock_path = value;
    else if (key == "media_path_markers") config.media_path_markers = split_list(value);
    else if (key == "media_extensions") config.media_extensions = split_list(value);
    else if (key == "excluded_extensions") config.excluded_extensions = split_list(value);
    else if (key == "max_pages") config.max_pages = static_cast<std::size_t>(parse_u64(key, value));
    else if (key == "politeness_delay") config.politeness_delay = parse_duration_or_fail(key, value);
    else if (key == "respect_robots") config.respect_robots = parse_bool(value);
    else if (key == "concurrency") config.concurrency = static_cast<int>(parse_u64(key, value));
    else if (key == "user_agent") config.user_agent = value;
    else if (key == "fetch_timeout") config.fetch_timeout = parse_duration_or_fail(key, value);
    else if (key == "submission_timeout")
        config.submission_timeout = parse_duration_or_fail(key, value);
    else if (key == "expected_cadence") config.expected_cadence = parse_duration_or_fail(key, value);
    else if (key == "warn_after") config.warn_after = parse_duration_or_fail(key, value);
    else if (key == "platform_disable_after")
        config.platform_disable_after = parse_duration_or_fail(key, value);
    else if (key == "alarm_margin") config.alarm_margin = parse_duration_or_fail(key, value);
    else if (key == "rng_seed") config.rng_seed = parse_u64(key, value);
    else if (key == "volatile_pattern") config.volatile_patterns.push_back(value);
    else if (key == "alert_file") config.alert_file = value;
    else throw ConfigError("unknown config key: '" + key + "'");
}

void apply_config_file(Config& config, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in.is_open()) throw ConfigError("cannot open config file: " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const std::size_t hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string trimmed = trim(line);
        if (trimmed.empty()) continue;
        const std::size_t eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                              ": expected 'key = value'");
        const std::string key = trim(std::string_view(trimmed).substr(0, eq));
        const std::string value = trim(std::string_view(trimmed).substr(eq + 1));
        try {
            apply_config_key(config, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

void apply_env(Config& config, const EnvGetter& getenv_fn) {
    static const char* keys[] = {
        "seed_url",         "internal_hosts",  "endpoint_base",
        "cutoff",           "pacing",          "mode",
        "state_path",       "lock_path",       "media_path_markers",
        "media_extensions", "excluded_extensions", "max_pages",
        "politeness_delay", "respect_robots",  "concurrency",
        "user_agent",       "fetch_timeout",   "submission_timeout",
        "expected_cadence", "warn_after",      "platform_disable_after",
        "alarm_margin",     "rng_seed",        "alert_file",
    };
    for (const char* key : keys) {
        std::string env_name = "SITEKEEPER_";
        for (const char* p = key; *p; ++p)
            env_name += static_cast<char>(std::toupper(static_cast<unsigned char>(*p)));
        if (const char* value = getenv_fn(env_name.c_str()); value && *value) {
            try {
                apply_config_key(config, key, value);
            } catch (const ConfigError& e) {
                throw ConfigError(env_name + ": " + e.what());
            }
        }
    }
}

void apply_flags(Config& config, const FlagOverrides& flags) {
    if (flags.state) config.state_path = *flags.state;
    if (flags.endpoint) config.endpoint_base = *flags.endpoint;
    if (flags.mode) config.mode = *flags.mode;
    if (flags.cutoff) config.cutoff = parse_duration_or_fail("cutoff", *flags.cutoff);
    if (flags.seed_rng) config.rng_seed = *flags.seed_rng;
    if (flags.respect_robots) config.respect_robots = *flags.respect_robots;
}

Config build_config(const std::optional<std::filesystem::path>& config_file,
                    const EnvGetter& getenv_fn, const FlagOverrides& flags) {
    Config config;
    if (config_file) apply_config_file(config, *config_file);
    apply_env(config, getenv_fn);
    apply_flags(config, flags);
    config.validate();
    return config;
}

} // namespace sitekeeper
