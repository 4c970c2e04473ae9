#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "sitekeeper/clock.hpp"
#include "sitekeeper/state_store.hpp"

namespace sitekeeper {

// Thresholds for deciding whether the preservation process itself is alive.
// The 60-day default is the platform rule that silently disables scheduled
// workflows in inactive public repositories.
struct ContinuityPolicy {
    Duration expected_cadence = std::chrono::hours(4); // 24 h / 6 runs
    Duration warn_after = std::chrono::hours(12);      // 3 x cadence
    Duration platform_disable_after = std::chrono::hours(24) * 60;
    Duration alarm_margin = std::chrono::hours(24) * 7;

    void validate() const; // warn_after > cadence; margin < disable threshold
};

struct ContinuityStatus {
    enum class Kind { Healthy, Stale, AtRisk, Lapsed };

    Kind kind = Kind::Lapsed;
    std::optional<TimePoint> last_run_at;  // nullopt: never ran
    std::optional<Duration> gap;           // nullopt: unbounded (empty ledger)
    std::uint64_t missed_runs = 0;         // Stale
    Duration until_disable{};              // AtRisk
};

const char* to_string(ContinuityStatus::Kind k);

// Healthy=0, Stale=1, AtRisk=2, Lapsed=3 so cron wrappers can act on it.
int exit_code_for(ContinuityStatus::Kind k);

// gap = now - latest ledger entry (heartbeats count as runs).
ContinuityStatus check(TimePoint now, const StoreSnapshot& store, const ContinuityPolicy& policy);

// Zero-work ledger entry proving liveness; liveness != productivity.
void record_heartbeat(TimePoint now, StoreSnapshot& store);

struct AlertSinks {
    std::ostream* stream = nullptr; // usually stderr
    std::optional<std::filesystem::path> file;
};

// Writes a one-line JSON alert to each sink; a failing sink does not stop
// the others. Returns false if any sink failed. Throws std::invalid_argument
// for a Healthy status (caller bug, mapped to a usage error by the CLI).
bool emit_alert(const ContinuityStatus& status, const AlertSinks& sinks);

} // namespace sitekeeper
