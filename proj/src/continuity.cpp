#include "sitekeeper/continuity.hpp"

#include <fstream>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sitekeeper/timeutil.hpp"

namespace sitekeeper {

using json = nlohmann::json;

void ContinuityPolicy::validate() const {
    if (expected_cadence <= Duration::zero())
        throw std::invalid_argument("continuity: expected_cadence must be > 0");
    if (warn_after <= expected_cadence)
        throw std::invalid_argument("continuity: warn_after must exceed expected_cadence");
    if (alarm_margin >= platform_disable_after)
        throw std::invalid_argument("continuity: alarm_margin must be below platform_disable_after");
}

const char* to_string(ContinuityStatus::Kind k) {
    switch (k) {
    case ContinuityStatus::Kind::Healthy: return "healthy";
    case ContinuityStatus::Kind::Stale: return "stale";
    case ContinuityStatus::Kind::AtRisk: return "at_risk";
    case ContinuityStatus::Kind::Lapsed: return "lapsed";
    }
    return "lapsed";
}

int exit_code_for(ContinuityStatus::Kind k) {
    switch (k) {
    case ContinuityStatus::Kind::Healthy: return 0;
    case ContinuityStatus::Kind::Stale: return 1;
    case ContinuityStatus::Kind::AtRisk: return 2;
    case ContinuityStatus::Kind::Lapsed: return 3;
    }
    return 3;
}

ContinuityStatus check(TimePoint now, const StoreSnapshot& store, const ContinuityPolicy& policy) {
    policy.validate();
    ContinuityStatus status;

    std::optional<TimePoint> latest;
    for (const auto& entry : store.ledger) {
        if (!latest || entry.started_at > *latest) latest = entry.started_at;
    }
    if (!latest) {
        status.kind = ContinuityStatus::Kind::Lapsed; // never ran: unbounded gap
        return status;
    }

    const Duration gap = now - *latest;
    status.last_run_at = latest;
    status.gap = gap;

    if (gap >= policy.platform_disable_after) {
        status.kind = ContinuityStatus::Kind::Lapsed;
    } else if (gap >= policy.platform_disable_after - policy.alarm_margin) {
        status.kind = ContinuityStatus::Kind::AtRisk;
        status.until_disable = policy.platform_disable_after - gap;
    } else if (gap >= policy.warn_after) {
        status.kind = ContinuityStatus::Kind::Stale;
        const auto missed = gap / policy.expected_cadence; // integer division
        status.missed_runs = missed > 0 ? static_cast<std::uint64_t>(missed) - 1 : 0;
    } else {
        status.kind = ContinuityStatus::Kind::Healthy;
    }
    return status;
}

void record_heartbeat(TimePoint now, StoreSnapshot& store) {
    RunLedgerEntry entry;
    entry.run_id = store.next_run_id();
    entry.kind = RunKind::Heartbeat;
    entry.started_at = floor_seconds(now);
    store.ledger.push_back(std::move(entry));
}

namespace {

json alert_json(const ContinuityStatus& status) {
    json j{{"alert", "continuity"},
           {"status", to_string(status.kind)},
           {"gap_seconds",
            status.gap ? json(duration_seconds(*status.gap)) : json(nullptr)},
           {"last_run_at",
            status.last_run_at ? json(format_rfc3339(*status.last_run_at)) : json(nullptr)},
           {"exit_code", exit_code_for(status.kind)}};
    if (status.kind == ContinuityStatus::Kind::AtRisk) {
        j["days_until_disable"] = duration_seconds(status.until_disable) / 86400.0;
    } else {
        j["days_until_disable"] = nullptr;
    }
    if (status.kind == ContinuityStatus::Kind::Stale) j["missed_runs"] = status.missed_runs;
    return j;
}

} // namespace

bool emit_alert(const ContinuityStatus& status, const AlertSinks& sinks) {
    if (status.kind == ContinuityStatus::Kind::Healthy)
        throw std::invalid_argument("emit_alert: status is Healthy, nothing to alert");

    const std::string line = alert_json(status).dump();
    bool all_ok = true;
    if (sinks.stream) {
        (*sinks.stream) << line << '\n';
        if (!sinks.stream->good()) all_ok = false;
    }
    if (sinks.file) {
        std::ofstream out(*sinks.file, std::ios::app);
        if (!out.is_open()) {
            all_ok = false;
        } else {
            out << line << '\n';
            if (!out.good()) all_ok = false;
        }
    }
    return all_ok;
}

} // namespace sitekeeper
