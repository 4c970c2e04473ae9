#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sitekeeper/archive_client.hpp"
#include "sitekeeper/clock.hpp"
#include "sitekeeper/url.hpp"

namespace sitekeeper {

inline constexpr int kStoreSchemaVersion = 1;
inline constexpr const char* kDigestAlgorithm = "sha-256";

// Persistent per-URL history. submit_count counts Accepted outcomes only;
// everything else lands in the per-outcome error tally.
struct UrlRecord {
    NormalizedUrl url;
    LinkClass link_class = LinkClass::Page;
    TimePoint first_seen{};
    std::optional<TimePoint> last_submitted;
    std::uint64_t submit_count = 0;
    std::optional<std::string> last_digest;
    std::string digest_algorithm = kDigestAlgorithm;
    std::map<std::string, std::uint64_t> error_tally;

    bool operator==(const UrlRecord&) const = default;
};

enum class RunKind { Productive, Heartbeat };

struct RunLedgerEntry {
    std::uint64_t run_id = 0;
    RunKind kind = RunKind::Productive;
    TimePoint started_at{};
    Duration wall_duration{};
    Duration in_budget_duration{};
    std::uint64_t attempted = 0;
    std::uint64_t accepted = 0;
    std::uint64_t errors = 0;
    std::string stopped_by; // "list_exhausted" | "budget_exhausted" | "" for heartbeats

    bool operator==(const RunLedgerEntry&) const = default;
};

struct StoreSnapshot {
    int schema_version = kStoreSchemaVersion;
    std::map<std::string, UrlRecord> records; // keyed by url text
    std::vector<RunLedgerEntry> ledger;

    UrlRecord& upsert(const NormalizedUrl& url, LinkClass c, TimePoint first_seen);
    const UrlRecord* find(const NormalizedUrl& url) const;
    std::uint64_t next_run_id() const;

    bool operator==(const StoreSnapshot&) const = default;
};

class StoreError : public std::runtime_error {
public:
    enum class Kind { Corrupt, Io, UnknownUrl };

    StoreError(Kind kind, std::string message, std::size_t line = 0, std::size_t byte_offset = 0)
        : std::runtime_error(std::move(message)), kind(kind), line(line),
          byte_offset(byte_offset) {}

    Kind kind;
    std::size_t line;        // 1-based line of the parse failure
    std::size_t byte_offset; // offset of that line's first byte
};

// Line-oriented store: UTF-8, LF, one JSON object per line. First line is the
// header, then url records, then ledger entries, each tagged by "kind".
// An absent file loads as an empty snapshot.
StoreSnapshot load_store(const std::filesystem::path& path);

// Atomic: write temp file in the same directory, fsync, rename over path.
// before_rename is a crash-injection point for tests.
void save_store(const StoreSnapshot& snapshot, const std::filesystem::path& path,
                const std::function<void()>& before_rename = {});

// Accepted: bump submit_count, set last_submitted. Anything else: bump the
// outcome's error tally. Throws StoreError{UnknownUrl} if never discovered.
void record_submission(StoreSnapshot& store, const NormalizedUrl& url,
                       const SubmissionOutcome& outcome, TimePoint at);

struct AggregateStats {
    std::uint64_t total_runs = 0; // productive runs only
    std::uint64_t heartbeats = 0;
    double total_wall_hours = 0.0;
    double total_in_budget_hours = 0.0;
    double mean_run_hours = 0.0;
    std::uint64_t total_attempted = 0;
    std::uint64_t total_accepted = 0;
    std::map<std::string, std::uint64_t> per_class; // "page" -> n, ...
    // submit_count buckets: [0], [1,9], [10,49], [50,inf)
    std::array<std::uint64_t, 4> redundancy{};
};

AggregateStats aggregate_stats(const StoreSnapshot& store);

} // namespace sitekeeper
