#include "sitekeeper/state_store.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "sitekeeper/timeutil.hpp"

namespace sitekeeper {

using json = nlohmann::json;

UrlRecord& StoreSnapshot::upsert(const NormalizedUrl& url, LinkClass c, TimePoint first_seen) {
    const std::string key = url.str();
    auto it = records.find(key);
    if (it == records.end()) {
        UrlRecord record;
        record.url = url;
        record.link_class = c;
        record.first_seen = floor_seconds(first_seen);
        it = records.emplace(key, std::move(record)).first;
    }
    return it->second;
}

const UrlRecord* StoreSnapshot::find(const NormalizedUrl& url) const {
    const auto it = records.find(url.str());
    return it == records.end() ? nullptr : &it->second;
}

std::uint64_t StoreSnapshot::next_run_id() const {
    return ledger.empty() ? 1 : ledger.back().run_id + 1;
}

namespace {

json time_to_json(const std::optional<TimePoint>& t) {
    if (!t) return nullptr;
    return format_rfc3339(*t);
}

std::optional<TimePoint> time_from_json(const json& j, const char* field) {
    if (j.is_null()) return std::nullopt;
    auto parsed = parse_rfc3339(j.get<std::string>());
    if (!parsed) throw std::runtime_error(std::string("bad timestamp in ") + field);
    return parsed;
}

json record_to_json(const UrlRecord& r) {
    json errors = json::object();
    for (const auto& [kind, count] : r.error_tally) errors[kind] = count;
    return json{{"kind", "url"},
                {"url", r.url.str()},
                {"class", to_string(r.link_class)},
                {"first_seen", format_rfc3339(r.first_seen)},
                {"last_submitted", time_to_json(r.last_submitted)},
                {"submit_count", r.submit_count},
                {"last_digest", r.last_digest ? json(*r.last_digest) : json(nullptr)},
                {"digest_algorithm", r.digest_algorithm},
                {"errors", errors}};
}

UrlRecord record_from_json(const json& j) {
    UrlRecord r;
    auto url = parse_absolute(j.at("url").get<std::string>());
    if (!url) throw std::runtime_error("bad url field");
    r.url = *url;
    auto link_class = link_class_from_string(j.at("class").get<std::string>());
    if (!link_class) throw std::runtime_error("bad class field");
    r.link_class = *link_class;
    auto first_seen = time_from_json(j.at("first_seen"), "first_seen");
    if (!first_seen) throw std::runtime_error("missing first_seen");
    r.first_seen = *first_seen;
    r.last_submitted = time_from_json(j.at("last_submitted"), "last_submitted");
    r.submit_count = j.at("submit_count").get<std::uint64_t>();
    if (!j.at("last_digest").is_null()) r.last_digest = j.at("last_digest").get<std::string>();
    r.digest_algorithm = j.at("digest_algorithm").get<std::string>();
    for (const auto& [key, value] : j.at("errors").items())
        r.error_tally[key] = value.get<std::uint64_t>();
    return r;
}

json ledger_to_json(const RunLedgerEntry& e) {
    return json{{"kind", e.kind == RunKind::Heartbeat ? "heartbeat" : "run"},
                {"run_id", e.run_id},
                {"started_at", format_rfc3339(e.started_at)},
                {"wall_seconds", duration_seconds(e.wall_duration)},
                {"in_budget_seconds", duration_seconds(e.in_budget_duration)},
                {"attempted", e.attempted},
                {"accepted", e.accepted},
                {"errors", e.errors},
                {"stopped_by", e.stopped_by}};
}

RunLedgerEntry ledger_from_json(const json& j, RunKind kind) {
    RunLedgerEntry e;
    e.kind = kind;
    e.run_id = j.at("run_id").get<std::uint64_t>();
    auto started = time_from_json(j.at("started_at"), "started_at");
    if (!started) throw std::runtime_error("missing started_at");
    e.started_at = *started;
    e.wall_duration = seconds_duration(j.at("wall_seconds").get<double>());
    e.in_budget_duration = seconds_duration(j.at("in_budget_seconds").get<double>());
    if (e.wall_duration < Duration::zero() || e.in_budget_duration < Duration::zero())
        throw std::runtime_error("negative duration");
    e.attempted = j.at("attempted").get<std::uint64_t>();
    e.accepted = j.at("accepted").get<std::uint64_t>();
    e.errors = j.at("errors").get<std::uint64_t>();
    e.stopped_by = j.at("stopped_by").get<std::string>();
    return e;
}

} // namespace

StoreSnapshot load_store(const std::filesystem::path& path) {
    StoreSnapshot snapshot;
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) {
        if (!std::filesystem::exists(path)) return snapshot; // fresh store
        throw StoreError(StoreError::Kind::Io, "cannot open store: " + path.string());
    }

    std::string line;
    std::size_t line_no = 0;
    std::size_t byte_offset = 0;
    bool saw_header = false;
    std::uint64_t last_run_id = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t line_start = byte_offset;
        byte_offset += line.size() + 1;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
            const std::string kind = j.at("kind").get<std::string>();
            if (!saw_header) {
                if (kind != "header") throw std::runtime_error("first line is not a header");
                snapshot.schema_version = j.at("schema_version").get<int>();
                if (snapshot.schema_version != kStoreSchemaVersion)
                    throw std::runtime_error("unsupported schema_version " +
                                             std::to_string(snapshot.schema_version));
                saw_header = true;
            } else if (kind == "url") {
                UrlRecord record = record_from_json(j);
                const std::string key = record.url.str();
                if (!snapshot.records.emplace(key, std::move(record)).second)
                    throw std::runtime_error("duplicate url record: " + key);
            } else if (kind == "run" || kind == "heartbeat") {
                RunLedgerEntry entry = ledger_from_json(
                    j, kind == "heartbeat" ? RunKind::Heartbeat : RunKind::Productive);
                if (entry.run_id <= last_run_id)
                    throw std::runtime_error("run_id not strictly increasing");
                last_run_id = entry.run_id;
                snapshot.ledger.push_back(std::move(entry));
            } else {
                throw std::runtime_error("unknown line kind: " + kind);
            }
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "corrupt store " << path.string() << " at line " << line_no << " (byte "
                << line_start << "): " << e.what();
            throw StoreError(StoreError::Kind::Corrupt, msg.str(), line_no, line_start);
        }
    }
    if (!saw_header) {
        throw StoreError(StoreError::Kind::Corrupt,
                         "corrupt store " + path.string() + " at line 1 (byte 0): missing header",
                         1, 0);
    }
    return snapshot;
}

void save_store(const StoreSnapshot& snapshot, const std::filesystem::path& path,
                const std::function<void()>& before_rename) {
    std::filesystem::path dir = path.parent_path();
    if (dir.empty()) dir = ".";
    const std::filesystem::path temp =
        dir / (path.filename().string() + ".tmp." + std::to_string(::getpid()));

    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out.is_open())
            throw StoreError(StoreError::Kind::Io, "cannot write store temp: " + temp.string());
        out << json{{"kind", "header"}, {"schema_version", snapshot.schema_version}}.dump()
            << '\n';
        for (const auto& [key, record] : snapshot.records) out << record_to_json(record).dump() << '\n';
        for (const auto& entry : snapshot.ledger) out << ledger_to_json(entry).dump() << '\n';
        out.flush();
        if (!out.good()) {
            std::error_code ec;
            std::filesystem::remove(temp, ec);
            throw StoreError(StoreError::Kind::Io, "short write to " + temp.string());
        }
    }

    if (before_rename) before_rename();

    std::error_code ec;
    std::filesystem::rename(temp, path, ec);
    if (ec) {
        std::filesystem::remove(temp, ec);
        throw StoreError(StoreError::Kind::Io,
                         "cannot replace store " + path.string() + ": " + ec.message());
    }
}

void record_submission(StoreSnapshot& store, const NormalizedUrl& url,
                       const SubmissionOutcome& outcome, TimePoint at) {
    const auto it = store.records.find(url.str());
    if (it == store.records.end())
        throw StoreError(StoreError::Kind::UnknownUrl, "no record for " + url.str());
    UrlRecord& record = it->second;
    if (outcome.ok()) {
        ++record.submit_count;
        record.last_submitted = floor_seconds(at);
    } else {
        ++record.error_tally[to_string(outcome.kind)];
    }
}

AggregateStats aggregate_stats(const StoreSnapshot& store) {
    AggregateStats stats;
    for (const auto& entry : store.ledger) {
        if (entry.kind == RunKind::Heartbeat) {
            ++stats.heartbeats;
            continue;
        }
        ++stats.total_runs;
        stats.total_wall_hours += duration_seconds(entry.wall_duration) / 3600.0;
        stats.total_in_budget_hours += duration_seconds(entry.in_budget_duration) / 3600.0;
        stats.total_attempted += entry.attempted;
        stats.total_accepted += entry.accepted;
    }
    if (stats.total_runs > 0)
        stats.mean_run_hours = stats.total_wall_hours / static_cast<double>(stats.total_runs);
    for (const auto& [key, record] : store.records) {
        ++stats.per_class[to_string(record.link_class)];
        const auto n = record.submit_count;
        if (n == 0) ++stats.redundancy[0];
        else if (n < 10) ++stats.redundancy[1];
        else if (n < 50) ++stats.redundancy[2];
        else ++stats.redundancy[3];
    }
    return stats;
}

} // namespace sitekeeper
