#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sitekeeper/archive_client.hpp"
#include "sitekeeper/clock.hpp"
#include "sitekeeper/discovery.hpp"
#include "sitekeeper/scheduler.hpp"
#include "sitekeeper/state_store.hpp"

namespace sitekeeper {

std::string sha256_hex(std::string_view bytes);

enum class DigestMode { Raw, Canonicalized };

// Patterns whose matches are scrubbed before digesting a page, so routine
// CMS churn (nonce rotation, csrf tokens, timestamp meta tags) does not
// count as a change. Case-insensitive ECMAScript regexes.
const std::vector<std::string>& default_volatile_patterns();

// Raw: SHA-256 of the exact bytes (always used for media).
// Canonicalized: SHA-256 after stripping script/style contents, removing
// volatile-pattern matches, and collapsing whitespace runs.
std::string digest(std::string_view content, DigestMode mode,
                   const std::vector<std::string>& volatile_patterns = default_volatile_patterns());

struct ChangeDecision {
    enum class Kind { New, NoChange, Changed };

    Kind kind = Kind::New;
    std::optional<std::string> old_digest; // Changed only
    std::string new_digest;

    bool needs_archive() const { return kind != Kind::NoChange; }
};

const char* to_string(ChangeDecision::Kind k);

// Pure comparison against the stored digest for url.
ChangeDecision decide(const NormalizedUrl& url, const std::string& new_digest,
                      const StoreSnapshot& store);

struct ProactiveOptions {
    Duration pacing = kDefaultPacing;
    std::vector<std::string> volatile_patterns = default_volatile_patterns();
    std::optional<std::uint64_t> rng_seed;
};

// One change-triggered pass: fetch each entry (shuffled, budget-bounded,
// paced), digest it, and submit only New or Changed entries. Stored digests
// advance only after an Accepted outcome, so failed submissions retry on the
// next pass. Media is probed via HEAD metadata before any full download.
RunReport proactive_pass(const DiscoveredSet& set, Fetcher& fetcher, StoreSnapshot& store,
                         ArchiveClient& client, const RunBudget& budget, Clock& clock,
                         const ProactiveOptions& options = {});

} // namespace sitekeeper
