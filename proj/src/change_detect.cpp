#include "sitekeeper/change_detect.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include <openssl/evp.h>

namespace sitekeeper {

std::string sha256_hex(std::string_view bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xf];
    }
    return out;
}

const std::vector<std::string>& default_volatile_patterns() {
    static const std::vector<std::string> patterns = {
        R"(nonce=["'][^"']*["'])",
        R"(csrf[-_]?token["'][^>]*>)",
        R"(<meta[^>]*(?:timestamp|last-modified|generated)[^>]*>)",
    };
    return patterns;
}

namespace {

// Remove the text between <tag ...> and </tag>, keeping the tags themselves:
// a changed src/href attribute still counts, churning inline content does not.
std::string strip_element_contents(const std::string& text, std::string_view tag) {
    std::string lower(text.size(), '\0');
    std::transform(text.begin(), text.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    const std::string open = "<" + std::string(tag);
    const std::string close = "</" + std::string(tag);

    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t start = lower.find(open, pos);
        if (start == std::string::npos) {
            out += text.substr(pos);
            break;
        }
        const std::size_t open_end = text.find('>', start);
        if (open_end == std::string::npos) {
            out += text.substr(pos);
            break;
        }
        const std::size_t close_start = lower.find(close, open_end + 1);
        if (close_start == std::string::npos) {
            out += text.substr(pos);
            break;
        }
        out += text.substr(pos, open_end + 1 - pos); // keep the opening tag
        pos = close_start;                           // resume at the closing tag
    }
    return out;
}

std::string canonicalize(std::string_view content, const std::vector<std::string>& patterns) {
    std::string text(content);
    text = strip_element_contents(text, "script");
    text = strip_element_contents(text, "style");
    for (const auto& pattern : patterns) {
        try {
            const std::regex re(pattern, std::regex::ECMAScript | std::regex::icase);
            text = std::regex_replace(text, re, "");
        } catch (const std::regex_error&) {
            // an unparseable configured pattern is skipped, not fatal
        }
    }
    std::string collapsed;
    collapsed.reserve(text.size());
    bool in_space = false;
    for (const char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_space = true;
            continue;
        }
        if (in_space && !collapsed.empty()) collapsed += ' ';
        in_space = false;
        collapsed += c;
    }
    return collapsed;
}

} // namespace

std::string digest(std::string_view content, DigestMode mode,
                   const std::vector<std::string>& volatile_patterns) {
    if (mode == DigestMode::Raw) return sha256_hex(content);
    return sha256_hex(canonicalize(content, volatile_patterns));
}

const char* to_string(ChangeDecision::Kind k) {
    switch (k) {
    case ChangeDecision::Kind::New: return "new";
    case ChangeDecision::Kind::NoChange: return "no_change";
    case ChangeDecision::Kind::Changed: return "changed";
    }
    return "new";
}

ChangeDecision decide(const NormalizedUrl& url, const std::string& new_digest,
                      const StoreSnapshot& store) {
    ChangeDecision decision;
    decision.new_digest = new_digest;
    const UrlRecord* record = store.find(url);
    if (!record || !record->last_digest) {
        decision.kind = ChangeDecision::Kind::New;
        return decision;
    }
    if (*record->last_digest == new_digest) {
        decision.kind = ChangeDecision::Kind::NoChange;
        return decision;
    }
    decision.kind = ChangeDecision::Kind::Changed;
    decision.old_digest = *record->last_digest;
    return decision;
}

namespace {

// Media fingerprint: HEAD metadata when the server offers any, so large
// unchanged files are never downloaded; otherwise the raw bytes.
std::optional<std::string> media_digest(const NormalizedUrl& url, Fetcher& fetcher,
                                        std::string* cause) {
    if (auto meta = fetcher.head(url); meta && meta->any()) {
        std::string line = "content-length:";
        if (meta->content_length) line += std::to_string(*meta->content_length);
        line += "\nlast-modified:";
        if (meta->last_modified) line += *meta->last_modified;
        line += "\n";
        return sha256_hex(line);
    }
    std::string error;
    auto fetched = fetcher.fetch(url, &error);
    if (!fetched || fetched->status_code < 200 || fetched->status_code >= 400) {
        *cause = fetched ? "HTTP " + std::to_string(fetched->status_code) : error;
        return std::nullopt;
    }
    return digest(fetched->body, DigestMode::Raw);
}

} // namespace

RunReport proactive_pass(const DiscoveredSet& set, Fetcher& fetcher, StoreSnapshot& store,
                         ArchiveClient& client, const RunBudget& budget, Clock& clock,
                         const ProactiveOptions& options) {
    budget.validate();
    RunReport report;
    if (set.empty()) {
        report.elapsed = clock.now() - budget.started_at;
        return report;
    }

    const std::vector<NormalizedUrl> order = shuffle(set, options.rng_seed);
    std::map<std::string, LinkClass> classes;
    for (const auto& [url, link_class] : set.entries()) classes[url.str()] = link_class;

    for (std::size_t i = 0; i < order.size(); ++i) {
        const NormalizedUrl& url = order[i];
        const LinkClass link_class = classes[url.str()];
        UrlRecord& record = store.upsert(url, link_class, clock.now());

        std::optional<std::string> new_digest;
        std::string cause;
        if (link_class == LinkClass::Media) {
            new_digest = media_digest(url, fetcher, &cause);
        } else {
            std::string error;
            auto fetched = fetcher.fetch(url, &error);
            if (fetched && fetched->status_code >= 200 && fetched->status_code < 400) {
                new_digest = digest(fetched->body, DigestMode::Canonicalized,
                                    options.volatile_patterns);
            } else {
                cause = fetched ? "HTTP " + std::to_string(fetched->status_code) : error;
            }
        }

        if (!new_digest) {
            const auto outcome =
                SubmissionOutcome::connection_error("fetch failed: " + cause);
            report.tally(url, outcome, clock.now());
            record_submission(store, url, outcome, clock.now());
        } else {
            const ChangeDecision decision = decide(url, *new_digest, store);
            if (!decision.needs_archive()) {
                ++report.skipped_unchanged;
            } else {
                const SubmissionOutcome outcome = client.submit(url);
                report.tally(url, outcome, clock.now());
                record_submission(store, url, outcome, clock.now());
                if (outcome.ok()) record.last_digest = *new_digest; // advance only on success
            }
        }

        if (clock.now() - budget.started_at >= budget.cutoff) {
            report.stopped_by = StopReason::BudgetExhausted;
            break;
        }
        if (i + 1 < order.size()) clock.sleep_for(options.pacing);
    }
    report.elapsed = clock.now() - budget.started_at;
    return report;
}

} // namespace sitekeeper
