#pragma once

#include <compare>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sitekeeper/clock.hpp"

namespace sitekeeper {

// Canonical absolute URL. host carries ":port" text for non-default ports
// (default ports are removed); query is empty when absent. Never holds a
// fragment, and to_string() -> normalize round-trips to an equal value.
struct NormalizedUrl {
    std::string scheme; // "http" | "https", lowercase
    std::string host;   // lowercase
    std::string path;   // begins with "/"
    std::string query;  // without '?', empty means none

    std::string str() const;
    auto operator<=>(const NormalizedUrl&) const = default;
};

std::string to_string(const NormalizedUrl& url);

enum class LinkClass { Page, Media, ExcludedResource, External };

const char* to_string(LinkClass c);
std::optional<LinkClass> link_class_from_string(std::string_view s);

struct CrawlPolicy {
    std::set<std::string> internal_hosts; // lowercase, may include ":port"
    std::vector<std::string> media_path_markers = {"/wp-content/"};
    std::set<std::string> media_extensions = {"jpg",  "jpeg", "png", "gif", "webp", "pdf",
                                              "doc",  "docx", "ppt", "pptx", "mp4"};
    std::set<std::string> excluded_extensions = {"css", "js", "mjs", "map"};
    std::size_t max_pages = 50000;
    Duration politeness_delay = std::chrono::seconds(1);

    // internal_hosts non-empty; media/excluded extension sets disjoint.
    void validate() const;
};

enum class UrlError { None, MalformedUrl, UnsupportedScheme };

// Resolve raw against base, strip the fragment, lowercase scheme and host,
// collapse dot-segments, drop default ports. Percent escapes pass through
// untouched so normalizing twice is a no-op.
std::optional<NormalizedUrl> normalize(std::string_view raw, const NormalizedUrl& base,
                                       UrlError* error = nullptr);

// For seed/config URLs that have no base. Must be absolute http(s).
std::optional<NormalizedUrl> parse_absolute(std::string_view raw, UrlError* error = nullptr);

// Precedence is exactly External > ExcludedResource > Media > Page.
LinkClass classify(const NormalizedUrl& url, const CrawlPolicy& policy);

// true iff classify() != External. A "www."-prefixed variant of any
// internal host counts as internal.
bool is_internal(const NormalizedUrl& url, const CrawlPolicy& policy);

} // namespace sitekeeper
