#include "sitekeeper/url.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace sitekeeper {
namespace {

std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool set_error(UrlError* error, UrlError e) {
    if (error) *error = e;
    return false;
}

// Drop surrounding spaces and all embedded tab/CR/LF, the way browsers
// pre-process attribute URLs.
std::string clean_raw(std::string_view raw) {
    std::size_t b = 0, e = raw.size();
    while (b < e && std::isspace(static_cast<unsigned char>(raw[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(raw[e - 1]))) --e;
    std::string out;
    out.reserve(e - b);
    for (std::size_t i = b; i < e; ++i) {
        const char c = raw[i];
        if (c == '\t' || c == '\r' || c == '\n') continue;
        out += c;
    }
    return out;
}

// "scheme:" prefix per RFC 3986: ALPHA *( ALPHA / DIGIT / "+" / "-" / "." ) ":"
std::optional<std::size_t> scheme_colon(std::string_view s) {
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return std::nullopt;
    for (std::size_t i = 1; i < s.size(); ++i) {
        const char c = s[i];
        if (c == ':') return i;
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.')
            return std::nullopt;
    }
    return std::nullopt;
}

// RFC 3986 §5.2.4.
std::string remove_dot_segments(std::string in) {
    std::string out;
    while (!in.empty()) {
        if (in.rfind("../", 0) == 0) {
            in.erase(0, 3);
        } else if (in.rfind("./", 0) == 0) {
            in.erase(0, 2);
        } else if (in.rfind("/./", 0) == 0) {
            in.replace(0, 3, "/");
        } else if (in == "/.") {
            in = "/";
        } else if (in.rfind("/../", 0) == 0 || in == "/..") {
            in = (in == "/..") ? "/" : "/" + in.substr(4);
            const std::size_t slash = out.find_last_of('/');
            out.erase(slash == std::string::npos ? 0 : slash);
        } else if (in == "." || in == "..") {
            in.clear();
        } else {
            std::size_t next = in.find('/', 1);
            if (next == std::string::npos) next = in.size();
            out += in.substr(0, next);
            in.erase(0, next);
        }
    }
    return out;
}

// Percent-encode bytes a URL cannot carry raw. Existing escapes pass
// through so the result is stable under repeated normalization.
std::string encode_component(std::string_view s) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    out.reserve(s.size());
    for (const char ch : s) {
        const unsigned char c = static_cast<unsigned char>(ch);
        const bool unsafe = c <= 0x20 || c >= 0x7f || c == '"' || c == '<' || c == '>' ||
                            c == '\\' || c == '^' || c == '`' || c == '{' || c == '|' || c == '}';
        if (unsafe) {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 0xf];
        } else {
            out += ch;
        }
    }
    return out;
}

bool valid_host_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_';
}

// authority = [userinfo@]host[:port]; empty/invalid host fails. Default
// ports fold away; others stay embedded as "host:port".
bool parse_authority(std::string_view authority, const std::string& scheme, std::string* host_out) {
    if (const std::size_t at = authority.rfind('@'); at != std::string_view::npos)
        authority.remove_prefix(at + 1);
    if (authority.empty()) return false;

    std::string host;
    std::string port;
    if (authority[0] == '[') { // IPv6 literal
        const std::size_t close = authority.find(']');
        if (close == std::string_view::npos) return false;
        host = std::string(authority.substr(0, close + 1));
        std::string_view rest = authority.substr(close + 1);
        if (!rest.empty()) {
            if (rest[0] != ':') return false;
            port = std::string(rest.substr(1));
        }
    } else {
        const std::size_t colon = authority.find(':');
        host = std::string(authority.substr(0, colon));
        if (colon != std::string_view::npos) port = std::string(authority.substr(colon + 1));
        for (const char c : host)
            if (!valid_host_char(c)) return false;
    }
    if (host.empty()) return false;
    host = to_lower(host);

    if (!port.empty()) {
        if (!std::all_of(port.begin(), port.end(),
                         [](unsigned char c) { return std::isdigit(c); }))
            return false;
        const bool default_port =
            (scheme == "http" && port == "80") || (scheme == "https" && port == "443");
        if (!default_port) host += ":" + port;
    } else if (port.empty() && authority.find(':') != std::string_view::npos &&
               authority[0] != '[') {
        return false; // "host:" with no digits
    }
    *host_out = host;
    return true;
}

NormalizedUrl finish(std::string scheme, std::string host, std::string path_and_query) {
    NormalizedUrl u;
    u.scheme = std::move(scheme);
    u.host = std::move(host);
    std::string path = std::move(path_and_query);
    if (const std::size_t q = path.find('?'); q != std::string::npos) {
        u.query = encode_component(path.substr(q + 1));
        path.erase(q);
    }
    if (path.empty() || path[0] != '/') path.insert(path.begin(), '/');
    u.path = encode_component(remove_dot_segments(path));
    if (u.path.empty()) u.path = "/";
    return u;
}

} // namespace

std::string NormalizedUrl::str() const {
    std::string out = scheme + "://" + host + path;
    if (!query.empty()) out += "?" + query;
    return out;
}

std::string to_string(const NormalizedUrl& url) { return url.str(); }

const char* to_string(LinkClass c) {
    switch (c) {
    case LinkClass::Page: return "page";
    case LinkClass::Media: return "media";
    case LinkClass::ExcludedResource: return "excluded";
    case LinkClass::External: return "external";
    }
    return "page";
}

std::optional<LinkClass> link_class_from_string(std::string_view s) {
    if (s == "page") return LinkClass::Page;
    if (s == "media") return LinkClass::Media;
    if (s == "excluded") return LinkClass::ExcludedResource;
    if (s == "external") return LinkClass::External;
    return std::nullopt;
}

void CrawlPolicy::validate() const {
    if (internal_hosts.empty()) throw std::invalid_argument("crawl policy: internal_hosts is empty");
    if (max_pages == 0) throw std::invalid_argument("crawl policy: max_pages must be positive");
    for (const auto& ext : excluded_extensions) {
        if (media_extensions.count(ext))
            throw std::invalid_argument("crawl policy: extension '" + ext +
                                        "' is both media and excluded");
    }
}

std::optional<NormalizedUrl> normalize(std::string_view raw, const NormalizedUrl& base,
                                       UrlError* error) {
    if (error) *error = UrlError::None;
    std::string s = clean_raw(raw);
    if (const std::size_t hash = s.find('#'); hash != std::string::npos) s.erase(hash);
    if (s.empty()) {
        // "" or "#frag": a same-document reference, resolves to base itself
        if (base.host.empty()) {
            set_error(error, UrlError::MalformedUrl);
            return std::nullopt;
        }
        return base;
    }

    if (const auto colon = scheme_colon(s)) {
        const std::string scheme = to_lower(s.substr(0, *colon));
        if (scheme != "http" && scheme != "https") {
            set_error(error, UrlError::UnsupportedScheme);
            return std::nullopt;
        }
        std::string_view rest = std::string_view(s).substr(*colon + 1);
        if (rest.rfind("//", 0) != 0) {
            set_error(error, UrlError::MalformedUrl);
            return std::nullopt;
        }
        rest.remove_prefix(2);
        const std::size_t path_start = rest.find_first_of("/?");
        const std::string_view authority =
            path_start == std::string_view::npos ? rest : rest.substr(0, path_start);
        std::string host;
        if (!parse_authority(authority, scheme, &host)) {
            set_error(error, UrlError::MalformedUrl);
            return std::nullopt;
        }
        const std::string tail(path_start == std::string_view::npos ? "" : rest.substr(path_start));
        return finish(scheme, host, tail);
    }

    // Everything below is relative and needs a usable base.
    if (base.host.empty() || base.scheme.empty()) {
        set_error(error, UrlError::MalformedUrl);
        return std::nullopt;
    }

    if (s.rfind("//", 0) == 0) { // scheme-relative: inherit the base scheme
        return normalize(base.scheme + ":" + s, base, error);
    }
    if (s[0] == '/') {
        return finish(base.scheme, base.host, s);
    }
    if (s[0] == '?') {
        return finish(base.scheme, base.host, base.path + s);
    }
    // Relative path: merge with base path up to its last segment.
    const std::size_t slash = base.path.find_last_of('/');
    const std::string merged = base.path.substr(0, slash + 1) + s;
    return finish(base.scheme, base.host, merged);
}

std::optional<NormalizedUrl> parse_absolute(std::string_view raw, UrlError* error) {
    if (error) *error = UrlError::None;
    const std::string s = clean_raw(raw);
    if (!scheme_colon(s)) {
        set_error(error, UrlError::MalformedUrl);
        return std::nullopt;
    }
    return normalize(s, NormalizedUrl{}, error);
}

namespace {

bool host_is_internal(const std::string& host, const CrawlPolicy& policy) {
    if (policy.internal_hosts.count(host)) return true;
    if (host.rfind("www.", 0) == 0 && policy.internal_hosts.count(host.substr(4))) return true;
    return false;
}

std::string path_extension(const std::string& path) {
    const std::size_t slash = path.find_last_of('/');
    const std::string segment = path.substr(slash + 1);
    const std::size_t dot = segment.find_last_of('.');
    if (dot == std::string::npos || dot + 1 == segment.size()) return "";
    return to_lower(segment.substr(dot + 1));
}

} // namespace

LinkClass classify(const NormalizedUrl& url, const CrawlPolicy& policy) {
    if (!host_is_internal(url.host, policy)) return LinkClass::External;
    const std::string ext = path_extension(url.path);
    if (policy.excluded_extensions.count(ext)) return LinkClass::ExcludedResource;
    for (const auto& marker : policy.media_path_markers) {
        if (url.path.find(marker) != std::string::npos) return LinkClass::Media;
    }
    if (policy.media_extensions.count(ext)) return LinkClass::Media;
    return LinkClass::Page;
}

bool is_internal(const NormalizedUrl& url, const CrawlPolicy& policy) {
    return classify(url, policy) != LinkClass::External;
}

} // namespace sitekeeper
