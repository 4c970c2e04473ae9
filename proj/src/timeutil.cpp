#include "sitekeeper/timeutil.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <stdexcept>

namespace sitekeeper {

std::string format_rfc3339(TimePoint t) {
    const std::time_t secs = std::chrono::system_clock::to_time_t(floor_seconds(t));
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[72];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

std::optional<TimePoint> parse_rfc3339(std::string_view text) {
    std::tm tm{};
    int consumed = 0;
    const std::string s(text);
    if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &tm.tm_year, &tm.tm_mon, &tm.tm_mday,
                    &tm.tm_hour, &tm.tm_min, &tm.tm_sec, &consumed) != 6) {
        return std::nullopt;
    }
    std::string_view rest = text.substr(static_cast<std::size_t>(consumed));
    if (!rest.empty() && rest[0] == '.') {
        rest.remove_prefix(1);
        while (!rest.empty() && std::isdigit(static_cast<unsigned char>(rest[0]))) rest.remove_prefix(1);
    }
    if (rest != "Z" && rest != "+00:00") return std::nullopt;
    tm.tm_year -= 1900;
    tm.tm_mon -= 1;
    const std::time_t secs = timegm(&tm);
    return std::chrono::system_clock::from_time_t(secs);
}

TimePoint floor_seconds(TimePoint t) {
    return std::chrono::time_point_cast<Duration>(std::chrono::floor<std::chrono::seconds>(t));
}

Duration parse_duration(std::string_view text) {
    if (text.empty()) throw std::invalid_argument("empty duration");
    std::size_t i = 0;
    Duration total{};
    bool any = false;
    while (i < text.size()) {
        std::size_t start = i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        if (i == start) throw std::invalid_argument("bad duration: " + std::string(text));
        const long long value = std::stoll(std::string(text.substr(start, i - start)));
        if (i == text.size()) {
            // bare integer means seconds, but only if it is the whole string
            if (!any) return std::chrono::seconds(value);
            throw std::invalid_argument("bad duration: " + std::string(text));
        }
        if (text[i] == 'm' && i + 1 < text.size() && text[i + 1] == 's') {
            total += std::chrono::milliseconds(value);
            i += 2;
        } else {
            switch (text[i]) {
            case 'd': total += std::chrono::hours(24) * value; break;
            case 'h': total += std::chrono::hours(value); break;
            case 'm': total += std::chrono::minutes(value); break;
            case 's': total += std::chrono::seconds(value); break;
            default: throw std::invalid_argument("bad duration unit: " + std::string(text));
            }
            ++i;
        }
        any = true;
    }
    return total;
}

std::string format_duration(Duration d) {
    using namespace std::chrono;
    if (d == Duration::zero()) return "0s";
    std::string out;
    if (d < Duration::zero()) {
        out += "-";
        d = -d;
    }
    const auto dd = duration_cast<hours>(d) / 24;
    if (dd.count() > 0) out += std::to_string(dd.count()) + "d";
    d -= dd * 24;
    const auto hh = duration_cast<hours>(d);
    if (hh.count() > 0) out += std::to_string(hh.count()) + "h";
    d -= hh;
    const auto mm = duration_cast<minutes>(d);
    if (mm.count() > 0) out += std::to_string(mm.count()) + "m";
    d -= mm;
    const auto ms_total = duration_cast<milliseconds>(d);
    const auto ss = ms_total / 1000;
    const auto ms = ms_total % 1000;
    if (ss.count() > 0) out += std::to_string(ss.count()) + "s";
    if (ms.count() > 0) out += std::to_string(ms.count()) + "ms";
    return out.empty() ? "0s" : out;
}

double duration_seconds(Duration d) {
    return std::chrono::duration_cast<std::chrono::duration<double>>(d).count();
}

Duration seconds_duration(double s) {
    return std::chrono::duration_cast<Duration>(std::chrono::duration<double>(s));
}

} // namespace sitekeeper
