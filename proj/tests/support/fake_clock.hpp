#pragma once

#include <mutex>

#include "sitekeeper/clock.hpp"
#include "sitekeeper/timeutil.hpp"

namespace sitekeeper::test {

// Simulated time: sleep_for advances instantly. Thread-safe so concurrent
// discovery workers can share it.
class FakeClock final : public Clock {
public:
    explicit FakeClock(TimePoint start = default_start()) : now_(start) {}

    static TimePoint default_start() { return *parse_rfc3339("2026-01-15T00:00:00Z"); }

    TimePoint now() override {
        std::lock_guard<std::mutex> lock(mu_);
        return now_;
    }

    void sleep_for(Duration d) override { advance(d); }

    void advance(Duration d) {
        std::lock_guard<std::mutex> lock(mu_);
        now_ += d;
    }

private:
    std::mutex mu_;
    TimePoint now_;
};

} // namespace sitekeeper::test
