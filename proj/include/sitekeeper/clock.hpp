#pragma once

#include <chrono>
#include <thread>

namespace sitekeeper {

using TimePoint = std::chrono::system_clock::time_point;
using Duration = std::chrono::system_clock::duration;

// Injectable time source. Every timing-sensitive loop (budgets, pacing,
// politeness, backoff) goes through one of these so tests never sleep.
class Clock {
public:
    virtual ~Clock() = default;
    virtual TimePoint now() = 0;
    virtual void sleep_for(Duration d) = 0;
};

class SystemClock final : public Clock {
public:
    TimePoint now() override { return std::chrono::system_clock::now(); }
    void sleep_for(Duration d) override {
        if (d > Duration::zero()) std::this_thread::sleep_for(d);
    }
};

} // namespace sitekeeper
