#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace sitekeeper {

// Seedable RNG with a rejection-sampled bounded draw. mt19937_64 output is
// fixed by the standard, so a fixed seed reproduces the same permutations on
// any platform; std::uniform_int_distribution would not.
class Rng {
public:
    Rng() : engine_(entropy_seed()) {}
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
        const std::uint64_t limit = max - max % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    // Fisher–Yates, uniform over all |v|! permutations.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    static std::uint64_t entropy_seed() {
        std::random_device rd;
        return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    }

    std::mt19937_64 engine_;
};

} // namespace sitekeeper
