#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ttpbench {

/// Portable RNG. The engine output is fixed by the standard; the distribution
/// helpers are implemented here because std:: distributions are not
/// reproducible across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound);

    /// Standard normal via Box-Muller.
    double normal();

    template <typename It>
    void shuffle(It first, It last) {
        auto n = static_cast<std::uint64_t>(last - first);
        for (std::uint64_t i = n; i > 1; --i) {
            auto j = below(i);
            std::swap(first[i - 1], first[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Stable seed for a named sub-stream, e.g. derive_seed(0, "TFIDF/SVM/2/none/3").
std::uint64_t derive_seed(std::uint64_t seed, std::string_view key);

}  // namespace ttpbench
