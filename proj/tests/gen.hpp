#pragma once

// Hand-rolled generators for property tests. Every suite seeds its own
// stream so failures replay exactly.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace gen {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    /// Log-uniform in [lo, hi), for quantities spanning decades.
    double log_real(double lo, double hi) { return std::exp(real(std::log(lo), std::log(hi))); }
    std::int64_t integer(std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
    }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

    template <typename T>
    const T& pick(const std::vector<T>& items) {
        return items[static_cast<std::size_t>(integer(0, static_cast<std::int64_t>(items.size()) - 1))];
    }

    std::vector<double> reals(std::size_t n, double lo, double hi) {
        std::vector<double> out(n);
        for (auto& v : out) v = real(lo, hi);
        return out;
    }

private:
    std::mt19937_64 rng_;
};

}  // namespace gen
