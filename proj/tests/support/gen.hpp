#pragma once

// Small hand-rolled generators for property tests.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace gen {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
    double log_uniform(double lo, double hi) { return lo * std::pow(hi / lo, uniform(0.0, 1.0)); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
    double half_integer(int twice_lo, int twice_hi) { return 0.5 * integer(twice_lo, twice_hi); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }
    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

template <class F>
void for_cases(int n, std::uint64_t seed, F&& body) {
    Rng rng(seed);
    for (int i = 0; i < n; ++i) body(rng, i);
}

}  // namespace gen
