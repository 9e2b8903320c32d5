#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>

namespace strokefusion {

/// Mixes a base seed and a stream index into an independent seed (SplitMix64).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// Deterministic generator whose output does not depend on the standard
/// library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    double uniform();                  // [0, 1)
    double normal();                   // standard normal, Box-Muller
    std::size_t below(std::size_t n);  // [0, n), unbiased

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

/// Fisher-Yates.
void shuffle(std::span<std::size_t> values, Rng& rng);

} // namespace strokefusion
