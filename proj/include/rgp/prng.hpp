#pragma once

#include <cstdint>
#include <vector>

namespace rgp {

/// SplitMix64 generator. Chosen as the split/shuffle PRNG because the
/// state update is a one-line constant that any other implementation of
/// this pipeline can reproduce bit for bit.
///
///   state += 0x9E3779B97F4A7C15
///   z = state
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   return z ^ (z >> 31)
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform draw in [0, bound). bound must be nonzero. Uses plain
    /// modulo reduction; the tiny bias is irrelevant for shuffling and
    /// keeps the sequence trivially reproducible.
    uint64_t next_below(uint64_t bound) { return next() % bound; }

private:
    uint64_t state_;
};

/// In-place Fisher-Yates shuffle driven by SplitMix64:
/// for i = n-1 .. 1, swap(items[i], items[next_below(i+1)]).
template <typename T>
void fisher_yates_shuffle(std::vector<T>& items, SplitMix64& rng) {
    if (items.size() < 2) return;
    for (size_t i = items.size() - 1; i > 0; --i) {
        size_t j = static_cast<size_t>(rng.next_below(i + 1));
        std::swap(items[i], items[j]);
    }
}

} // namespace rgp
