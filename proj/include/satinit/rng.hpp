#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace satinit {

// SplitMix64 (Steele, Lea, Flood 2014). Every random choice in the toolkit
// goes through this generator so that seeded runs are reproducible across
// standard libraries. The std:: distributions are not portable and are not used.
class SplitMix64 {
public:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next() {
        state_ += kGamma;
        return mix(state_);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi]; lo == hi returns lo.
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, bound). bound must be > 0. Unbiased (rejection).
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    bool coin(double p) { return uniform() < p; }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

    std::uint64_t state() const { return state_; }
    void set_state(std::uint64_t s) { state_ = s; }

private:
    std::uint64_t state_;
};

// The i-th output of a SplitMix64 stream seeded with `master`, computed in O(1)
// so that sample i can be replayed without generating samples 0..i-1.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return SplitMix64::mix(master + (index + 1) * SplitMix64::kGamma);
}

}  // namespace satinit
