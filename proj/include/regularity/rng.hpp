#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace reg {

// SplitMix64 stream. Deliberately not std::mt19937: we need bit-identical
// output across platforms and standard libraries, and named substreams so
// parallel and serial runs draw the same values.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Unbiased integer in [0, bound). Lemire rejection sampling.
    std::uint64_t below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        while (true) {
            std::uint64_t x = next();
            __uint128_t m = static_cast<__uint128_t>(x) * bound;
            std::uint64_t lo = static_cast<std::uint64_t>(m);
            if (lo >= bound || lo >= (0ULL - bound) % bound)
                return static_cast<std::uint64_t>(m >> 64);
        }
    }

    int below_int(int bound) { return static_cast<int>(below(static_cast<std::uint64_t>(bound))); }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    // Deterministic substream: mixes a label and index into a fresh seed so
    // per-pair / per-level streams are independent of evaluation order.
    Rng stream(std::string_view label, std::uint64_t index = 0) const {
        std::uint64_t h = state_ ^ 0x51'7c'c1'b7'27'22'0a'95ULL;
        for (char c : label) {
            h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
            h *= 0x100000001b3ULL;
        }
        h ^= index + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return Rng(h);
    }

private:
    std::uint64_t state_;
};

// k distinct values from [0, n), sorted.
inline std::vector<int> sample_without_replacement(Rng& rng, int n, int k) {
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    for (int i = 0; i < k; ++i) {
        int j = i + rng.below_int(n - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

}  // namespace reg
