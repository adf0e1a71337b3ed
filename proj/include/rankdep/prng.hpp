#pragma once
// Philox4x32-10 counter-based generator (Salmon, Moraes, Dror, Shaw; SC'11).
//
// Key   = (seed_lo32, seed_hi32)
// Block = (counter_lo32, counter_hi32, stream_lo32, stream_hi32)
// Each block yields four 32-bit words, consumed as two 64-bit draws
// (word0 | word1 << 32, then word2 | word3 << 32). The counter starts at 0.
//
// Derived draws:
//   uniform_below(b)  Lemire's multiply-shift with rejection (unbiased)
//   uniform01()       top 53 bits of a 64-bit draw times 2^-53, in [0, 1)
//   normal()          Box-Muller on two uniform01 draws, cosine branch only
//   shuffle           Fisher-Yates from the back, j = uniform_below(i + 1)
// None of these use <random> distributions, so streams are identical across
// standard libraries.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <utility>

namespace rankdep {

class PhiloxStream {
public:
    PhiloxStream(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_{stream} {}

    /// Raw block for a given counter; exposed for known-answer tests.
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
        constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
            key[0] += kW0;
            key[1] += kW1;
        }
        return ctr;
    }

    std::uint64_t next_u64() {
        if (avail_ == 0) refill();
        const std::uint64_t r = buffer_[2 - avail_];
        --avail_;
        return r;
    }

    std::uint64_t uniform_below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(next_u64()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double normal() {
        double u1 = uniform01();
        const double u2 = uniform01();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    template <typename T>
    void shuffle(std::span<T> xs) {
        for (std::size_t i = xs.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform_below(i));
            std::swap(xs[i - 1], xs[j]);
        }
    }

private:
    void refill() {
        const auto out = block({static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
                                static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                               key_);
        buffer_[0] = static_cast<std::uint64_t>(out[0]) | static_cast<std::uint64_t>(out[1]) << 32;
        buffer_[1] = static_cast<std::uint64_t>(out[2]) | static_cast<std::uint64_t>(out[3]) << 32;
        ++counter_;
        avail_ = 2;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int avail_ = 0;
};

}  // namespace rankdep
