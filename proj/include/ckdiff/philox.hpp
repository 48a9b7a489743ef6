#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace ckdiff {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Pinned as the
// project-wide seeded generator so independent implementations can reproduce
// every randomized artifact (random masks, toy-lab data streams) bit for bit.
//
// Conventions used throughout:
//   key     = (seed & 0xffffffff, seed >> 32)
//   counter = (index & 0xffffffff, index >> 32, stream, 0)
// where `index` is an element/draw counter and `stream` separates independent
// streams under one seed.
struct Philox4x32 {
    static constexpr std::uint32_t kMult0 = 0xD2511F53u;
    static constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMult0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMult1) * ctr[2];
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }

    static std::array<std::uint32_t, 4> block(std::uint64_t seed, std::uint64_t index,
                                              std::uint32_t stream = 0) {
        return block({static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      stream, 0u},
                     {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
    }
};

inline std::uint32_t philox_u32(std::uint64_t seed, std::uint64_t index, std::uint32_t stream = 0) {
    return Philox4x32::block(seed, index, stream)[0];
}

// Sequential convenience view over one (seed, stream) pair: each 128-bit block
// yields four u32 draws.
class PhiloxStream {
  public:
    PhiloxStream(std::uint64_t seed, std::uint32_t stream, std::uint64_t start_index = 0)
        : seed_(seed), stream_(stream), index_(start_index) {}

    std::uint32_t next_u32() {
        if (word_ == 0) block_ = Philox4x32::block(seed_, index_++, stream_);
        const std::uint32_t out = block_[word_];
        word_ = (word_ + 1) & 3;
        return out;
    }

    // uniform in [0, 1) with 32 bits of resolution
    double next_uniform() { return next_u32() * 0x1p-32; }

    // open-interval uniform, safe as a log() argument
    double next_uniform_open() { return (next_u32() + 0.5) * 0x1p-32; }

    double next_normal() {
        const double u1 = next_uniform_open();
        const double u2 = next_uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

  private:
    std::uint64_t seed_;
    std::uint32_t stream_;
    std::uint64_t index_;
    std::array<std::uint32_t, 4> block_{};
    int word_ = 0;
};

}  // namespace ckdiff
