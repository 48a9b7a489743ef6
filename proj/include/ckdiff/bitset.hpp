#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

#include "ckdiff/errors.hpp"

namespace ckdiff {

// Elementwise bitset in the mask file's bit order: bit k of byte j is element
// 8*j + k. Padding bits in the last byte are kept zero so byte images are
// canonical.
class Bitset {
  public:
    Bitset() = default;
    explicit Bitset(std::int64_t size) : size_(size), bytes_((size + 7) / 8, 0) {}

    static Bitset from_bytes(std::int64_t size, std::span<const std::uint8_t> bytes) {
        Bitset b(size);
        if (bytes.size() != b.bytes_.size()) throw MalformedMask("bitset byte length mismatch");
        std::memcpy(b.bytes_.data(), bytes.data(), bytes.size());
        if (size % 8 != 0 && !b.bytes_.empty()) {
            const std::uint8_t pad_mask = static_cast<std::uint8_t>(0xFFu << (size % 8));
            if (b.bytes_.back() & pad_mask) throw MalformedMask("nonzero padding bits");
        }
        return b;
    }

    std::int64_t size() const { return size_; }

    bool test(std::int64_t i) const { return (bytes_[i >> 3] >> (i & 7)) & 1u; }

    void set(std::int64_t i, bool value = true) {
        const std::uint8_t bit = static_cast<std::uint8_t>(1u << (i & 7));
        if (value)
            bytes_[i >> 3] |= bit;
        else
            bytes_[i >> 3] &= static_cast<std::uint8_t>(~bit);
    }

    std::int64_t popcount() const {
        std::int64_t n = 0;
        for (std::uint8_t b : bytes_) n += std::popcount(b);
        return n;
    }

    std::int64_t intersect_count(const Bitset& other) const {
        check_size(other);
        std::int64_t n = 0;
        for (std::size_t i = 0; i < bytes_.size(); ++i)
            n += std::popcount(static_cast<std::uint8_t>(bytes_[i] & other.bytes_[i]));
        return n;
    }

    Bitset& operator&=(const Bitset& other) {
        check_size(other);
        for (std::size_t i = 0; i < bytes_.size(); ++i) bytes_[i] &= other.bytes_[i];
        return *this;
    }

    Bitset& operator|=(const Bitset& other) {
        check_size(other);
        for (std::size_t i = 0; i < bytes_.size(); ++i) bytes_[i] |= other.bytes_[i];
        return *this;
    }

    // this AND NOT other
    Bitset& and_not(const Bitset& other) {
        check_size(other);
        for (std::size_t i = 0; i < bytes_.size(); ++i)
            bytes_[i] &= static_cast<std::uint8_t>(~other.bytes_[i]);
        return *this;
    }

    bool operator==(const Bitset& other) const = default;

    std::span<const std::uint8_t> bytes() const { return bytes_; }

  private:
    void check_size(const Bitset& other) const {
        if (size_ != other.size_) throw LengthMismatch("bitset sizes differ");
    }

    std::int64_t size_ = 0;
    std::vector<std::uint8_t> bytes_;
};

}  // namespace ckdiff
