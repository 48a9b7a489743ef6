#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

namespace ckdiff {

using Sha256Digest = std::array<std::uint8_t, 32>;

// Incremental SHA-256 (OpenSSL EVP underneath).
class Sha256 {
  public:
    Sha256();
    ~Sha256();
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    void update(std::span<const std::byte> data);
    void update(const void* data, std::size_t size);
    Sha256Digest finish();

  private:
    void* ctx_;
};

Sha256Digest sha256(std::span<const std::byte> data);
Sha256Digest sha256_file(const std::string& path);
std::string hex_digest(const Sha256Digest& digest);

}  // namespace ckdiff
