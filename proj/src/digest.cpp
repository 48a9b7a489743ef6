#include "ckdiff/digest.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <vector>

#include "ckdiff/errors.hpp"

namespace ckdiff {

Sha256::Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(static_cast<EVP_MD_CTX*>(ctx_), EVP_sha256(), nullptr) != 1) {
        throw IoFailure("failed to initialize SHA-256 context");
    }
}

Sha256::~Sha256() { EVP_MD_CTX_free(static_cast<EVP_MD_CTX*>(ctx_)); }

void Sha256::update(std::span<const std::byte> data) { update(data.data(), data.size()); }

void Sha256::update(const void* data, std::size_t size) {
    EVP_DigestUpdate(static_cast<EVP_MD_CTX*>(ctx_), data, size);
}

Sha256Digest Sha256::finish() {
    Sha256Digest out{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(static_cast<EVP_MD_CTX*>(ctx_), out.data(), &len);
    return out;
}

Sha256Digest sha256(std::span<const std::byte> data) {
    Sha256 h;
    h.update(data);
    return h.finish();
}

Sha256Digest sha256_file(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw IoFailure("cannot open " + path);
    Sha256 h;
    std::vector<std::byte> buf(1 << 20);
    for (;;) {
        const std::size_t got = std::fread(buf.data(), 1, buf.size(), f);
        if (got > 0) h.update(buf.data(), got);
        if (got < buf.size()) break;
    }
    const bool bad = std::ferror(f) != 0;
    std::fclose(f);
    if (bad) throw IoFailure("read error on " + path);
    return h.finish();
}

std::string hex_digest(const Sha256Digest& digest) {
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(64);
    for (std::uint8_t b : digest) {
        out.push_back(hex[b >> 4]);
        out.push_back(hex[b & 0xF]);
    }
    return out;
}

}  // namespace ckdiff
