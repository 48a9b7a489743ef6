#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <optional>
#include <string>
#include <string_view>

namespace ckdiff {

// Floating-point storage types supported in checkpoints. Integer safetensors
// dtypes are rejected at parse time.
enum class Dtype { BF16, F16, F32, F64 };

constexpr std::size_t dtype_size(Dtype d) {
    switch (d) {
        case Dtype::BF16:
        case Dtype::F16: return 2;
        case Dtype::F32: return 4;
        case Dtype::F64: return 8;
    }
    return 0;
}

constexpr const char* dtype_name(Dtype d) {
    switch (d) {
        case Dtype::BF16: return "BF16";
        case Dtype::F16: return "F16";
        case Dtype::F32: return "F32";
        case Dtype::F64: return "F64";
    }
    return "?";
}

std::optional<Dtype> dtype_from_string(std::string_view s);

// bf16 <-> f32. The upcast is exact (bf16 is the high half of f32).
inline float bf16_to_f32(std::uint16_t bits) {
    return std::bit_cast<float>(static_cast<std::uint32_t>(bits) << 16);
}

// Round-to-nearest-even truncation of the low 16 mantissa bits. NaN inputs
// keep their high-half payload; a payload that would read as Inf gets the
// quiet bit forced so the result is still NaN.
inline std::uint16_t f32_to_bf16(float value) {
    std::uint32_t u = std::bit_cast<std::uint32_t>(value);
    if ((u & 0x7F800000u) == 0x7F800000u) {  // Inf or NaN
        std::uint16_t hi = static_cast<std::uint16_t>(u >> 16);
        if ((u & 0x007FFFFFu) != 0 && (hi & 0x007Fu) == 0) hi |= 0x0040u;
        return hi;
    }
    u += 0x7FFFu + ((u >> 16) & 1u);
    return static_cast<std::uint16_t>(u >> 16);
}

// f32 restricted to bf16-representable values; canonical quiet NaN for NaN.
inline float bf16_round(float value) {
    std::uint32_t u = std::bit_cast<std::uint32_t>(value);
    if ((u & 0x7F800000u) == 0x7F800000u && (u & 0x007FFFFFu) != 0) {
        return std::bit_cast<float>(0x7FC00000u);
    }
    return bf16_to_f32(f32_to_bf16(value));
}

float f16_to_f32(std::uint16_t bits);
std::uint16_t f32_to_f16(float value);

// Decode `count` elements of `dtype` starting at `src` into f32/f64.
// All decodes are exact except F64 -> f32, which rounds to nearest.
void decode_elements(Dtype dtype, const std::byte* src, std::int64_t count, float* out);
void decode_elements(Dtype dtype, const std::byte* src, std::int64_t count, double* out);

// Encode f32 values into `dtype` storage (round-to-nearest-even for 16-bit
// targets). Used by the checkpoint writer.
void encode_elements(Dtype dtype, const float* src, std::int64_t count, std::byte* out);

}  // namespace ckdiff
