#include "ckdiff/dtypes.hpp"

namespace ckdiff {

std::optional<Dtype> dtype_from_string(std::string_view s) {
    if (s == "BF16") return Dtype::BF16;
    if (s == "F16") return Dtype::F16;
    if (s == "F32") return Dtype::F32;
    if (s == "F64") return Dtype::F64;
    return std::nullopt;
}

float f16_to_f32(std::uint16_t bits) {
    const std::uint32_t sign = static_cast<std::uint32_t>(bits & 0x8000u) << 16;
    const std::uint32_t exp = (bits >> 10) & 0x1Fu;
    const std::uint32_t mant = bits & 0x3FFu;

    std::uint32_t out;
    if (exp == 0) {
        if (mant == 0) {
            out = sign;  // +/- zero
        } else {
            // subnormal: normalize into f32
            std::uint32_t m = mant;
            int shift = 0;
            while ((m & 0x400u) == 0) {
                m <<= 1;
                ++shift;
            }
            m &= 0x3FFu;
            out = sign | ((113u - shift) << 23) | (m << 13);
        }
    } else if (exp == 0x1Fu) {
        out = sign | 0x7F800000u | (mant << 13);  // Inf / NaN, payload kept
    } else {
        out = sign | ((exp + 112u) << 23) | (mant << 13);
    }
    return std::bit_cast<float>(out);
}

std::uint16_t f32_to_f16(float value) {
    const std::uint32_t u = std::bit_cast<std::uint32_t>(value);
    const std::uint16_t sign = static_cast<std::uint16_t>((u >> 16) & 0x8000u);
    const std::uint32_t abs = u & 0x7FFFFFFFu;

    if (abs >= 0x7F800000u) {  // Inf / NaN
        if (abs > 0x7F800000u) {
            std::uint16_t mant = static_cast<std::uint16_t>((abs >> 13) & 0x3FFu);
            if (mant == 0) mant = 0x200u;  // keep NaN alive when payload truncates to 0
            return static_cast<std::uint16_t>(sign | 0x7C00u | mant);
        }
        return static_cast<std::uint16_t>(sign | 0x7C00u);
    }
    if (abs >= 0x477FF000u) {  // >= 65520: rounds past f16 max (65504) to Inf
        return static_cast<std::uint16_t>(sign | 0x7C00u);
    }
    if (abs < 0x38800000u) {  // below smallest f16 normal: subnormal or zero
        if (abs <= 0x33000000u) return sign;  // <= 2^-25 rounds to zero (tie to even)
        // express the value in units of 2^-24 and round-to-nearest-even
        const std::uint32_t exp = abs >> 23;
        const std::uint32_t mant = (abs & 0x7FFFFFu) | 0x800000u;
        const int shift = static_cast<int>(126u - exp);
        const std::uint32_t dropped = mant & ((1u << shift) - 1u);
        std::uint32_t half = mant >> shift;
        const std::uint32_t halfway = 1u << (shift - 1);
        if (dropped > halfway || (dropped == halfway && (half & 1u))) ++half;
        return static_cast<std::uint16_t>(sign | half);
    }
    // normal range: drop 13 mantissa bits with round-to-nearest-even
    std::uint32_t bits = abs + 0xFFFu + ((abs >> 13) & 1u);
    bits = (bits - 0x38000000u) >> 13;  // rebias 127 -> 15
    if (bits >= 0x7C00u) return static_cast<std::uint16_t>(sign | 0x7C00u);
    return static_cast<std::uint16_t>(sign | bits);
}

namespace {

template <typename T>
void decode_impl(Dtype dtype, const std::byte* src, std::int64_t count, T* out) {
    switch (dtype) {
        case Dtype::BF16: {
            for (std::int64_t i = 0; i < count; ++i) {
                std::uint16_t bits;
                std::memcpy(&bits, src + 2 * i, 2);
                out[i] = static_cast<T>(bf16_to_f32(bits));
            }
            break;
        }
        case Dtype::F16: {
            for (std::int64_t i = 0; i < count; ++i) {
                std::uint16_t bits;
                std::memcpy(&bits, src + 2 * i, 2);
                out[i] = static_cast<T>(f16_to_f32(bits));
            }
            break;
        }
        case Dtype::F32: {
            for (std::int64_t i = 0; i < count; ++i) {
                float v;
                std::memcpy(&v, src + 4 * i, 4);
                out[i] = static_cast<T>(v);
            }
            break;
        }
        case Dtype::F64: {
            for (std::int64_t i = 0; i < count; ++i) {
                double v;
                std::memcpy(&v, src + 8 * i, 8);
                out[i] = static_cast<T>(v);
            }
            break;
        }
    }
}

}  // namespace

void decode_elements(Dtype dtype, const std::byte* src, std::int64_t count, float* out) {
    decode_impl(dtype, src, count, out);
}

void decode_elements(Dtype dtype, const std::byte* src, std::int64_t count, double* out) {
    decode_impl(dtype, src, count, out);
}

void encode_elements(Dtype dtype, const float* src, std::int64_t count, std::byte* out) {
    switch (dtype) {
        case Dtype::BF16:
            for (std::int64_t i = 0; i < count; ++i) {
                const std::uint16_t bits = f32_to_bf16(src[i]);
                std::memcpy(out + 2 * i, &bits, 2);
            }
            break;
        case Dtype::F16:
            for (std::int64_t i = 0; i < count; ++i) {
                const std::uint16_t bits = f32_to_f16(src[i]);
                std::memcpy(out + 2 * i, &bits, 2);
            }
            break;
        case Dtype::F32:
            std::memcpy(out, src, static_cast<std::size_t>(count) * 4);
            break;
        case Dtype::F64:
            for (std::int64_t i = 0; i < count; ++i) {
                const double v = static_cast<double>(src[i]);
                std::memcpy(out + 8 * i, &v, 8);
            }
            break;
    }
}

}  // namespace ckdiff
