#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <sodium.h>

namespace verasel {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Call before any crypto use. Safe to call repeatedly.
inline void crypto_init() {
    if (sodium_init() < 0) {
        throw Error("libsodium initialization failed");
    }
}

inline ByteView view(const Bytes& b) { return ByteView(b.data(), b.size()); }

inline ByteView view(std::string_view s) {
    return ByteView(reinterpret_cast<const std::uint8_t*>(s.data()), s.size());
}

inline Bytes to_bytes(std::string_view s) {
    return Bytes(s.begin(), s.end());
}

inline void append(Bytes& out, ByteView part) {
    out.insert(out.end(), part.begin(), part.end());
}

inline Bytes concat(std::initializer_list<ByteView> parts) {
    Bytes out;
    std::size_t total = 0;
    for (auto p : parts) total += p.size();
    out.reserve(total);
    for (auto p : parts) append(out, p);
    return out;
}

// Integers cross module and file boundaries as 8-byte big-endian.
inline std::array<std::uint8_t, 8> be64(std::uint64_t v) {
    std::array<std::uint8_t, 8> out{};
    for (int i = 7; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v & 0xff);
        v >>= 8;
    }
    return out;
}

inline void append_be64(Bytes& out, std::uint64_t v) {
    auto enc = be64(v);
    out.insert(out.end(), enc.begin(), enc.end());
}

inline std::uint64_t read_be64(ByteView in) {
    if (in.size() < 8) throw Error("read_be64: truncated input");
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < 8; ++i) v = (v << 8) | in[i];
    return v;
}

inline std::string to_hex(ByteView in) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(in.size() * 2);
    for (auto b : in) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0f]);
    }
    return out;
}

inline int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

inline Bytes from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) throw Error("from_hex: odd-length hex string");
    Bytes out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_nibble(hex[i]);
        int lo = hex_nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) throw Error("from_hex: invalid hex character");
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return out;
}

/// 256-bit unsigned integer, big-endian byte order. Lexicographic byte
/// comparison coincides with numeric comparison.
struct Hash256 {
    std::array<std::uint8_t, 32> bytes{};

    auto operator<=>(const Hash256&) const = default;

    ByteView view() const { return ByteView(bytes.data(), bytes.size()); }

    std::string hex() const { return to_hex(view()); }

    /// Value modulo m, via base-256 long division. m must be nonzero.
    std::uint64_t mod(std::uint64_t m) const {
        if (m == 0) throw Error("Hash256::mod: zero modulus");
        unsigned __int128 r = 0;
        for (auto b : bytes) {
            r = ((r << 8) | b) % m;
        }
        return static_cast<std::uint64_t>(r);
    }

    static Hash256 from_hex_str(std::string_view hex) {
        Bytes raw = from_hex(hex);
        if (raw.size() != 32) throw Error("Hash256: expected 32 bytes");
        Hash256 h;
        std::memcpy(h.bytes.data(), raw.data(), 32);
        return h;
    }
};

inline Hash256 sha256(ByteView in) {
    Hash256 out;
    crypto_hash_sha256(out.bytes.data(), in.data(), in.size());
    return out;
}

inline Hash256 sha256(std::initializer_list<ByteView> parts) {
    crypto_hash_sha256_state st;
    crypto_hash_sha256_init(&st);
    for (auto p : parts) crypto_hash_sha256_update(&st, p.data(), p.size());
    Hash256 out;
    crypto_hash_sha256_final(&st, out.bytes.data());
    return out;
}

inline std::array<std::uint8_t, 64> sha512(std::initializer_list<ByteView> parts) {
    crypto_hash_sha512_state st;
    crypto_hash_sha512_init(&st);
    for (auto p : parts) crypto_hash_sha512_update(&st, p.data(), p.size());
    std::array<std::uint8_t, 64> out;
    crypto_hash_sha512_final(&st, out.data());
    return out;
}

}  // namespace verasel
