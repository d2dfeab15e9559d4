#pragma once

// ECVRF-EDWARDS25519-SHA512-TAI (ciphersuite 0x03) built on libsodium's
// ed25519 group operations. Proofs are 80 bytes (gamma || c || s), outputs
// are the 64-byte SHA-512 hash of the cofactor-cleared gamma point.

#include <array>
#include <cstdint>
#include <optional>

#include "verasel/bytes.hpp"

namespace verasel::ecvrf {

inline constexpr std::size_t kSeedLen = 32;
inline constexpr std::size_t kPublicKeyLen = 32;
inline constexpr std::size_t kProofLen = 80;
inline constexpr std::size_t kOutputLen = 64;

namespace detail {

inline constexpr std::uint8_t kSuite = 0x03;

inline const std::array<std::uint8_t, 32>& identity_encoding() {
    static const std::array<std::uint8_t, 32> id = [] {
        std::array<std::uint8_t, 32> e{};
        e[0] = 1;
        return e;
    }();
    return id;
}

// Accepts exactly the canonical encodings of points on the curve, of any
// order. Adding the identity leaves the point unchanged, so this doubles as
// a normalizing decode check.
inline bool is_valid_point_encoding(const std::uint8_t p[32]) {
    std::uint8_t tmp[32];
    return crypto_core_ed25519_add(tmp, p, identity_encoding().data()) == 0;
}

// out = 8 * p (cofactor clearing). Requires p valid.
inline bool mul_cofactor8(std::uint8_t out[32], const std::uint8_t p[32]) {
    std::uint8_t d2[32], d4[32];
    if (crypto_core_ed25519_add(d2, p, p) != 0) return false;
    if (crypto_core_ed25519_add(d4, d2, d2) != 0) return false;
    if (crypto_core_ed25519_add(out, d4, d4) != 0) return false;
    return true;
}

// Group order L, little-endian.
inline constexpr std::array<std::uint8_t, 32> kOrderLe = {
    0xed, 0xd3, 0xf5, 0x5c, 0x1a, 0x63, 0x12, 0x58, 0xd6, 0x9c, 0xf7,
    0xa2, 0xde, 0xf9, 0xde, 0x14, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,
    0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x10};

inline bool scalar_is_canonical(const std::uint8_t s[32]) {
    for (int i = 31; i >= 0; --i) {
        if (s[i] < kOrderLe[static_cast<std::size_t>(i)]) return true;
        if (s[i] > kOrderLe[static_cast<std::size_t>(i)]) return false;
    }
    return false;  // s == L
}

inline bool scalar_is_zero(const std::uint8_t s[32]) {
    std::uint8_t acc = 0;
    for (int i = 0; i < 32; ++i) acc |= s[i];
    return acc == 0;
}

// Reduce a 32-byte little-endian integer mod L.
inline std::array<std::uint8_t, 32> scalar_reduce32(const std::uint8_t s[32]) {
    std::uint8_t wide[64] = {};
    std::memcpy(wide, s, 32);
    std::array<std::uint8_t, 32> out;
    crypto_core_ed25519_scalar_reduce(out.data(), wide);
    return out;
}

// ECVRF_hash_to_curve for the TAI suite: hash, interpret as a point, clear
// the cofactor, retry with the next counter byte until a non-identity point
// comes out.
inline bool hash_to_curve_tai(std::uint8_t out[32], ByteView pk, ByteView alpha) {
    const std::uint8_t front[2] = {kSuite, 0x01};
    const std::uint8_t back = 0x00;
    for (unsigned ctr = 0; ctr < 256; ++ctr) {
        const std::uint8_t ctr_byte = static_cast<std::uint8_t>(ctr);
        auto h = sha512({ByteView(front, 2), pk, alpha, ByteView(&ctr_byte, 1),
                         ByteView(&back, 1)});
        if (!is_valid_point_encoding(h.data())) continue;
        std::uint8_t cleared[32];
        if (!mul_cofactor8(cleared, h.data())) continue;
        if (std::memcmp(cleared, identity_encoding().data(), 32) == 0) continue;
        std::memcpy(out, cleared, 32);
        return true;
    }
    return false;
}

// c = first 16 bytes of Hash(suite || 0x02 || Y || H || Gamma || U || V || 0x00).
inline std::array<std::uint8_t, 16> challenge(const std::uint8_t y[32],
                                              const std::uint8_t h[32],
                                              const std::uint8_t gamma[32],
                                              const std::uint8_t u[32],
                                              const std::uint8_t v[32]) {
    const std::uint8_t front[2] = {kSuite, 0x02};
    const std::uint8_t back = 0x00;
    auto digest = sha512({ByteView(front, 2), ByteView(y, 32), ByteView(h, 32),
                          ByteView(gamma, 32), ByteView(u, 32), ByteView(v, 32),
                          ByteView(&back, 1)});
    std::array<std::uint8_t, 16> c;
    std::memcpy(c.data(), digest.data(), 16);
    return c;
}

struct ExpandedKey {
    std::array<std::uint8_t, 32> scalar;       // secret scalar, reduced mod L
    std::array<std::uint8_t, 32> nonce_half;   // upper half of SHA-512(seed)
    std::array<std::uint8_t, 32> public_key;
};

inline ExpandedKey expand_seed(ByteView seed) {
    if (seed.size() != kSeedLen) throw Error("ecvrf: secret key must be 32 bytes");
    auto h = sha512({seed});
    h[0] &= 0xf8;
    h[31] &= 0x7f;
    h[31] |= 0x40;
    ExpandedKey k;
    k.scalar = scalar_reduce32(h.data());
    std::memcpy(k.nonce_half.data(), h.data() + 32, 32);
    if (crypto_scalarmult_ed25519_base_noclamp(k.public_key.data(),
                                               k.scalar.data()) != 0) {
        throw Error("ecvrf: degenerate secret scalar");
    }
    return k;
}

}  // namespace detail

inline std::array<std::uint8_t, 32> public_key_from_seed(ByteView seed) {
    return detail::expand_seed(seed).public_key;
}

/// Prove: pi = gamma || c || s over the prover's secret seed and input alpha.
inline Bytes prove(ByteView seed, ByteView alpha) {
    auto key = detail::expand_seed(seed);

    std::uint8_t h[32];
    if (!detail::hash_to_curve_tai(h, ByteView(key.public_key.data(), 32), alpha)) {
        throw Error("ecvrf: hash_to_curve failed");
    }

    std::uint8_t gamma[32];
    if (crypto_scalarmult_ed25519_noclamp(gamma, key.scalar.data(), h) != 0) {
        throw Error("ecvrf: gamma computation failed");
    }

    auto k_wide = sha512({ByteView(key.nonce_half.data(), 32), ByteView(h, 32)});
    std::uint8_t k[32];
    crypto_core_ed25519_scalar_reduce(k, k_wide.data());

    std::uint8_t u[32], v[32];
    if (crypto_scalarmult_ed25519_base_noclamp(u, k) != 0 ||
        crypto_scalarmult_ed25519_noclamp(v, k, h) != 0) {
        throw Error("ecvrf: nonce point computation failed");
    }

    auto c16 = detail::challenge(key.public_key.data(), h, gamma, u, v);
    std::uint8_t c32[32] = {};
    std::memcpy(c32, c16.data(), 16);

    std::uint8_t cx[32], s[32];
    crypto_core_ed25519_scalar_mul(cx, c32, key.scalar.data());
    crypto_core_ed25519_scalar_add(s, k, cx);

    Bytes pi;
    pi.reserve(kProofLen);
    append(pi, ByteView(gamma, 32));
    append(pi, ByteView(c16.data(), 16));
    append(pi, ByteView(s, 32));
    return pi;
}

/// VRF output (beta) from a syntactically valid proof. Does not verify.
inline std::optional<Bytes> proof_to_hash(ByteView pi) {
    if (pi.size() != kProofLen) return std::nullopt;
    if (!detail::is_valid_point_encoding(pi.data())) return std::nullopt;
    std::uint8_t gamma8[32];
    if (!detail::mul_cofactor8(gamma8, pi.data())) return std::nullopt;
    const std::uint8_t front[2] = {detail::kSuite, 0x03};
    const std::uint8_t back = 0x00;
    auto beta = sha512({ByteView(front, 2), ByteView(gamma8, 32), ByteView(&back, 1)});
    return Bytes(beta.begin(), beta.end());
}

/// Full verification; true iff pi is a valid proof for (pk, alpha). All
/// malformed inputs return false, nothing throws.
inline bool verify(ByteView pk, ByteView alpha, ByteView pi) {
    if (pk.size() != kPublicKeyLen || pi.size() != kProofLen) return false;

    const std::uint8_t* gamma = pi.data();
    const std::uint8_t* c16 = pi.data() + 32;
    const std::uint8_t* s = pi.data() + 48;

    if (!detail::scalar_is_canonical(s) || detail::scalar_is_zero(s)) return false;
    if (!detail::is_valid_point_encoding(pk.data())) return false;
    if (!detail::is_valid_point_encoding(gamma)) return false;

    std::uint8_t h[32];
    if (!detail::hash_to_curve_tai(h, pk, alpha)) return false;

    std::uint8_t c32[32] = {};
    std::memcpy(c32, c16, 16);

    std::uint8_t s_b[32], c_y[32], u[32];
    if (crypto_scalarmult_ed25519_base_noclamp(s_b, s) != 0) return false;
    if (crypto_scalarmult_ed25519_noclamp(c_y, c32, pk.data()) != 0) return false;
    if (crypto_core_ed25519_sub(u, s_b, c_y) != 0) return false;

    std::uint8_t s_h[32], c_g[32], v[32];
    if (crypto_scalarmult_ed25519_noclamp(s_h, s, h) != 0) return false;
    if (crypto_scalarmult_ed25519_noclamp(c_g, c32, gamma) != 0) return false;
    if (crypto_core_ed25519_sub(v, s_h, c_g) != 0) return false;

    auto expected = detail::challenge(pk.data(), h, gamma, u, v);
    return sodium_memcmp(expected.data(), c16, 16) == 0;
}

}  // namespace verasel::ecvrf
