#pragma once

// Backend-agnostic crypto surface: keypairs, VRF prove/verify, signatures,
// and the hash-to-integer map. Two backends: "ecvrf" (Ed25519 + the ECVRF
// suite in ecvrf.hpp) and "mock" (keyed SHA-256, publicly recomputable,
// for oracle tests and large statistical runs; never selected by default).

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "verasel/bytes.hpp"
#include "verasel/ecvrf.hpp"

namespace verasel {

using NodeId = Bytes;  // canonical identifier: the public key's byte encoding
using Signature = Bytes;

struct KeyPair {
    Bytes secret_key;
    Bytes public_key;

    const NodeId& node_id() const { return public_key; }
};

struct VrfOutput {
    Bytes commitment_y;
    Bytes proof_pi;
};

enum class VrfResult { valid, invalid };

class CryptoError : public Error {
public:
    using Error::Error;
};

class CryptoBackend {
public:
    virtual ~CryptoBackend() = default;

    virtual std::string_view name() const = 0;
    virtual std::size_t commitment_len() const = 0;

    /// Fresh keypair; deterministic when a 32-byte rng_seed is supplied.
    virtual KeyPair keygen(std::optional<ByteView> rng_seed = std::nullopt) const = 0;
    virtual VrfOutput vrf_prove(ByteView secret_key, ByteView input) const = 0;
    virtual VrfResult vrf_verify(ByteView public_key, ByteView input,
                                 const VrfOutput& output) const = 0;
    virtual Signature sign(ByteView secret_key, ByteView msg) const = 0;
    virtual bool verify_sig(ByteView public_key, ByteView msg, ByteView sig) const = 0;
};

/// Digest of y as a 256-bit big-endian unsigned integer. Fixed algorithm
/// (SHA-256) and endianness, stable across platforms and restarts.
inline Hash256 hash_to_int(ByteView y) { return sha256(y); }

class EcvrfBackend final : public CryptoBackend {
public:
    std::string_view name() const override { return "ecvrf"; }
    std::size_t commitment_len() const override { return ecvrf::kOutputLen; }

    KeyPair keygen(std::optional<ByteView> rng_seed) const override {
        Bytes seed(ecvrf::kSeedLen);
        if (rng_seed) {
            if (rng_seed->size() != ecvrf::kSeedLen) {
                throw CryptoError("ecvrf keygen: rng seed must be 32 bytes");
            }
            std::memcpy(seed.data(), rng_seed->data(), seed.size());
        } else {
            randombytes_buf(seed.data(), seed.size());
        }
        auto pk = ecvrf::public_key_from_seed(view(seed));
        return KeyPair{std::move(seed), Bytes(pk.begin(), pk.end())};
    }

    VrfOutput vrf_prove(ByteView secret_key, ByteView input) const override {
        if (secret_key.size() != ecvrf::kSeedLen) {
            throw CryptoError("ecvrf vrf_prove: secret key must be 32 bytes");
        }
        Bytes pi = ecvrf::prove(secret_key, input);
        auto beta = ecvrf::proof_to_hash(view(pi));
        if (!beta) throw CryptoError("ecvrf: prove produced an undecodable proof");
        return VrfOutput{std::move(*beta), std::move(pi)};
    }

    VrfResult vrf_verify(ByteView public_key, ByteView input,
                         const VrfOutput& output) const override {
        if (!ecvrf::verify(public_key, input, view(output.proof_pi))) {
            return VrfResult::invalid;
        }
        auto beta = ecvrf::proof_to_hash(view(output.proof_pi));
        if (!beta || *beta != output.commitment_y) return VrfResult::invalid;
        return VrfResult::valid;
    }

    Signature sign(ByteView secret_key, ByteView msg) const override {
        if (secret_key.size() != crypto_sign_SEEDBYTES) {
            throw CryptoError("ecvrf sign: secret key must be 32 bytes");
        }
        std::uint8_t pk[crypto_sign_PUBLICKEYBYTES];
        std::uint8_t sk[crypto_sign_SECRETKEYBYTES];
        crypto_sign_seed_keypair(pk, sk, secret_key.data());
        Signature sig(crypto_sign_BYTES);
        crypto_sign_detached(sig.data(), nullptr, msg.data(), msg.size(), sk);
        sodium_memzero(sk, sizeof sk);
        return sig;
    }

    bool verify_sig(ByteView public_key, ByteView msg, ByteView sig) const override {
        if (public_key.size() != crypto_sign_PUBLICKEYBYTES ||
            sig.size() != crypto_sign_BYTES) {
            return false;
        }
        return crypto_sign_verify_detached(sig.data(), msg.data(), msg.size(),
                                           public_key.data()) == 0;
    }
};

// The mock's "public key" is the key itself, so every party can recompute
// y, proof and signature tags from board data alone. Insecure by design,
// deterministic by construction.
class MockBackend final : public CryptoBackend {
public:
    static constexpr std::size_t kKeyLen = 32;

    std::string_view name() const override { return "mock"; }
    std::size_t commitment_len() const override { return 32; }

    KeyPair keygen(std::optional<ByteView> rng_seed) const override {
        Bytes key(kKeyLen);
        if (rng_seed) {
            if (rng_seed->size() != kKeyLen) {
                throw CryptoError("mock keygen: rng seed must be 32 bytes");
            }
            std::memcpy(key.data(), rng_seed->data(), key.size());
        } else {
            randombytes_buf(key.data(), key.size());
        }
        return KeyPair{key, key};
    }

    VrfOutput vrf_prove(ByteView secret_key, ByteView input) const override {
        if (secret_key.size() != kKeyLen) {
            throw CryptoError("mock vrf_prove: secret key must be 32 bytes");
        }
        Hash256 y = sha256({view("verasel.mock.vrf"), secret_key, input});
        Hash256 pi = sha256({view("verasel.mock.proof"), secret_key, input, y.view()});
        return VrfOutput{Bytes(y.bytes.begin(), y.bytes.end()),
                         Bytes(pi.bytes.begin(), pi.bytes.end())};
    }

    VrfResult vrf_verify(ByteView public_key, ByteView input,
                         const VrfOutput& output) const override {
        if (public_key.size() != kKeyLen) return VrfResult::invalid;
        if (output.commitment_y.size() != 32 || output.proof_pi.size() != 32) {
            return VrfResult::invalid;
        }
        Hash256 y = sha256({view("verasel.mock.vrf"), public_key, input});
        Hash256 pi = sha256({view("verasel.mock.proof"), public_key, input, y.view()});
        bool ok = sodium_memcmp(y.bytes.data(), output.commitment_y.data(), 32) == 0 &&
                  sodium_memcmp(pi.bytes.data(), output.proof_pi.data(), 32) == 0;
        return ok ? VrfResult::valid : VrfResult::invalid;
    }

    Signature sign(ByteView secret_key, ByteView msg) const override {
        if (secret_key.size() != kKeyLen) {
            throw CryptoError("mock sign: secret key must be 32 bytes");
        }
        Hash256 tag = sha256({view("verasel.mock.sig"), secret_key, msg});
        return Signature(tag.bytes.begin(), tag.bytes.end());
    }

    bool verify_sig(ByteView public_key, ByteView msg, ByteView sig) const override {
        if (public_key.size() != kKeyLen || sig.size() != 32) return false;
        Hash256 tag = sha256({view("verasel.mock.sig"), public_key, msg});
        return sodium_memcmp(tag.bytes.data(), sig.data(), 32) == 0;
    }
};

inline const CryptoBackend& ecvrf_backend() {
    static const EcvrfBackend b;
    return b;
}

inline const CryptoBackend& mock_backend() {
    static const MockBackend b;
    return b;
}

inline const CryptoBackend& backend_by_name(std::string_view name) {
    if (name == "ecvrf") return ecvrf_backend();
    if (name == "mock") return mock_backend();
    throw CryptoError("unknown crypto backend: " + std::string(name));
}

// --- key files -------------------------------------------------------------
//
//   verasel-key-v1 <backend>
//   secret <hex>
//   public <hex>

inline constexpr std::string_view kKeyFileTag = "verasel-key-v1";

inline void save_key_file(const std::filesystem::path& path,
                          const CryptoBackend& backend, const KeyPair& kp) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot open key file for writing: " + path.string());
    out << kKeyFileTag << ' ' << backend.name() << '\n'
        << "secret " << to_hex(view(kp.secret_key)) << '\n'
        << "public " << to_hex(view(kp.public_key)) << '\n';
    if (!out) throw Error("failed writing key file: " + path.string());
}

struct LoadedKey {
    std::string backend_name;
    KeyPair keys;
};

inline LoadedKey load_key_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open key file: " + path.string());
    std::string tag, backend_name, label_s, hex_s, label_p, hex_p;
    if (!(in >> tag >> backend_name >> label_s >> hex_s >> label_p >> hex_p) ||
        tag != kKeyFileTag || label_s != "secret" || label_p != "public") {
        throw Error("malformed key file: " + path.string());
    }
    LoadedKey k{backend_name, KeyPair{from_hex(hex_s), from_hex(hex_p)}};
    // Cross-check the pair under its own backend.
    const auto& backend = backend_by_name(backend_name);
    Bytes probe = to_bytes("verasel.keyfile.probe");
    Signature sig = backend.sign(view(k.keys.secret_key), view(probe));
    if (!backend.verify_sig(view(k.keys.public_key), view(probe), view(sig))) {
        throw Error("key file secret/public mismatch: " + path.string());
    }
    return k;
}

}  // namespace verasel
