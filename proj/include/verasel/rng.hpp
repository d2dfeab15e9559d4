#pragma once

// Deterministic randomness for simulations. std::mt19937_64 is fully
// specified, and all value derivation below avoids the distribution
// classes (whose algorithms vary by standard library), so identical seeds
// give identical transcripts on every platform.

#include <cmath>
#include <cstdint>
#include <random>

#include "verasel/bytes.hpp"

namespace verasel {

class DetRng {
public:
    explicit DetRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t u64() { return engine_(); }

    /// Uniform integer in [0, bound). bound must be nonzero.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw Error("DetRng::below: zero bound");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t r;
        do {
            r = engine_();
        } while (r >= limit);
        return r % bound;
    }

    /// Uniform double in [0, 1) with 53 bits of precision.
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do {
            u1 = unit();
        } while (u1 <= 0.0);
        u2 = unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    /// 32 deterministic bytes derived from a label and counter, independent
    /// of engine state. Used for per-node key and nonce material.
    static std::array<std::uint8_t, 32> derive(std::string_view label,
                                               std::uint64_t seed,
                                               std::uint64_t index) {
        auto be_seed = be64(seed);
        auto be_index = be64(index);
        return sha256({view(label), ByteView(be_seed.data(), 8),
                       ByteView(be_index.data(), 8)})
            .bytes;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace verasel
