#pragma once

#include <array>
#include <cstdint>

#include "fracstefan/types.hpp"

namespace fracstefan {

/**
 * Philox-4x32-10 counter-based generator. Each (key, counter) pair maps to
 * four independent 32-bit words, so streams indexed by (seed, particle,
 * step, purpose) are reproducible independent of scheduling.
 */
struct Philox {
    static std::array<uint32_t, 4> block(uint64_t key, uint32_t c0, uint32_t c1,
                                         uint32_t c2, uint32_t c3) {
        uint32_t k0 = static_cast<uint32_t>(key);
        uint32_t k1 = static_cast<uint32_t>(key >> 32);
        uint32_t x0 = c0, x1 = c1, x2 = c2, x3 = c3;
        for (int round = 0; round < 10; ++round) {
            uint64_t p0 = uint64_t(0xD2511F53u) * x0;
            uint64_t p1 = uint64_t(0xCD9E8D57u) * x2;
            uint32_t hi0 = static_cast<uint32_t>(p0 >> 32), lo0 = static_cast<uint32_t>(p0);
            uint32_t hi1 = static_cast<uint32_t>(p1 >> 32), lo1 = static_cast<uint32_t>(p1);
            uint32_t y0 = hi1 ^ x1 ^ k0;
            uint32_t y1 = lo1;
            uint32_t y2 = hi0 ^ x3 ^ k1;
            uint32_t y3 = lo0;
            x0 = y0; x1 = y1; x2 = y2; x3 = y3;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        return {x0, x1, x2, x3};
    }

    /// Four uniforms in (0, 1): (word + 1/2) * 2^-32.
    static std::array<Real, 4> uniforms(uint64_t key, uint64_t particle, uint32_t step,
                                        uint32_t purpose) {
        auto b = block(key, static_cast<uint32_t>(particle),
                       static_cast<uint32_t>(particle >> 32), step, purpose);
        constexpr Real scale = 1.0 / 4294967296.0;
        return {(b[0] + 0.5) * scale, (b[1] + 0.5) * scale, (b[2] + 0.5) * scale,
                (b[3] + 0.5) * scale};
    }
};

/// Stream purposes: keep move steps separated from setup draws.
enum : uint32_t {
    kPurposeMove = 0,
    kPurposeInit = 1,
    kPurposeInstant = 2,
    kPurposeReject = 3,
};

}  // namespace fracstefan
