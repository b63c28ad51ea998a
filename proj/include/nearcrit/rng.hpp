#pragma once

#include <array>
#include <cstdint>

#include "nearcrit/hexlattice.hpp"

namespace nearcrit {

// Philox4x32-10 (Salmon et al., Random123). Stateless: the output is a pure
// function of (key, counter), which is what makes sampling independent of the
// order in which cells or replicas are processed.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;

    explicit Philox4x32(std::uint64_t key) : k0_(std::uint32_t(key)), k1_(std::uint32_t(key >> 32)) {}

    Counter operator()(Counter c) const {
        std::uint32_t k0 = k0_, k1 = k1_;
        for (int round = 0; round < 10; ++round) {
            std::uint64_t p0 = std::uint64_t(0xD2511F53u) * c[0];
            std::uint64_t p1 = std::uint64_t(0xCD9E8D57u) * c[2];
            c = {std::uint32_t(p1 >> 32) ^ c[1] ^ k0, std::uint32_t(p1), std::uint32_t(p0 >> 32) ^ c[3] ^ k1,
                 std::uint32_t(p0)};
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        return c;
    }

private:
    std::uint32_t k0_, k1_;
};

// Maps 64 random bits to a double strictly inside (0, 1).
inline double open_unit(std::uint32_t hi, std::uint32_t lo) {
    std::uint64_t bits = ((std::uint64_t(hi) << 32) | lo) >> 11;
    return (double(bits) + 0.5) * 0x1.0p-53;
}

// Purpose tags keep streams for different uses of the same seed apart.
enum class StreamTag : std::uint32_t {
    Configuration = 1,
    Inner = 2,
    Calibration = 3,
    Quad = 4,
    Arms = 5,
    Scale = 6,
};

// One uniform per (seed, replica, tag, cell). The tag word also carries a
// 24-bit sub-stream index (e.g. an inner sample number).
class UniformStream {
public:
    UniformStream(std::uint64_t seed, std::uint32_t replica, StreamTag tag, std::uint32_t sub = 0)
        : gen_(seed), replica_(replica), word_((std::uint32_t(tag) << 24) ^ (sub & 0xFFFFFFu)) {}

    double operator()(HexCoord h) const {
        auto out = gen_({std::uint32_t(h.a), std::uint32_t(h.b), replica_, word_});
        return open_unit(out[0], out[1]);
    }

    // Uniform for an abstract index rather than a cell.
    double at(std::uint64_t index) const {
        auto out = gen_({std::uint32_t(index), std::uint32_t(index >> 32) ^ 0x80000000u, replica_, word_});
        return open_unit(out[0], out[1]);
    }

private:
    Philox4x32 gen_;
    std::uint32_t replica_;
    std::uint32_t word_;
};

// Derives a child seed; used to give each experiment component its own key.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace nearcrit
