#pragma once

// Counter-based random numbers: Philox4x32-10 keyed by the run seed, with the
// counter carrying (block, stream, path index). Every path owns its own
// substreams, so its variates do not depend on scheduling.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include <boost/random/normal_distribution.hpp>

namespace sle4::rng {

using Block = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

namespace detail {

inline constexpr std::uint32_t mult0 = 0xD2511F53u;
inline constexpr std::uint32_t mult1 = 0xCD9E8D57u;
inline constexpr std::uint32_t weyl0 = 0x9E3779B9u;
inline constexpr std::uint32_t weyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(prod >> 32);
    lo = static_cast<std::uint32_t>(prod);
}

}  // namespace detail

/// Philox4x32 with ten rounds.
inline Block philox4x32_10(Block ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        detail::mulhilo(detail::mult0, ctr[0], hi0, lo0);
        detail::mulhilo(detail::mult1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += detail::weyl0;
        key[1] += detail::weyl1;
    }
    return ctr;
}

/// Uniform in the open interval (0, 1) from a 32-bit word.
inline double to_open_unit(std::uint32_t w) { return (static_cast<double>(w) + 0.5) * 0x1p-32; }

/// Streams carried in the second counter word.
enum class Stream : std::uint32_t { Normal = 0, Barrier = 1 };

/// Uniform random bit generator over one (seed, path, stream) substream:
/// consecutive Philox blocks, two 32-bit words per 64-bit output.
class PhiloxEngine {
public:
    using result_type = std::uint64_t;

    PhiloxEngine(std::uint64_t seed, std::uint64_t path, Stream stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          path_lo_(static_cast<std::uint32_t>(path)),
          path_hi_(static_cast<std::uint32_t>(path >> 32)),
          stream_(static_cast<std::uint32_t>(stream)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()() {
        if (pos_ == 4) {
            buffer_ = block(next_block_++);
            pos_ = 0;
        }
        const result_type lo = buffer_[pos_];
        const result_type hi = buffer_[pos_ + 1];
        pos_ += 2;
        return lo | (hi << 32);
    }

    /// Block `index` of this substream, independent of the sequential position.
    [[nodiscard]] Block block(std::uint64_t index) const {
        const Block ctr{static_cast<std::uint32_t>(index),
                        stream_ | (static_cast<std::uint32_t>(index >> 32) << 8), path_lo_, path_hi_};
        return philox4x32_10(ctr, key_);
    }

private:
    Key key_;
    std::uint32_t path_lo_;
    std::uint32_t path_hi_;
    std::uint32_t stream_;
    std::uint64_t next_block_ = 0;
    Block buffer_{};
    unsigned pos_ = 4;
};

/// Variates of one simulated path. Normals are drawn sequentially (ziggurat
/// method of Boost.Random over the Normal substream); the two barrier uniforms
/// of a step are addressed directly by the step index in the Barrier substream.
class PathNoise {
public:
    PathNoise(std::uint64_t seed, std::uint64_t path)
        : normals_(seed, path, Stream::Normal), barrier_(seed, path, Stream::Barrier) {}

    /// Next standard normal of this path.
    double next_normal() { return unit_normal_(normals_); }

    /// Two uniforms in (0, 1) attached to `step` (barrier at 0, barrier at 2 pi).
    [[nodiscard]] std::array<double, 2> barrier_uniforms(std::uint64_t step) const {
        const Block b = barrier_.block(step >> 1);
        const unsigned off = static_cast<unsigned>(step & 1u) * 2u;
        return {to_open_unit(b[off]), to_open_unit(b[off + 1])};
    }

private:
    PhiloxEngine normals_;
    PhiloxEngine barrier_;
    boost::random::normal_distribution<double> unit_normal_{0.0, 1.0};
};

}  // namespace sle4::rng
