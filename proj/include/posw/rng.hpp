#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace posw {

/// Philox4x32-10 block function (Salmon et al., SC'11). Stateless: the output is a pure
/// function of (counter, key).
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key);
};

/// Counter-based stream. The seed is the Philox key and the stream id occupies the upper
/// half of the counter, so every (seed, stream_id) pair addresses a disjoint slice of the
/// same bijection; the lower half counts blocks drawn so far.
///
/// Satisfies UniformRandomBitGenerator so it can drive <random> distributions.
class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    /// Next 128 bits as a fresh Philox block.
    Philox4x32::Counter next_block();

    result_type operator()();

    /// Uniform double in (0, 1], 53-bit resolution.
    double uniform();

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }
    std::uint64_t blocks_drawn() const { return position_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t position_ = 0;
    std::uint64_t spare_ = 0;
    bool has_spare_ = false;
};

/// Maps 64 random bits onto (0, 1].
inline double u64_to_open_unit(std::uint64_t bits) {
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

}  // namespace posw
