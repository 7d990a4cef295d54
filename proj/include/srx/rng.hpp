#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace srx {

/// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Counter-based random stream for one Monte Carlo trial. The key is the
/// master seed and the upper counter words hold the trial index, so every
/// (seed, trial) pair owns an independent stream and trials can run in any
/// order or on any thread. Satisfies UniformRandomBitGenerator.
class RngStream {
public:
    using result_type = std::uint32_t;

    RngStream(std::uint64_t master_seed, std::uint64_t stream_index);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();

private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
};

} // namespace srx
