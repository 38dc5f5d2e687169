#pragma once

// Keyed, counter-based random streams.
//
// Every stream is identified by a StreamKey and produced by Philox4x32-10, so
// variates depend only on the key and the position within the stream, never on
// the order in which streams are consumed. Gaussians use Box-Muller on pairs of
// uniforms.

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace mlpit {

enum class StreamPurpose : std::uint32_t {
    path_noise = 0,
    quantile_uniform = 1,
    observation_noise = 2,
};

struct StreamKey {
    std::uint64_t experiment_seed = 0;
    std::uint32_t level = 0;
    std::uint64_t sample_index = 0;
    StreamPurpose purpose = StreamPurpose::path_noise;

    friend bool operator==(const StreamKey&, const StreamKey&) = default;
};

/// Raw Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

/// Sequential reader over the stream addressed by a key. Copying a stream copies
/// its position.
class RandomStream {
public:
    explicit RandomStream(const StreamKey& key);

    /// Uniform on [0, 1) with 53 random bits.
    double next_uniform();
    /// Standard normal.
    double next_gaussian();

    const StreamKey& key() const noexcept { return key_; }

private:
    void refill();

    StreamKey key_;
    std::array<std::uint32_t, 2> philox_key_{};
    std::array<std::uint32_t, 2> counter_tail_{};
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    unsigned consumed_ = 4;
    double cached_gaussian_ = 0.0;
    bool has_cached_gaussian_ = false;
};

std::vector<double> uniform(const StreamKey& key, std::size_t count);

/// i.i.d. N(0, step) variates. Throws ErrorCode::invalid_step for step <= 0.
std::vector<double> gaussian_increments(const StreamKey& key, std::size_t count, double step);

}  // namespace mlpit
