#include "mlpit/rng.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mlpit/error.hpp"

namespace mlpit {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

constexpr std::uint32_t kMaxLevel = (1u << 24) - 1;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> c,
                                           std::array<std::uint32_t, 2> k) noexcept {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            k[0] += kWeyl0;
            k[1] += kWeyl1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, c[0], hi0, lo0);
        mulhilo(kMul1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
    return c;
}

// Counter layout: [block lo, block hi, sample index, level << 8 | purpose], key =
// experiment seed. Distinct keys therefore never share a (counter, key) pair.
RandomStream::RandomStream(const StreamKey& key) : key_(key) {
    if (key.level > kMaxLevel) {
        throw Error(ErrorCode::invalid_argument,
                    "stream level " + std::to_string(key.level) + " exceeds 2^24-1");
    }
    if (key.sample_index > 0xFFFFFFFFull) {
        throw Error(ErrorCode::invalid_argument, "stream sample index exceeds 2^32-1");
    }
    philox_key_ = {static_cast<std::uint32_t>(key.experiment_seed),
                   static_cast<std::uint32_t>(key.experiment_seed >> 32)};
    counter_tail_ = {static_cast<std::uint32_t>(key.sample_index),
                     (key.level << 8) | static_cast<std::uint32_t>(key.purpose)};
}

void RandomStream::refill() {
    buffer_ = philox4x32_10({static_cast<std::uint32_t>(block_),
                             static_cast<std::uint32_t>(block_ >> 32), counter_tail_[0],
                             counter_tail_[1]},
                            philox_key_);
    ++block_;
    consumed_ = 0;
}

double RandomStream::next_uniform() {
    if (consumed_ > 2) refill();
    const std::uint64_t hi = buffer_[consumed_];
    const std::uint64_t lo = buffer_[consumed_ + 1];
    consumed_ += 2;
    const std::uint64_t bits = ((hi << 32) | lo) >> 11;
    return static_cast<double>(bits) * 0x1.0p-53;
}

double RandomStream::next_gaussian() {
    if (has_cached_gaussian_) {
        has_cached_gaussian_ = false;
        return cached_gaussian_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    // 1 - u1 lies in (0, 1], so the log is finite.
    const double radius = std::sqrt(-2.0 * std::log1p(-u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_gaussian_ = radius * std::sin(angle);
    has_cached_gaussian_ = true;
    return radius * std::cos(angle);
}

std::vector<double> uniform(const StreamKey& key, std::size_t count) {
    RandomStream stream(key);
    std::vector<double> out(count);
    for (auto& u : out) u = stream.next_uniform();
    return out;
}

std::vector<double> gaussian_increments(const StreamKey& key, std::size_t count, double step) {
    if (!(step > 0.0)) {
        throw Error(ErrorCode::invalid_step, "gaussian increments need step > 0");
    }
    RandomStream stream(key);
    const double scale = std::sqrt(step);
    std::vector<double> out(count);
    for (auto& dw : out) dw = scale * stream.next_gaussian();
    return out;
}

}  // namespace mlpit
