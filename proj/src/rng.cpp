#include "levysandwich/rng.hpp"

#include <cmath>
#include <numbers>

namespace levy {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

Stream::Stream(std::uint64_t seed, std::uint64_t stream_id) : stream_id_(stream_id) {
    key_ = {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

void Stream::refill() {
    buffer_ = Philox4x32::block({static_cast<std::uint32_t>(block_index_),
                                 static_cast<std::uint32_t>(block_index_ >> 32),
                                 static_cast<std::uint32_t>(stream_id_),
                                 static_cast<std::uint32_t>(stream_id_ >> 32)},
                                key_);
    ++block_index_;
    buffered_ = 4;
}

std::uint64_t Stream::next_u64() {
    if (buffered_ < 2) refill();
    const int i = 4 - buffered_;
    buffered_ -= 2;
    return (static_cast<std::uint64_t>(buffer_[i]) << 32) | buffer_[i + 1];
}

double Stream::uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Stream::exponential(double rate) { return -std::log(uniform()) / rate; }

double Stream::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    cached_normal_ = radius * std::sin(angle);
    has_cached_normal_ = true;
    return radius * std::cos(angle);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    return splitmix64(seed ^ splitmix64(tag + 0x632BE59BD9B4E019ull));
}

}  // namespace levy
