#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace levy {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// A block is a pure function of (key, counter), so any stream can be
/// addressed directly without sequential skipping.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter counter, Key key);
};

/// One independent random stream addressed by (seed, stream_id).
///
/// Replication r of any Monte Carlo loop draws from Stream(seed, r), so the
/// result of a run does not depend on how replications are spread over
/// worker threads. Draw counter occupies the low 64 counter bits, the
/// stream id the high 64.
class Stream {
public:
    using result_type = std::uint64_t;

    Stream(std::uint64_t seed, std::uint64_t stream_id);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()() { return next_u64(); }

    std::uint64_t next_u64();

    /// Uniform on the open interval (0, 1) with 53 random bits.
    double uniform();

    /// Exp(rate) variate; mean 1/rate.
    double exponential(double rate);

    /// Standard normal via Box-Muller; the second variate is cached.
    double normal();

    [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_id_; }

private:
    void refill();

    Philox4x32::Key key_{};
    std::uint64_t stream_id_;
    std::uint64_t block_index_ = 0;
    Philox4x32::Counter buffer_{};
    int buffered_ = 0;  // 32-bit words left in buffer_
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

/// Derives a seed for a named sub-experiment, so that e.g. the S(+) paths
/// and the independent S-hat paths of one verification never share streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

}  // namespace levy
