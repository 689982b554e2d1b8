#pragma once

#include "levysandwich/decomposition.hpp"
#include "levysandwich/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace levy {

struct Horizon {
    enum class Kind { Steps, Time };
    Kind kind = Kind::Steps;
    double value = 10.0;

    static Horizon steps(std::size_t n) { return {Kind::Steps, static_cast<double>(n)}; }
    static Horizon time(double t) { return {Kind::Time, t}; }
};

/// How interval extremes of X~ are produced.
enum class ExtremesMode {
    Grid,           ///< walk a fine grid; sup/inf carry an O(sqrt(h)) bias when sigma > 0
    ExactBrownian,  ///< Wiener-Hopf sampler; upper extremes only, no small jumps allowed
};

struct SimConfig {
    std::uint64_t seed = 1;
    double grid_step = 1e-3;
    double inner_cutoff = 0.0;  ///< epsilon: jumps with |x| <= epsilon are not simulated one by one
    Horizon horizon;
    std::size_t replications = 1000;
    int workers = 1;
    double time_cap = 1e6;       ///< exit-time simulations give up here
    ExtremesMode extremes = ExtremesMode::Grid;
    bool record_fine_path = false;
    Cutoff cutoff;               ///< used by operations that take a bare triplet

    void validate() const;
};

/// Simulation recipe for X~ over one inter-jump interval.
///
/// Jumps inside I with |x| > epsilon form a compound Poisson process. The
/// jumps below epsilon are replaced by a Gaussian of matching variance when
/// that variance exceeds 10 epsilon^2, and dropped otherwise; in both cases
/// the linear drift is set so that E X~_1 is reproduced exactly.
class SmallProcess {
public:
    SmallProcess(const Decomposition& decomposition, const SimConfig& config);

    [[nodiscard]] double drift() const { return drift_; }
    [[nodiscard]] double diffusion() const { return diffusion_; }
    [[nodiscard]] double jump_rate() const { return jumps_.total_mass(); }
    [[nodiscard]] double sample_jump(Stream& rng) const { return jumps_.sample(rng); }
    [[nodiscard]] double surrogate_variance() const { return surrogate_variance_; }
    /// Per-unit-time variance of the sub-epsilon jumps that were dropped.
    [[nodiscard]] double dropped_variance() const { return dropped_variance_; }
    [[nodiscard]] bool brownian_only() const { return jumps_.empty() && surrogate_variance_ == 0.0 && dropped_variance_ == 0.0; }
    [[nodiscard]] std::string describe() const;

private:
    double drift_ = 0.0;
    double diffusion_ = 0.0;
    double surrogate_variance_ = 0.0;
    double dropped_variance_ = 0.0;
    WindowSampler jumps_;
};

/// One fine-path epoch. Times and values are absolute; `interval` is the
/// skeleton interval n with tau_n <= t < tau_{n+1}. A jump contributes two
/// points with the same t: the left limit (interval n-1) and the post-jump
/// value (interval n).
struct FinePoint {
    double t;
    double x;
    std::size_t interval;
};

struct SmallInterval {
    double increment = 0.0;  ///< X~ at the end of the interval, relative to its start
    double sup = 0.0;        ///< sup over [0, e) of the re-centred X~; >= 0
    double inf = 0.0;        ///< inf over [0, e); <= 0; NaN when not produced
};

/// One interval of the skeleton before assembly.
struct IntervalDraw {
    double gap;        ///< e_{n+1}
    SmallInterval small;
};

/// One simulated big-jump skeleton with n jumps and n+1 intervals
/// [tau_0, tau_1), ..., [tau_n, tau_{n+1}).
struct SkeletonPath {
    std::vector<double> taus;              ///< tau_0 = 0, ..., tau_n (n+1 entries)
    std::vector<double> gaps;              ///< e_1 .. e_{n+1} (n+1 entries; the last may be truncated)
    std::vector<double> jumps;             ///< J_1 .. J_n
    std::vector<double> small_increments;  ///< X~ increment over interval 0..n
    std::vector<double> s_hat;             ///< S^_0 .. S^_n
    std::vector<double> m_tilde;           ///< m~_0 .. m~_n
    std::vector<double> i_tilde;           ///< i~_0 .. i~_n, empty without lower extremes
    std::vector<double> upper;             ///< M_0 .. M_n
    std::vector<double> lower;             ///< I_0 .. I_n, empty without lower extremes
    std::vector<FinePoint> fine;           ///< empty unless requested
    bool gaps_coupled = true;              ///< false in ExactBrownian mode: gaps are drawn apart from values
    std::optional<double> truncated_at;    ///< time horizon that cut the last interval

    [[nodiscard]] std::size_t steps() const { return jumps.size(); }
    [[nodiscard]] bool has_lower() const { return !lower.empty(); }
    /// X at the end of the simulated window (left limit at tau_{n+1}).
    [[nodiscard]] double terminal_value() const { return s_hat.back() + small_increments.back(); }
};

/// Pure assembly of a skeleton from its components (n+1 intervals, n jumps).
SkeletonPath assemble_skeleton(std::span<const IntervalDraw> intervals, std::span<const double> jumps,
                               bool has_lower);

/// Path of -X built from a path of X.
SkeletonPath negated(const SkeletonPath& path);

std::vector<double> sample_exponential_gaps(Stream& rng, double delta, std::size_t n);

/// Simulates X~ over [0, duration). Records local (t, x) points into `trace`
/// when given. Without diffusion and without a trace the path is piecewise
/// linear and only jump epochs are visited, which makes the extremes exact.
SmallInterval simulate_small_interval(Stream& rng, const SmallProcess& small, double duration, double grid_step,
                                      std::vector<FinePoint>* trace = nullptr);

struct BrownianExtremes {
    double increment;
    double sup;
};

/// Exact (X~(e), sup_{[0,e)} X~) for X~ = mu t + sigma B_t and e ~ Exp(delta)
/// independent: sup ~ Exp(theta_plus) and X~(e) - sup ~ -Exp(theta_minus),
/// independent, with theta_pm = (sqrt(mu^2 + 2 sigma2 delta) -+ mu) / sigma2.
BrownianExtremes exact_brownian_sup_sampler(Stream& rng, double mu, double sigma2, double delta);

struct ExitResult {
    double time;
    bool exited_top;
    double overshoot;  ///< |X_{T_r}| - r
};

/// Monte Carlo driver for one decomposition under one configuration.
class PathSimulator {
public:
    PathSimulator(Decomposition decomposition, SimConfig config);

    [[nodiscard]] const Decomposition& decomposition() const { return decomposition_; }
    [[nodiscard]] const SimConfig& config() const { return config_; }
    [[nodiscard]] const SmallProcess& small() const { return small_; }

    /// Skeleton with n big jumps (n+1 intervals).
    [[nodiscard]] SkeletonPath sample_skeleton(Stream& rng, std::size_t n) const;
    /// Skeleton covering [0, t]; the last interval is cut at t.
    [[nodiscard]] SkeletonPath sample_skeleton_until(Stream& rng, double t) const;
    /// S^_0..S^_n only; no extremes, exact in law.
    [[nodiscard]] std::vector<double> sample_walk(Stream& rng, std::size_t n) const;

    struct ValueParts {
        std::size_t jump_count;  ///< N_t
        double jump_sum;         ///< sum of big jumps up to t
        double small_value;      ///< X~_t
        [[nodiscard]] double value() const { return jump_sum + small_value; }
    };
    /// X_t split into its independent parts; exact in law (no grid).
    [[nodiscard]] ValueParts sample_value(Stream& rng, double t) const;

    /// First epoch with |X| > r, or nullopt if the time cap is hit first.
    [[nodiscard]] std::optional<ExitResult> try_exit(Stream& rng, double r) const;

private:
    [[nodiscard]] SmallInterval draw_interval(Stream& rng, double duration, std::vector<FinePoint>* trace) const;

    Decomposition decomposition_;
    SimConfig config_;
    SmallProcess small_;
};

/// Skeleton of length n for one replication.
SkeletonPath sample_skeleton(Stream& rng, const Decomposition& decomposition, std::size_t n, const SimConfig& config);

/// Two-sided exit of (-r, r). Throws HorizonExceeded when config.time_cap is reached.
ExitResult exit_time(Stream& rng, const LevyTriplet& triplet, double r, const SimConfig& config);

struct LevelEnvelope {
    Cutoff cutoff;
    std::vector<double> starts;  ///< tau^(k)_n
    std::vector<double> upper;   ///< M^(k)_n
    std::vector<double> lower;   ///< I^(k)_n
    std::vector<std::size_t> level_interval;  ///< finest interval -> interval at this level
};

struct MultilevelResult {
    SkeletonPath finest;
    std::vector<LevelEnvelope> levels;  ///< coarse to fine
    bool nested = true;                 ///< U^(k+1) <= U^(k) and L^(k+1) >= L^(k) at every fine point
    bool contained = true;              ///< L^(k) <= X <= U^(k) at every fine point
    std::vector<double> max_gap;        ///< max over fine points of U^(k) - L^(k)

    [[nodiscard]] double upper_at(std::size_t level, const FinePoint& p) const {
        return levels[level].upper[levels[level].level_interval[p.interval]];
    }
    [[nodiscard]] double lower_at(std::size_t level, const FinePoint& p) const {
        return levels[level].lower[levels[level].level_interval[p.interval]];
    }
};

/// One path simulated with the finest cutoff; each coarser level takes its
/// sup/inf over its own (coarser) partition of the same path. Cutoffs must
/// shrink strictly on both sides. The horizon comes from config.horizon.
MultilevelResult multilevel_bounds(Stream& rng, const LevyTriplet& triplet, std::span<const Cutoff> levels,
                                   const SimConfig& config);

}  // namespace levy
