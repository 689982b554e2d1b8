#pragma once

#include "levysandwich/measure.hpp"
#include "levysandwich/rng.hpp"

#include <cstddef>
#include <vector>

namespace levy {

/// Cutoff interval I = [-eta_minus, eta_plus].
struct Cutoff {
    double eta_minus = 1.0;
    double eta_plus = 1.0;

    void validate() const;
    [[nodiscard]] bool unit() const { return eta_minus == 1.0 && eta_plus == 1.0; }
    [[nodiscard]] double min() const { return eta_minus < eta_plus ? eta_minus : eta_plus; }
    [[nodiscard]] Cutoff mirrored() const { return {eta_plus, eta_minus}; }
};

/// Walker alias table over a finite set of weights.
class AliasTable {
public:
    AliasTable() = default;
    explicit AliasTable(const std::vector<double>& weights);

    [[nodiscard]] std::size_t sample(Stream& rng) const;
    [[nodiscard]] std::size_t size() const { return probability_.size(); }

private:
    std::vector<double> probability_;
    std::vector<std::size_t> alias_;
};

/// Exact sampler for the normalized restriction of Pi to
/// {x > 0 : x in positive} union {x < 0 : |x| in negative}.
///
/// Atoms are drawn categorically, power-law pieces by inverse CDF of the
/// truncated Pareto kernel with exponential-tempering rejection, and table
/// cells through an alias table followed by a uniform draw inside the cell.
class WindowSampler {
public:
    WindowSampler() = default;
    /// Throws ConfigError when the restricted mass is infinite.
    WindowSampler(const MeasureSpec& measure, Window positive, Window negative);

    [[nodiscard]] double total_mass() const { return total_; }
    [[nodiscard]] bool empty() const { return total_ == 0.0; }
    [[nodiscard]] double sample(Stream& rng) const;

private:
    enum class Kind { AtomSet, Power, TableSet };
    struct Piece {
        Kind kind;
        double sign = 1.0;
        // AtomSet
        std::vector<double> atom_positions;
        std::vector<double> atom_cumulative;
        // Power: density ~ y^(-1-alpha) exp(-lambda y) on (lo, hi]
        double alpha = 1.0;
        double lambda = 0.0;
        double lo = 0.0;
        double hi = kInf;
        // TableSet
        std::vector<double> cell_lo;
        std::vector<double> cell_hi;
        AliasTable cells;
    };

    [[nodiscard]] double sample_piece(const Piece& piece, Stream& rng) const;

    std::vector<Piece> pieces_;
    AliasTable choose_;
    double total_ = 0.0;
};

/// Windows of jump magnitudes outside and inside I, per side.
struct CutoffWindows {
    Window big_positive;
    Window big_negative;
    Window small_positive;
    Window small_negative;
};
CutoffWindows windows_of(const Cutoff& cutoff);

/// Law of J = the jumps outside I, normalized by Delta.
class BigJumpLaw {
public:
    BigJumpLaw() = default;
    BigJumpLaw(const MeasureSpec& measure, const Cutoff& cutoff);

    [[nodiscard]] double rate() const { return delta_; }
    /// P(J > x)
    [[nodiscard]] double upper_tail(double x) const;
    /// P(J < x)
    [[nodiscard]] double lower_tail(double x) const;
    /// P(J <= x)
    [[nodiscard]] double cdf(double x) const;
    [[nodiscard]] MeanValue mean() const;
    [[nodiscard]] double sample(Stream& rng) const { return sampler_.sample(rng); }

private:
    MeasureSpec measure_;
    Cutoff cutoff_;
    double delta_ = 0.0;
    WindowSampler sampler_;
};

/// X = (big jumps at Poisson(Delta) times) + X~, where X~ keeps the Brownian
/// part and the jumps inside I.
struct Decomposition {
    LevyTriplet triplet;
    Cutoff cutoff;
    double delta = 0.0;          ///< Pi(I^c)
    BigJumpLaw big_jumps;
    double small_sigma2 = 0.0;
    double small_drift = 0.0;    ///< E X~_1
    double small_mass = 0.0;     ///< Pi(I); may be +inf
    CutoffWindows windows;

    /// E X~(e_1) = small_drift / Delta.
    [[nodiscard]] double small_mean_per_step() const { return small_drift / delta; }
    [[nodiscard]] bool small_has_jumps() const { return small_mass > 0.0; }
};

/// Throws ZeroBigJumpRate when Pi(I^c) = 0.
Decomposition decompose(const LevyTriplet& triplet, const Cutoff& cutoff);

/// E X~_1 = gamma - int_{I^c, |x|<=1} x Pi(dx) + int_{I, |x|>1} x Pi(dx).
double drift_of_small(const LevyTriplet& triplet, const Cutoff& cutoff);

/// E Y^_1 = E J_1 + E X~_1 / Delta.
MeanValue step_mean(const Decomposition& decomposition);

}  // namespace levy
