#pragma once

#include "levysandwich/decomposition.hpp"
#include "levysandwich/measure.hpp"
#include "levysandwich/path_engine.hpp"
#include "levysandwich/stats.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace levy {

enum class Verdict { DriftsToPlusInfinity, DoesNotDriftToPlusInfinity, Inconclusive };
enum class Branch { Criterion, FiniteMean };

const char* to_string(Verdict v);
const char* to_string(Branch b);

struct Thresholds {
    double drift = 10.0;   ///< criterion at the top of the grid must exceed this
    double bounded = 1.0;  ///< criterion below this over the top half means no drift
};

/// Monte Carlo estimate of a probability at one t or r.
struct McPoint {
    double at = 0.0;
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
    std::size_t excluded = 0;  ///< runs that hit the time cap (exit estimates only)
};

struct CriterionReport {
    std::vector<TailReport> grid;
    Verdict verdict = Verdict::Inconclusive;
    Branch branch = Branch::Criterion;
    std::optional<double> log_slope;  ///< fitted d log(criterion) / d log x over the top half
    std::vector<McPoint> mc_positivity;
    std::vector<McPoint> mc_exit;
    std::string notes;
};

/// A(x) / sqrt(U(x) M(x)); 0 whenever A(x) = 0, +-inf when the denominator
/// vanishes with A != 0.
double criterion_value(const LevyTriplet& triplet, double x);

/// n points from lo to hi, equally spaced in log x.
std::vector<double> geometric_grid(double lo, double hi, std::size_t n);

/// Evidence-based verdict over a geometric grid of at least 8 points.
CriterionReport classify(const LevyTriplet& triplet, std::span<const double> x_grid, Thresholds thresholds = {});

/// Fraction of runs with X_t > 0. X_t is drawn exactly in law (no grid).
McPoint mc_positivity(const LevyTriplet& triplet, double t, std::size_t replications, const SimConfig& config);

/// Fraction of runs leaving (-r, r) at the top. Runs hitting config.time_cap
/// are excluded and counted.
McPoint mc_exit_positivity(const LevyTriplet& triplet, double r, std::size_t replications, const SimConfig& config);

struct ScalingReport {
    double delta = 0.0;
    double alpha = 1.0;
    double walk_limit = 0.0;       ///< c^ = mean S^_n / n^alpha
    double walk_stderr = 0.0;
    double process_limit = 0.0;    ///< L^ = mean X_t / t^alpha
    double process_stderr = 0.0;
    double ratio = 0.0;            ///< L^ / c^
    double renewal_constant = 0.0; ///< Delta^alpha, from N_t / t -> Delta
    double stated_constant = 0.0;  ///< 1 / Delta^alpha, reported for comparison
    bool vacuous = false;          ///< both limits ~ 0: the ratio carries no information
    std::string notes;
};

/// Estimates the a.s. limits of S^_n / n^alpha and X_t / t^alpha and their ratio.
ScalingReport scaling_diagnostic(const LevyTriplet& triplet, const Cutoff& cutoff, double alpha, std::size_t n,
                                 double t, std::size_t replications, const SimConfig& config);

/// Truncated moments of the shifted big-jump law F*, the law of
/// J* = J + gamma / Delta (unit cutoff only).
struct WalkFunctionals {
    double x = 0.0;
    double shift = 0.0;              ///< gamma / Delta
    double a_star = 0.0;             ///< int_0^x {P(J* > y) - P(J* <= -y)} dy
    double u_star = 0.0;             ///< 2 int_0^x y {P(J* > y) + P(J* <= -y)} dy
    double delta_upper = 0.0;        ///< Delta P(J > x), unshifted
    double delta_lower = 0.0;        ///< Delta P(J < -x), unshifted
    double delta_upper_shifted = 0.0;  ///< Delta P(J* > x)
    double delta_lower_shifted = 0.0;  ///< Delta P(J* <= -x)
};

/// Throws ConfigError unless eta_minus = eta_plus = 1.
WalkFunctionals walk_functionals(const Decomposition& decomposition, double x);

/// The constant C in Delta A*(x + gamma/Delta) = A(x) + C + o(1), evaluated
/// as Delta A*(x + gamma/Delta) - A(x) at a point x beyond every kink of
/// the measure inside [0, x].
double walk_constant(const Decomposition& decomposition, double x);

struct IdentityReport {
    stats::TestReport coupled;       ///< max scale-relative |X_t - (S*_{N_t} + X~_t - (gamma/Delta) N_t)|
    stats::TestReport uncoupled;     ///< KS of X_t against the right side built from independent parts
    double literal_mean_abs = 0.0;   ///< mean |gamma (N_t / Delta - t)|: the gap of the -gamma t form
    std::size_t runs_without_jumps = 0;
};

/// Pathwise check of X_t = S*_{N_t} + X~_t - (gamma/Delta) N_t on coupled
/// components (unit cutoff only).
IdentityReport decomposition_identity_check(const LevyTriplet& triplet, double t, std::size_t replications,
                                            const SimConfig& config);

}  // namespace levy
