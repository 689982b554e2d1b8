#pragma once

#include <limits>
#include <optional>
#include <variant>
#include <vector>

namespace levy {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Side { Positive, Negative };

inline double sign_of(Side s) { return s == Side::Positive ? 1.0 : -1.0; }
inline Side opposite(Side s) { return s == Side::Positive ? Side::Negative : Side::Positive; }

/// A range of jump magnitudes |x| on one side of the origin. Defaults to the
/// half-open (lo, hi]; the closure flags only matter for atoms.
struct Window {
    double lo = 0.0;
    double hi = kInf;
    bool lo_closed = false;
    bool hi_closed = true;

    [[nodiscard]] bool contains(double magnitude) const {
        const bool above = lo_closed ? magnitude >= lo : magnitude > lo;
        const bool below = hi_closed ? magnitude <= hi : magnitude < hi;
        return above && below;
    }
    [[nodiscard]] bool empty() const { return hi < lo || (hi == lo && !(lo_closed && hi_closed)); }
};

struct Atom {
    double position;  ///< nonzero jump size
    double rate;      ///< jumps per unit time, > 0
};

struct AtomsComponent {
    std::vector<Atom> atoms;
};

/// Density c |x|^(-1-alpha) exp(-lambda |x|) for |x| > floor on one side.
struct PowerSideComponent {
    Side side = Side::Positive;
    double intensity = 0.0;  ///< c >= 0
    double index = 1.0;      ///< alpha; in (0, 2) unless floor > 0
    double tempering = 0.0;  ///< lambda >= 0
    double floor = 0.0;      ///< x_min >= 0
};

/// Piecewise-constant density on one side: density[i] applies to magnitudes
/// in (abscissae[i], abscissae[i+1]].
struct DensityTableComponent {
    Side side = Side::Positive;
    std::vector<double> abscissae;
    std::vector<double> density;
};

using MeasureComponent = std::variant<AtomsComponent, PowerSideComponent, DensityTableComponent>;

/// Windowed absolute moment of a single component; +inf when divergent.
double component_moment(const MeasureComponent& component, Side side, int k, const Window& w);

/// Declarative Levy measure: a finite sum of components. Everything the rest
/// of the library needs is expressed through windowed moments
///     moment(side, k, W) = integral over |x| in W on that side of |x|^k Pi(dx),
/// for k = 0, 1, 2. Closed forms are used where they exist; tempered power
/// components fall back to quadrature.
class MeasureSpec {
public:
    MeasureSpec() = default;
    /// Validates every component; throws ConfigError on a broken invariant.
    explicit MeasureSpec(std::vector<MeasureComponent> components);

    static MeasureSpec atoms(std::vector<Atom> atoms);

    [[nodiscard]] const std::vector<MeasureComponent>& components() const { return components_; }

    [[nodiscard]] double mass(Side side, const Window& w) const { return moment(side, 0, w); }
    /// Windowed absolute moment, possibly +inf.
    [[nodiscard]] double moment(Side side, int k, const Window& w) const;

    /// Pi((x, inf)) and Pi((-inf, -x)).
    [[nodiscard]] double tail(Side side, double x) const;

    /// Magnitudes where a tail is not smooth (atoms, floors, table nodes).
    [[nodiscard]] std::vector<double> kinks() const;

    /// Largest jump magnitude on a side, or nullopt when unbounded.
    [[nodiscard]] std::optional<double> support_bound(Side side) const;

    /// True when every windowed moment has a closed form (no tempering).
    [[nodiscard]] bool closed_form() const;

    /// Pi(-dx): the measure of -X.
    [[nodiscard]] MeasureSpec negated() const;
    /// Pi(dx / k): the measure of kX, k > 0.
    [[nodiscard]] MeasureSpec scaled(double k) const;
    /// Sum of two measures.
    [[nodiscard]] MeasureSpec plus(const MeasureSpec& other) const;

private:
    std::vector<MeasureComponent> components_;
};

struct LevyTriplet {
    double gamma = 0.0;   ///< linear coefficient, truncation at |x| = 1
    double sigma2 = 0.0;  ///< Brownian coefficient
    MeasureSpec measure;

    /// Throws ConfigError when sigma2 < 0 or the measure is invalid.
    void validate() const;

    /// Triplet of -X.
    [[nodiscard]] LevyTriplet negated() const;
    /// Triplet of kX, k > 0 (gamma picks up the change of truncation window).
    [[nodiscard]] LevyTriplet scaled(double k) const;
};

/// Mean of X_1 when it exists. Undefinedness is a value.
struct MeanValue {
    enum class Kind { Finite, PlusInfinite, MinusInfinite, Undefined };
    Kind kind = Kind::Finite;
    double value = 0.0;
    bool positive_part_finite = true;
    bool negative_part_finite = true;

    [[nodiscard]] bool finite() const { return kind == Kind::Finite; }
};

struct TailReport {
    double x = 0.0;
    double n_plus = 0.0;
    double m_minus = 0.0;
    double t_sum = 0.0;
    double d_diff = 0.0;
    double a_trunc = 0.0;
    double u_trunc = 0.0;
    double criterion = 0.0;  ///< 0 when A = 0; +-inf when U M = 0 and A != 0
};

// N(x), M(x), T(x), D(x)
double tail_plus(const MeasureSpec& measure, double x);
double tail_minus(const MeasureSpec& measure, double x);
struct TailSumDiff {
    double t_sum;
    double d_diff;
};
TailSumDiff tail_sum_diff(const MeasureSpec& measure, double x);

enum class Method {
    Auto,        ///< layer-cake identities over windowed moments
    Quadrature,  ///< direct adaptive quadrature of D(y) or y T(y)
};

/// A(x) = gamma + D(1) + int_1^x D(y) dy. For x < 1 the integral is signed.
double trunc_mean_A(const LevyTriplet& triplet, double x, Method method = Method::Auto);

/// U(x) = sigma^2 + 2 int_0^x y T(y) dy.
double trunc_second_U(const LevyTriplet& triplet, double x, Method method = Method::Auto);

/// gamma + int_{|x|>1} x Pi(dx), or the matching undefined marker.
MeanValue mean_EX1(const LevyTriplet& triplet);

/// Signed first moment int_{|x| in w} x Pi(dx) over both sides.
double signed_moment(const MeasureSpec& measure, const Window& w);

TailReport tail_report(const LevyTriplet& triplet, double x);

}  // namespace levy
