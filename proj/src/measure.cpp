#include "levysandwich/measure.hpp"

#include "levysandwich/errors.hpp"
#include "levysandwich/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace levy {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Side side_of(double position) { return position > 0.0 ? Side::Positive : Side::Negative; }

void validate(const AtomsComponent& c, std::size_t index) {
    for (const Atom& a : c.atoms) {
        if (!std::isfinite(a.position) || a.position == 0.0)
            throw ConfigError("measure[" + std::to_string(index) + "]: atom position must be finite and nonzero");
        if (!std::isfinite(a.rate) || !(a.rate > 0.0))
            throw ConfigError("measure[" + std::to_string(index) + "]: atom rate must be positive");
    }
}

void validate(const PowerSideComponent& c, std::size_t index) {
    const std::string where = "measure[" + std::to_string(index) + "]: ";
    if (!std::isfinite(c.intensity) || c.intensity < 0.0)
        throw ConfigError(where + "power intensity c must be >= 0");
    if (!std::isfinite(c.index) || !(c.index > 0.0))
        throw ConfigError(where + "power index alpha must be > 0");
    if (!std::isfinite(c.tempering) || c.tempering < 0.0)
        throw ConfigError(where + "tempering lambda must be >= 0");
    if (!std::isfinite(c.floor) || c.floor < 0.0)
        throw ConfigError(where + "support floor x_min must be >= 0");
    if (c.floor == 0.0 && c.intensity > 0.0 && !(c.index < 2.0))
        throw ConfigError(where + "alpha must be < 2 when x_min = 0 (int x^2 Pi(dx) near 0 diverges)");
}

void validate(const DensityTableComponent& c, std::size_t index) {
    const std::string where = "measure[" + std::to_string(index) + "]: ";
    if (c.abscissae.size() < 2) throw ConfigError(where + "density table needs at least two abscissae");
    if (c.density.size() + 1 != c.abscissae.size())
        throw ConfigError(where + "density table needs one density value per cell");
    for (std::size_t i = 0; i < c.abscissae.size(); ++i) {
        if (!std::isfinite(c.abscissae[i]) || c.abscissae[i] < 0.0)
            throw ConfigError(where + "table abscissae must be finite and >= 0");
        if (i > 0 && !(c.abscissae[i] > c.abscissae[i - 1]))
            throw ConfigError(where + "table abscissae must be strictly increasing");
    }
    for (double d : c.density)
        if (!std::isfinite(d) || d < 0.0) throw ConfigError(where + "table density must be >= 0");
}

bool has_mass(const MeasureComponent& comp) {
    return std::visit(overloaded{
                          [](const AtomsComponent& c) { return !c.atoms.empty(); },
                          [](const PowerSideComponent& c) { return c.intensity > 0.0; },
                          [](const DensityTableComponent& c) {
                              return std::any_of(c.density.begin(), c.density.end(),
                                                 [](double d) { return d > 0.0; });
                          },
                      },
                      comp);
}

// int_lo^hi y^(k-1-alpha) dy for 0 <= lo < hi <= inf; +inf when divergent.
double power_integral(double p, double lo, double hi) {
    if (lo == 0.0 && p <= 0.0) return kInf;
    if (std::isinf(hi)) {
        if (p >= 0.0) return kInf;
        return std::pow(lo, p) / -p;
    }
    if (p == 0.0) return std::log(hi / lo);
    return (std::pow(hi, p) - std::pow(lo, p)) / p;
}

// int_lo^hi y^(p-1) exp(-lambda y) dy, lambda > 0.
double tempered_integral(double p, double lambda, double lo, double hi) {
    if (lo == 0.0 && p <= 0.0) return kInf;
    const quad::Tolerance tol{1e-300, 1e-13};
    double total = 0.0;

    // Near the origin substitute u = y^p so the power singularity disappears.
    double start = lo;
    if (lo == 0.0) {
        const double s = std::min(hi, 1.0 / lambda);
        const double inv_p = 1.0 / p;
        total += quad::integrate([&](double u) { return std::exp(-lambda * std::pow(u, inv_p)); }, 0.0,
                                 std::pow(s, p), tol)
                     .value /
                 p;
        start = s;
    }
    if (!(hi > start)) return total;

    auto body = [&](double y) { return std::pow(y, p - 1.0) * std::exp(-lambda * y); };
    const double split = std::isinf(hi) ? std::max(start, 1.0 / lambda) : hi;
    if (split > start) {
        std::vector<double> cuts;
        for (double c = start * 4.0; c < split; c *= 4.0) cuts.push_back(c);
        total += quad::integrate(body, start, split, cuts, tol).value;
    }
    if (std::isinf(hi)) {
        // y = split + t / lambda
        const double scale = std::exp(-lambda * split) / lambda;
        if (scale > 0.0) {
            auto shifted = [&](double t) { return std::pow(split + t / lambda, p - 1.0) * std::exp(-t); };
            const double head = quad::integrate(shifted, 0.0, 1.0, tol).value;
            const double rest = quad::integrate_to_infinity(shifted, 1.0, tol).value;
            total += scale * (head + rest);
        }
    }
    return total;
}

}  // namespace

double component_moment(const MeasureComponent& comp, Side side, int k, const Window& w) {
    if (w.empty()) return 0.0;
    return std::visit(
        overloaded{
            [&](const AtomsComponent& c) {
                double sum = 0.0;
                for (const Atom& a : c.atoms) {
                    if (side_of(a.position) != side) continue;
                    const double m = std::abs(a.position);
                    if (w.contains(m)) sum += a.rate * std::pow(m, k);
                }
                return sum;
            },
            [&](const PowerSideComponent& c) {
                if (c.side != side || c.intensity == 0.0) return 0.0;
                const double lo = std::max(w.lo, c.floor);
                if (!(w.hi > lo)) return 0.0;
                const double p = static_cast<double>(k) - c.index;
                const double integral = c.tempering == 0.0 ? power_integral(p, lo, w.hi)
                                                           : tempered_integral(p, c.tempering, lo, w.hi);
                return c.intensity * integral;
            },
            [&](const DensityTableComponent& c) {
                if (c.side != side) return 0.0;
                double sum = 0.0;
                for (std::size_t i = 0; i < c.density.size(); ++i) {
                    const double a = std::max(c.abscissae[i], w.lo);
                    const double b = std::min(c.abscissae[i + 1], w.hi);
                    if (!(b > a) || c.density[i] == 0.0) continue;
                    sum += c.density[i] * (std::pow(b, k + 1) - std::pow(a, k + 1)) / (k + 1);
                }
                return sum;
            },
        },
        comp);
}

namespace {

// int_a^b tail(side, y) dy for 0 < a <= b < inf, via Fubini:
//   sum over jumps z in (a, b] of (z - a), plus (b - a) tail(b).
double tail_integral(const MeasureSpec& m, Side side, double a, double b) {
    const Window inside{a, b};
    return m.moment(side, 1, inside) - a * m.mass(side, inside) + (b - a) * m.tail(side, b);
}

}  // namespace

MeasureSpec::MeasureSpec(std::vector<MeasureComponent> components) : components_(std::move(components)) {
    bool any_mass = false;
    for (std::size_t i = 0; i < components_.size(); ++i) {
        std::visit([i](const auto& c) { validate(c, i); }, components_[i]);
        any_mass = any_mass || has_mass(components_[i]);
    }
    if (!any_mass) throw ConfigError("measure: total mass Pi(R) must be positive");
}

MeasureSpec MeasureSpec::atoms(std::vector<Atom> atoms) {
    return MeasureSpec({AtomsComponent{std::move(atoms)}});
}

double MeasureSpec::moment(Side side, int k, const Window& w) const {
    double sum = 0.0;
    for (const auto& c : components_) sum += component_moment(c, side, k, w);
    return sum;
}

double MeasureSpec::tail(Side side, double x) const { return mass(side, Window{x, kInf, false, true}); }

std::vector<double> MeasureSpec::kinks() const {
    std::vector<double> out;
    for (const auto& comp : components_) {
        std::visit(overloaded{
                       [&](const AtomsComponent& c) {
                           for (const Atom& a : c.atoms) out.push_back(std::abs(a.position));
                       },
                       [&](const PowerSideComponent& c) {
                           if (c.floor > 0.0) out.push_back(c.floor);
                       },
                       [&](const DensityTableComponent& c) {
                           for (double x : c.abscissae)
                               if (x > 0.0) out.push_back(x);
                       },
                   },
                   comp);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::optional<double> MeasureSpec::support_bound(Side side) const {
    double bound = 0.0;
    for (const auto& comp : components_) {
        const bool unbounded = std::visit(
            overloaded{
                [&](const AtomsComponent& c) {
                    for (const Atom& a : c.atoms)
                        if (side_of(a.position) == side) bound = std::max(bound, std::abs(a.position));
                    return false;
                },
                [&](const PowerSideComponent& c) { return c.side == side && c.intensity > 0.0; },
                [&](const DensityTableComponent& c) {
                    if (c.side != side) return false;
                    for (std::size_t i = 0; i < c.density.size(); ++i)
                        if (c.density[i] > 0.0) bound = std::max(bound, c.abscissae[i + 1]);
                    return false;
                },
            },
            comp);
        if (unbounded) return std::nullopt;
    }
    return bound;
}

bool MeasureSpec::closed_form() const {
    return std::none_of(components_.begin(), components_.end(), [](const MeasureComponent& c) {
        const auto* p = std::get_if<PowerSideComponent>(&c);
        return p != nullptr && p->intensity > 0.0 && p->tempering > 0.0;
    });
}

MeasureSpec MeasureSpec::negated() const {
    std::vector<MeasureComponent> out;
    for (const auto& comp : components_) {
        out.push_back(std::visit(overloaded{
                                     [](AtomsComponent c) -> MeasureComponent {
                                         for (Atom& a : c.atoms) a.position = -a.position;
                                         return c;
                                     },
                                     [](PowerSideComponent c) -> MeasureComponent {
                                         c.side = opposite(c.side);
                                         return c;
                                     },
                                     [](DensityTableComponent c) -> MeasureComponent {
                                         c.side = opposite(c.side);
                                         return c;
                                     },
                                 },
                                 comp));
    }
    return MeasureSpec(std::move(out));
}

MeasureSpec MeasureSpec::scaled(double k) const {
    if (!(k > 0.0) || !std::isfinite(k)) throw ConfigError("scale factor must be positive");
    std::vector<MeasureComponent> out;
    for (const auto& comp : components_) {
        out.push_back(std::visit(overloaded{
                                     [k](AtomsComponent c) -> MeasureComponent {
                                         for (Atom& a : c.atoms) a.position *= k;
                                         return c;
                                     },
                                     [k](PowerSideComponent c) -> MeasureComponent {
                                         c.intensity *= std::pow(k, c.index);
                                         c.tempering /= k;
                                         c.floor *= k;
                                         return c;
                                     },
                                     [k](DensityTableComponent c) -> MeasureComponent {
                                         for (double& x : c.abscissae) x *= k;
                                         for (double& d : c.density) d /= k;
                                         return c;
                                     },
                                 },
                                 comp));
    }
    return MeasureSpec(std::move(out));
}

MeasureSpec MeasureSpec::plus(const MeasureSpec& other) const {
    std::vector<MeasureComponent> out = components_;
    out.insert(out.end(), other.components_.begin(), other.components_.end());
    return MeasureSpec(std::move(out));
}

void LevyTriplet::validate() const {
    if (!std::isfinite(gamma)) throw ConfigError("gamma must be finite");
    if (!std::isfinite(sigma2) || sigma2 < 0.0) throw ConfigError("sigma2 must be >= 0");
    if (measure.components().empty()) throw ConfigError("measure: total mass Pi(R) must be positive");
}

LevyTriplet LevyTriplet::negated() const { return {-gamma, sigma2, measure.negated()}; }

LevyTriplet LevyTriplet::scaled(double k) const {
    // kX jumps by kz; the truncation |kz| <= 1 keeps jumps with |z| <= 1/k,
    // so gamma absorbs the first moment of the window between 1/k and 1.
    const double lo = std::min(1.0, 1.0 / k);
    const double hi = std::max(1.0, 1.0 / k);
    const double window_mean = signed_moment(measure, Window{lo, hi});
    const double shift = k > 1.0 ? -window_mean : window_mean;
    return {k * (gamma + shift), k * k * sigma2, measure.scaled(k)};
}

double tail_plus(const MeasureSpec& measure, double x) { return measure.tail(Side::Positive, x); }

double tail_minus(const MeasureSpec& measure, double x) { return measure.tail(Side::Negative, x); }

TailSumDiff tail_sum_diff(const MeasureSpec& measure, double x) {
    const double n = tail_plus(measure, x);
    const double m = tail_minus(measure, x);
    return {n + m, n - m};
}

double signed_moment(const MeasureSpec& measure, const Window& w) {
    return measure.moment(Side::Positive, 1, w) - measure.moment(Side::Negative, 1, w);
}

double trunc_mean_A(const LevyTriplet& triplet, double x, Method method) {
    if (!(x > 0.0)) throw ConfigError("A(x) needs x > 0");
    const MeasureSpec& m = triplet.measure;
    const double d1 = tail_plus(m, 1.0) - tail_minus(m, 1.0);
    if (x == 1.0) return triplet.gamma + d1;

    if (method == Method::Quadrature) {
        const std::vector<double> kinks = m.kinks();
        auto d = [&m](double y) { return tail_plus(m, y) - tail_minus(m, y); };
        return triplet.gamma + d1 + quad::integrate(d, 1.0, x, kinks).value;
    }

    const double lo = std::min(1.0, x);
    const double hi = std::max(1.0, x);
    const double integral =
        tail_integral(m, Side::Positive, lo, hi) - tail_integral(m, Side::Negative, lo, hi);
    return triplet.gamma + d1 + (x > 1.0 ? integral : -integral);
}

double trunc_second_U(const LevyTriplet& triplet, double x, Method method) {
    if (!(x > 0.0)) throw ConfigError("U(x) needs x > 0");
    const MeasureSpec& m = triplet.measure;

    if (method == Method::Quadrature) {
        auto y_tail = [&m](double y) {
            return y == 0.0 ? 0.0 : y * (tail_plus(m, y) + tail_minus(m, y));
        };
        const std::vector<double> kinks = m.kinks();
        const double first = kinks.empty() ? x : std::min(kinks.front(), x);
        double integral = quad::integrate_from_zero(y_tail, first).value;
        if (x > first) integral += quad::integrate(y_tail, first, x, kinks).value;
        return triplet.sigma2 + 2.0 * integral;
    }

    // 2 int_0^x y 1{y < z} dy = min(z, x)^2
    const Window inner{0.0, x};
    double sum = triplet.sigma2;
    for (Side s : {Side::Positive, Side::Negative}) sum += m.moment(s, 2, inner) + x * x * m.tail(s, x);
    return sum;
}

MeanValue mean_EX1(const LevyTriplet& triplet) {
    const Window outer{1.0, kInf};
    const double plus = triplet.measure.moment(Side::Positive, 1, outer);
    const double minus = triplet.measure.moment(Side::Negative, 1, outer);
    MeanValue out;
    out.positive_part_finite = std::isfinite(plus);
    out.negative_part_finite = std::isfinite(minus);
    if (out.positive_part_finite && out.negative_part_finite) {
        out.kind = MeanValue::Kind::Finite;
        out.value = triplet.gamma + plus - minus;
    } else if (out.negative_part_finite) {
        out.kind = MeanValue::Kind::PlusInfinite;
        out.value = kInf;
    } else if (out.positive_part_finite) {
        out.kind = MeanValue::Kind::MinusInfinite;
        out.value = -kInf;
    } else {
        out.kind = MeanValue::Kind::Undefined;
        out.value = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

TailReport tail_report(const LevyTriplet& triplet, double x) {
    TailReport r;
    r.x = x;
    r.n_plus = tail_plus(triplet.measure, x);
    r.m_minus = tail_minus(triplet.measure, x);
    r.t_sum = r.n_plus + r.m_minus;
    r.d_diff = r.n_plus - r.m_minus;
    r.a_trunc = trunc_mean_A(triplet, x);
    r.u_trunc = trunc_second_U(triplet, x);
    const double denom = std::sqrt(r.u_trunc) * std::sqrt(r.m_minus);
    if (r.a_trunc == 0.0) {
        r.criterion = 0.0;
    } else if (denom > 0.0) {
        r.criterion = r.a_trunc / denom;
    } else if (r.a_trunc > 0.0) {
        r.criterion = kInf;
    } else if (r.a_trunc < 0.0) {
        r.criterion = -kInf;
    } else {
        r.criterion = std::numeric_limits<double>::quiet_NaN();  // A is NaN
    }
    return r;
}

}  // namespace levy
