#include "levysandwich/quadrature.hpp"

#include "levysandwich/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace levy::quad {

namespace {

// Kronrod abscissae (positive half), Kronrod weights and the embedded
// 7-point Gauss weights (Gauss nodes are the odd-indexed Kronrod nodes).
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a;
    double b;
    double value;
    double error;

    bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gauss_kronrod(const Integrand& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kNodes[j];
        const double sum = f(center - dx) + f(center + dx);
        kronrod += kKronrodWeights[j] * sum;
        if (j % 2 == 1) gauss += kGaussWeights[j / 2] * sum;
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::abs(kronrod - gauss)};
}

double target(const Tolerance& tol, double value) {
    return std::max(tol.abs, tol.rel * std::abs(value));
}

}  // namespace

Result integrate(const Integrand& f, double a, double b, Tolerance tol, int max_panels) {
    if (a == b) return {};
    if (b < a) {
        Result r = integrate(f, b, a, tol, max_panels);
        r.value = -r.value;
        return r;
    }

    std::priority_queue<Panel> active;
    double settled_value = 0.0;
    double settled_error = 0.0;
    Panel first = gauss_kronrod(f, a, b);
    double value = first.value;
    double error = first.error;
    active.push(first);
    int evaluations = 15;
    int panels = 1;

    while (error > target(tol, value) && !active.empty()) {
        if (panels >= max_panels) {
            const Panel& worst = active.top();
            throw NumericError("quadrature did not converge", worst.a, worst.b);
        }
        Panel worst = active.top();
        active.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // Cannot split further in floating point; accept as is.
            settled_value += worst.value;
            settled_error += worst.error;
            continue;
        }
        Panel left = gauss_kronrod(f, worst.a, mid);
        Panel right = gauss_kronrod(f, mid, worst.b);
        evaluations += 30;
        ++panels;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        active.push(left);
        active.push(right);
    }

    // Re-sum to shed the drift of the running updates.
    double sum = settled_value;
    double err = settled_error;
    while (!active.empty()) {
        sum += active.top().value;
        err += active.top().error;
        active.pop();
    }
    return {sum, err, evaluations};
}

Result integrate(const Integrand& f, double a, double b, std::span<const double> breakpoints,
                 Tolerance tol, int max_panels) {
    if (a == b) return {};
    const double sign = b < a ? -1.0 : 1.0;
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);

    std::vector<double> cuts{lo};
    for (double p : breakpoints)
        if (p > lo && p < hi) cuts.push_back(p);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    Result total;
    const Tolerance piece_tol{tol.abs / static_cast<double>(cuts.size()), tol.rel};
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        Result r = integrate(f, cuts[i], cuts[i + 1], piece_tol, max_panels);
        total.value += r.value;
        total.error += r.error;
        total.evaluations += r.evaluations;
    }
    total.value *= sign;
    return total;
}

namespace {

// Shared driver for the two geometric-panel schemes. next(k) gives the k-th
// panel; the loop stops once contributions are negligible or decay at a
// stable geometric ratio whose tail can be summed in closed form.
template <class PanelFn>
Result geometric_sum(const Integrand& f, PanelFn panel, Tolerance tol, int max_panels) {
    const Tolerance piece_tol{tol.abs * 1e-3, tol.rel * 0.1};
    Result total;
    double prev = std::numeric_limits<double>::quiet_NaN();
    double prev_ratio = std::numeric_limits<double>::quiet_NaN();
    int small_run = 0;

    for (int k = 0; k < max_panels; ++k) {
        auto [lo, hi] = panel(k);
        if (!(std::isfinite(lo) && std::isfinite(hi)) || hi <= lo) break;
        Result r = integrate(f, lo, hi, piece_tol);
        total.value += r.value;
        total.error += r.error;
        total.evaluations += r.evaluations;
        const double c = r.value;

        if (std::abs(c) <= 0.1 * target(tol, total.value)) {
            if (++small_run >= 3) return total;
        } else {
            small_run = 0;
        }

        if (std::isfinite(prev) && prev != 0.0) {
            const double ratio = c / prev;
            if (ratio > 0.0 && ratio < 0.98 && std::isfinite(prev_ratio) &&
                std::abs(ratio - prev_ratio) < 1e-7 * (1.0 - ratio)) {
                const double tail = c * ratio / (1.0 - ratio);
                const double tail_err =
                    std::abs(c) * std::abs(ratio - prev_ratio) / ((1.0 - ratio) * (1.0 - ratio));
                if (tail_err <= 0.1 * target(tol, total.value + tail)) {
                    total.value += tail;
                    total.error += tail_err;
                    return total;
                }
            }
            prev_ratio = ratio;
        }
        prev = c;
    }
    auto [lo, hi] = panel(0);
    throw NumericError("geometric panel sum did not converge", lo, hi);
}

}  // namespace

Result integrate_to_infinity(const Integrand& f, double a, Tolerance tol) {
    if (!(a > 0.0)) throw NumericError("integrate_to_infinity needs a > 0", a, a);
    return geometric_sum(
        f, [a](int k) { return std::pair{std::ldexp(a, k), std::ldexp(a, k + 1)}; }, tol, 1000);
}

Result integrate_from_zero(const Integrand& f, double b, Tolerance tol) {
    if (!(b > 0.0)) throw NumericError("integrate_from_zero needs b > 0", 0.0, b);
    return geometric_sum(
        f, [b](int k) { return std::pair{std::ldexp(b, -k - 1), std::ldexp(b, -k)}; }, tol, 1000);
}

}  // namespace levy::quad
