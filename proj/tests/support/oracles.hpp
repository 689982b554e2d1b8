#pragma once

// Closed-form reference values computed without the library.
//
// For a measure made of atoms and constant-density cells, with x >= 1:
//     A(x) = gamma + int_{|z|>1} sign(z) min(|z|, x) Pi(dz)
//     U(x) = sigma2 + int min(|z|, x)^2 Pi(dz)
// Both follow from int_1^x 1{y < |z|} dy = (min(|z|, x) - 1)^+ and
// 2 int_0^x y 1{y < |z|} dy = min(|z|, x)^2.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace oracle {

/// P(P1 - P2 > 0) for independent Poisson(mu) variables, by summing the pmf
/// of the difference at 0: P(0) = e^(-2 mu) sum_j mu^(2j) / (j!)^2.
inline double skellam_positive(double mu) {
    double term = 1.0;
    double sum = 1.0;
    for (int j = 1; j < 200; ++j) {
        term *= mu * mu / (static_cast<double>(j) * static_cast<double>(j));
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return 0.5 * (1.0 - std::exp(-2.0 * mu) * sum);
}

struct Cell {
    double lo;
    double hi;
    double density;
    int sign;  // +1 or -1: which side of the origin
};

struct Discrete {
    double gamma = 0.0;
    double sigma2 = 0.0;
    std::vector<std::pair<double, double>> atoms;  // (position, rate)
    std::vector<Cell> cells;
};

inline double tail(const Discrete& m, int sign, double x) {
    double t = 0.0;
    for (auto [pos, rate] : m.atoms)
        if ((pos > 0) == (sign > 0) && std::abs(pos) > x) t += rate;
    for (const Cell& c : m.cells)
        if (c.sign == sign) t += c.density * std::max(0.0, c.hi - std::max(c.lo, x));
    return t;
}

inline double A(const Discrete& m, double x) {
    double a = m.gamma;
    for (auto [pos, rate] : m.atoms)
        if (std::abs(pos) > 1.0) a += (pos > 0 ? 1.0 : -1.0) * rate * std::min(std::abs(pos), x);
    for (const Cell& c : m.cells) {
        const double lo = std::max(c.lo, 1.0);
        if (!(c.hi > lo)) continue;
        // int_lo^hi min(z, x) dz
        double v = 0.0;
        const double mid = std::clamp(x, lo, c.hi);
        v += (mid * mid - lo * lo) / 2.0;
        v += x * (c.hi - mid);
        a += c.sign * c.density * v;
    }
    return a;
}

inline double U(const Discrete& m, double x) {
    double u = m.sigma2;
    for (auto [pos, rate] : m.atoms) u += rate * std::pow(std::min(std::abs(pos), x), 2);
    for (const Cell& c : m.cells) {
        const double mid = std::clamp(x, c.lo, c.hi);
        u += c.density * ((mid * mid * mid - c.lo * c.lo * c.lo) / 3.0 + x * x * (c.hi - mid));
    }
    return u;
}

// Drift fixture: N(x) = x^(-1/2), M(x) = x^(-2) for x >= 1, both 1 below 1,
// gamma = 0, sigma2 = 0.
namespace drift {
inline double N(double x) { return x >= 1.0 ? 1.0 / std::sqrt(x) : 1.0; }
inline double M(double x) { return x >= 1.0 ? 1.0 / (x * x) : 1.0; }
inline double A(double x) { return x >= 1.0 ? 2.0 * std::sqrt(x) - 3.0 + 1.0 / x : 0.0; }
inline double U(double x) {
    return x >= 1.0 ? 2.0 + 4.0 / 3.0 * (std::pow(x, 1.5) - 1.0) + 2.0 * std::log(x) : 2.0 * x * x;
}
inline double criterion(double x) { return A(x) / std::sqrt(U(x) * M(x)); }
}  // namespace drift

// One-sided power density c y^(-1-alpha) on (0, inf), gamma = 0, alpha != 1.
namespace stable {
inline double N(double c, double alpha, double x) { return c * std::pow(x, -alpha) / alpha; }
inline double U(double c, double alpha, double x) { return 2.0 * c * std::pow(x, 2.0 - alpha) / (alpha * (2.0 - alpha)); }
inline double A(double c, double alpha, double x) {
    return c / alpha + c / (alpha * (1.0 - alpha)) * (std::pow(x, 1.0 - alpha) - 1.0);
}
}  // namespace stable

inline double exp_cdf(double rate, double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-rate * x); }

}  // namespace oracle
