#pragma once

#include <functional>
#include <span>

namespace levy::quad {

struct Tolerance {
    double abs = 1e-10;
    double rel = 1e-8;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive 15-point Gauss-Kronrod on a finite interval [a, b].
/// Panels are bisected in order of largest error estimate. Throws
/// NumericError naming the offending panel when the budget runs out.
Result integrate(const Integrand& f, double a, double b, Tolerance tol = {},
                 int max_panels = 4000);

/// Same as integrate(), but the interval is first split at every breakpoint
/// strictly inside (a, b). Use for integrands with known kinks or jumps.
Result integrate(const Integrand& f, double a, double b, std::span<const double> breakpoints,
                 Tolerance tol = {}, int max_panels = 4000);

/// Integral over [a, inf) for a > 0 by geometrically growing panels
/// [a 2^k, a 2^(k+1)]. When panel contributions decay geometrically the
/// remaining tail is added as a geometric series.
Result integrate_to_infinity(const Integrand& f, double a, Tolerance tol = {});

/// Integral over (0, b] by geometrically shrinking panels toward 0; handles
/// integrable power singularities at the origin.
Result integrate_from_zero(const Integrand& f, double b, Tolerance tol = {});

}  // namespace levy::quad
