#include "levysandwich/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace levy::stats {

namespace {

std::vector<double> sorted(std::span<const double> v) {
    std::vector<double> out(v.begin(), v.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> ranks(std::span<const double> v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[order[k]] = mid;
        i = j + 1;
    }
    return r;
}

// Kolmogorov survival function Q_KS(lambda) = 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda) {
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-12 * std::abs(sum)) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

bool constant(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

}  // namespace

double kolmogorov_critical(double level) { return std::sqrt(-std::log(level / 2.0) / 2.0); }

double ks_distance(std::span<const double> a, std::span<const double> b) {
    const std::vector<double> x = sorted(a);
    const std::vector<double> y = sorted(b);
    const double n = static_cast<double>(x.size());
    const double m = static_cast<double>(y.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == v) ++i;
        while (j < y.size() && y[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
    }
    return d;
}

TestReport ks_two_sample(std::span<const double> a, std::span<const double> b, double level, double allowance) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    const double n = static_cast<double>(a.size());
    const double m = static_cast<double>(b.size());
    TestReport r;
    r.name = "ks_two_sample";
    r.statistic = ks_distance(a, b);
    r.threshold = kolmogorov_critical(level) * std::sqrt((n + m) / (n * m)) + allowance;
    r.n_samples = a.size() + b.size();
    r.passed = r.statistic <= r.threshold;
    return r;
}

TestReport ks_one_sample(std::span<const double> a, const std::function<double(double)>& cdf, double level,
                         double allowance) {
    if (a.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
    const std::vector<double> x = sorted(a);
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    TestReport r;
    r.name = "ks_one_sample";
    r.statistic = d;
    r.threshold = kolmogorov_critical(level) / std::sqrt(n) + allowance;
    r.n_samples = x.size();
    r.passed = r.statistic <= r.threshold;
    return r;
}

TestReport ks2d_two_sample(std::span<const std::pair<double, double>> a,
                           std::span<const std::pair<double, double>> b, double level) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks2d_two_sample: empty sample");

    auto quadrants = [](std::span<const std::pair<double, double>> pts, double x, double y) {
        std::array<double, 4> q{};
        for (const auto& [px, py] : pts) {
            const bool right = px > x;
            const bool up = py > y;
            q[(right ? 1 : 0) + (up ? 2 : 0)] += 1.0;
        }
        for (double& v : q) v /= static_cast<double>(pts.size());
        return q;
    };
    auto max_diff = [&](std::span<const std::pair<double, double>> origins) {
        double d = 0.0;
        for (const auto& [x, y] : origins) {
            const auto qa = quadrants(a, x, y);
            const auto qb = quadrants(b, x, y);
            for (int k = 0; k < 4; ++k) d = std::max(d, std::abs(qa[k] - qb[k]));
        }
        return d;
    };
    const double d = 0.5 * (max_diff(a) + max_diff(b));

    auto corr = [](std::span<const std::pair<double, double>> pts) {
        std::vector<double> xs, ys;
        for (const auto& [x, y] : pts) {
            xs.push_back(x);
            ys.push_back(y);
        }
        const double r = pearson(xs, ys);
        return std::isfinite(r) ? r : 0.0;
    };
    const double r1 = corr(a);
    const double r2 = corr(b);
    const double rr = std::sqrt(1.0 - 0.5 * (r1 * r1 + r2 * r2));
    const double n = static_cast<double>(a.size());
    const double m = static_cast<double>(b.size());
    const double sqrt_eff = std::sqrt(n * m / (n + m));
    const double scale = sqrt_eff / (1.0 + rr * (0.25 - 0.75 / sqrt_eff));
    const double p_value = kolmogorov_survival(d * scale);

    TestReport rep;
    rep.name = "ks2d_two_sample";
    rep.statistic = d;
    // Threshold expressed on the statistic scale: reject when d * scale > c(level).
    rep.threshold = kolmogorov_critical(level) / scale;
    rep.n_samples = a.size() + b.size();
    rep.passed = p_value > level;
    std::ostringstream os;
    os << "p_value=" << p_value;
    rep.notes = os.str();
    return rep;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = std::min(x.size(), y.size());
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return sxy / std::sqrt(sxx * syy);
}

double spearman(std::span<const double> x, std::span<const double> y) {
    const std::vector<double> rx = ranks(x);
    const std::vector<double> ry = ranks(y);
    return pearson(rx, ry);
}

TestReport correlation_bound(std::span<const double> x, std::span<const double> y, double multiplier) {
    TestReport r;
    r.name = "correlation_bound";
    r.n_samples = std::min(x.size(), y.size());
    r.threshold = multiplier / std::sqrt(static_cast<double>(std::max<std::size_t>(r.n_samples, 1)));
    if (r.n_samples < 100) {
        r.vacuous = true;
        r.notes = "underpowered: fewer than 100 pairs";
        return r;
    }
    if (constant(x) || constant(y)) {
        r.vacuous = true;
        r.notes = "constant margin: correlation undefined";
        return r;
    }
    const double p = pearson(x, y);
    const double s = spearman(x, y);
    r.statistic = std::max(std::abs(p), std::abs(s));
    r.passed = r.statistic < r.threshold;
    std::ostringstream os;
    os << "pearson=" << p << " spearman=" << s;
    r.notes = os.str();
    return r;
}

Proportion proportion_ci(std::size_t successes, std::size_t n, double z) {
    if (n == 0) throw std::invalid_argument("proportion_ci: n must be >= 1");
    const double p = static_cast<double>(successes) / static_cast<double>(n);
    return {p, z * std::sqrt(p * (1.0 - p) / static_cast<double>(n)), successes == 0 || successes == n};
}

MeanEstimate mean_with_stderr(std::span<const double> values) {
    const double n = static_cast<double>(values.size());
    if (values.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double var = values.size() > 1 ? ss / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var / n)};
}

}  // namespace levy::stats
