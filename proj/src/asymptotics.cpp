#include "levysandwich/asymptotics.hpp"

#include "levysandwich/errors.hpp"
#include "levysandwich/parallel.hpp"
#include "levysandwich/quadrature.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

namespace levy {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum Tag : std::uint64_t { kPositivity = 11, kExit, kScalingWalk, kScalingValue, kIdentityPaths, kIdentityValues };

std::uint64_t seed_for(const SimConfig& config, Tag tag, double at) {
    return derive_seed(derive_seed(config.seed, tag), std::bit_cast<std::uint64_t>(at));
}

McPoint proportion(double at, std::size_t successes, std::size_t n, std::size_t excluded) {
    McPoint p;
    p.at = at;
    p.n = n;
    p.excluded = excluded;
    if (n == 0) {
        p.estimate = kNaN;
        p.stderr_ = kNaN;
        return p;
    }
    p.estimate = static_cast<double>(successes) / static_cast<double>(n);
    p.stderr_ = std::sqrt(p.estimate * (1.0 - p.estimate) / static_cast<double>(n));
    return p;
}

void require_unit_cutoff(const Cutoff& c, const char* what) {
    if (!c.unit()) throw ConfigError(std::string(what) + " is defined for eta_minus = eta_plus = 1 only");
}

}  // namespace

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::DriftsToPlusInfinity: return "DriftsToPlusInfinity";
        case Verdict::DoesNotDriftToPlusInfinity: return "DoesNotDriftToPlusInfinity";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

const char* to_string(Branch b) { return b == Branch::Criterion ? "criterion" : "finite-mean"; }

double criterion_value(const LevyTriplet& triplet, double x) { return tail_report(triplet, x).criterion; }

std::vector<double> geometric_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) throw ConfigError("x_grid needs 0 < from < to and at least 2 points");
    std::vector<double> grid(n);
    const double step = std::log(hi / lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) grid[i] = lo * std::exp(step * static_cast<double>(i));
    grid.back() = hi;
    return grid;
}

CriterionReport classify(const LevyTriplet& triplet, std::span<const double> x_grid, Thresholds thresholds) {
    if (x_grid.size() < 8) throw ConfigError("x_grid: classification needs at least 8 points");
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
        if (!(x_grid[i] > 0.0)) throw ConfigError("x_grid: points must be > 0");
        if (i > 0 && !(x_grid[i] > x_grid[i - 1])) throw ConfigError("x_grid: points must increase");
    }
    const double ratio0 = x_grid[1] / x_grid[0];
    for (std::size_t i = 2; i < x_grid.size(); ++i)
        if (std::abs(x_grid[i] / x_grid[i - 1] / ratio0 - 1.0) > 1e-6)
            throw ConfigError("x_grid: points must be geometric (constant ratio)");

    CriterionReport rep;
    for (double x : x_grid) rep.grid.push_back(tail_report(triplet, x));

    const double top = x_grid.back();
    const auto bound = triplet.measure.support_bound(Side::Negative);
    if (rep.grid.back().m_minus == 0.0 && bound && *bound <= top) {
        rep.branch = Branch::FiniteMean;
        const MeanValue mean = mean_EX1(triplet);
        std::ostringstream os;
        switch (mean.kind) {
            case MeanValue::Kind::Finite:
                rep.verdict = mean.value > 0.0 ? Verdict::DriftsToPlusInfinity : Verdict::DoesNotDriftToPlusInfinity;
                os << "EX1=" << mean.value;
                break;
            case MeanValue::Kind::PlusInfinite:
                rep.verdict = Verdict::DriftsToPlusInfinity;
                os << "EX1=+inf (negative part finite)";
                break;
            default:
                rep.verdict = Verdict::Inconclusive;
                os << "EX1 not defined";
        }
        rep.notes = os.str();
        return rep;
    }

    const std::size_t half = x_grid.size() / 2;
    bool increasing = true;
    bool below = true;
    bool any_nan = false;
    for (std::size_t i = half; i < rep.grid.size(); ++i) {
        const double c = rep.grid[i].criterion;
        if (std::isnan(c)) any_nan = true;
        if (!(c < thresholds.bounded)) below = false;
        if (i > half && !(c >= rep.grid[i - 1].criterion)) increasing = false;
    }

    std::vector<double> lx, lc;
    for (std::size_t i = half; i < rep.grid.size(); ++i) {
        const double c = rep.grid[i].criterion;
        if (!(c > 0.0) || !std::isfinite(c)) break;
        lx.push_back(std::log(rep.grid[i].x));
        lc.push_back(std::log(c));
    }
    if (lx.size() == rep.grid.size() - half && lx.size() >= 2) {
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            mx += lx[i];
            my += lc[i];
        }
        mx /= static_cast<double>(lx.size());
        my /= static_cast<double>(lx.size());
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sxy += (lx[i] - mx) * (lc[i] - my);
            sxx += (lx[i] - mx) * (lx[i] - mx);
        }
        rep.log_slope = sxy / sxx;
    }

    if (any_nan) {
        rep.verdict = Verdict::Inconclusive;
        rep.notes = "criterion is 0/0 on part of the grid";
    } else if (increasing && rep.grid.back().criterion > thresholds.drift) {
        rep.verdict = Verdict::DriftsToPlusInfinity;
    } else if (below) {
        rep.verdict = Verdict::DoesNotDriftToPlusInfinity;
    } else {
        rep.verdict = Verdict::Inconclusive;
    }
    return rep;
}

McPoint mc_positivity(const LevyTriplet& triplet, double t, std::size_t reps, const SimConfig& config) {
    if (!(t > 0.0)) throw ConfigError("t must be > 0");
    const PathSimulator sim(decompose(triplet, config.cutoff), config);
    std::vector<unsigned char> positive(reps, 0);
    const std::uint64_t seed = seed_for(config, kPositivity, t);
    parallel_for(reps, config.workers, [&](std::size_t i) {
        Stream rng(seed, i);
        positive[i] = sim.sample_value(rng, t).value() > 0.0 ? 1 : 0;
    });
    const auto hits = static_cast<std::size_t>(std::count(positive.begin(), positive.end(), 1));
    return proportion(t, hits, reps, 0);
}

McPoint mc_exit_positivity(const LevyTriplet& triplet, double r, std::size_t reps, const SimConfig& config) {
    const PathSimulator sim(decompose(triplet, config.cutoff), config);
    // 0: exit at the bottom, 1: at the top, 2: time cap reached
    std::vector<unsigned char> outcome(reps, 0);
    const std::uint64_t seed = seed_for(config, kExit, r);
    parallel_for(reps, config.workers, [&](std::size_t i) {
        Stream rng(seed, i);
        const auto exit = sim.try_exit(rng, r);
        outcome[i] = !exit ? 2 : (exit->exited_top ? 1 : 0);
    });
    const auto top = static_cast<std::size_t>(std::count(outcome.begin(), outcome.end(), 1));
    const auto capped = static_cast<std::size_t>(std::count(outcome.begin(), outcome.end(), 2));
    return proportion(r, top, reps - capped, capped);
}

ScalingReport scaling_diagnostic(const LevyTriplet& triplet, const Cutoff& cutoff, double alpha, std::size_t n,
                                 double t, std::size_t reps, const SimConfig& config) {
    if (!(alpha > 0.0)) throw ConfigError("alpha must be > 0");
    if (n < 1 || !(t > 0.0) || reps < 1) throw ConfigError("scaling diagnostic needs n >= 1, t > 0, replications >= 1");
    const PathSimulator sim(decompose(triplet, cutoff), config);

    std::vector<double> walk(reps), value(reps);
    const double bn = std::pow(static_cast<double>(n), alpha);
    const double bt = std::pow(t, alpha);
    const std::uint64_t seed_walk = derive_seed(config.seed, kScalingWalk);
    const std::uint64_t seed_value = derive_seed(config.seed, kScalingValue);
    parallel_for(reps, config.workers, [&](std::size_t i) {
        Stream rw(seed_walk, i);
        walk[i] = sim.sample_walk(rw, n)[n] / bn;
        Stream rv(seed_value, i);
        value[i] = sim.sample_value(rv, t).value() / bt;
    });

    ScalingReport rep;
    rep.delta = sim.decomposition().delta;
    rep.alpha = alpha;
    const auto w = stats::mean_with_stderr(walk);
    const auto v = stats::mean_with_stderr(value);
    rep.walk_limit = w.mean;
    rep.walk_stderr = w.stderr_;
    rep.process_limit = v.mean;
    rep.process_stderr = v.stderr_;
    rep.ratio = v.mean / w.mean;
    rep.renewal_constant = std::pow(rep.delta, alpha);
    rep.stated_constant = 1.0 / rep.renewal_constant;
    rep.vacuous = std::abs(w.mean) <= 3.0 * w.stderr_ + 1e-12 && std::abs(v.mean) <= 3.0 * v.stderr_ + 1e-12;
    std::ostringstream os;
    os << "renewal N_t/t -> Delta gives Delta^alpha=" << rep.renewal_constant
       << "; reciprocal 1/Delta^alpha=" << rep.stated_constant;
    if (rep.vacuous) os << "; both limits consistent with 0, ratio not informative";
    rep.notes = os.str();
    return rep;
}

WalkFunctionals walk_functionals(const Decomposition& d, double x) {
    require_unit_cutoff(d.cutoff, "walk_functionals");
    if (!(x > 0.0)) throw ConfigError("x must be > 0");
    const BigJumpLaw& law = d.big_jumps;
    const double s = d.triplet.gamma / d.delta;

    std::vector<double> kinks = d.triplet.measure.kinks();
    kinks.push_back(1.0);
    std::vector<double> breaks;
    for (double m : kinks)
        for (double b : {s + m, s - m, -s - m, -s + m})
            if (b > 0.0 && b < x) breaks.push_back(b);
    // Doubling panels past the last kink keep long power tails well resolved.
    double last = 1.0;
    for (double b : breaks) last = std::max(last, b);
    for (double b = 2.0 * last; b < x; b *= 2.0) breaks.push_back(b);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    const auto up = [&](double y) { return law.upper_tail(y - s); };
    // P(J* < -y) rather than 1 - P(J* > -y): no cancellation in the far tail.
    // The two differ only at atoms, which the integrals do not see.
    const auto down = [&](double y) { return law.lower_tail(-y - s); };

    WalkFunctionals out;
    out.x = x;
    out.shift = s;
    const quad::Tolerance tol{1e-12, 1e-10};
    out.a_star = quad::integrate([&](double y) { return up(y) - down(y); }, 0.0, x, breaks, tol).value;
    out.u_star = 2.0 * quad::integrate([&](double y) { return y * (up(y) + down(y)); }, 0.0, x, breaks, tol).value;
    out.delta_upper = d.delta * law.upper_tail(x);
    out.delta_lower = d.delta * law.lower_tail(-x);
    out.delta_upper_shifted = d.delta * up(x);
    out.delta_lower_shifted = d.delta * law.cdf(-x - s);
    return out;
}

double walk_constant(const Decomposition& d, double x) {
    const double s = d.triplet.gamma / d.delta;
    return d.delta * walk_functionals(d, x + s).a_star - trunc_mean_A(d.triplet, x);
}

IdentityReport decomposition_identity_check(const LevyTriplet& triplet, double t, std::size_t reps,
                                            const SimConfig& config) {
    require_unit_cutoff(config.cutoff, "decomposition_identity_check");
    if (!(t > 0.0)) throw ConfigError("t must be > 0");
    SimConfig cfg = config;
    cfg.extremes = ExtremesMode::Grid;
    cfg.record_fine_path = false;
    const PathSimulator sim(decompose(triplet, cfg.cutoff), cfg);
    const double s = triplet.gamma / sim.decomposition().delta;

    std::vector<double> rel_err(reps), literal(reps), rhs(reps), lhs(reps);
    std::vector<unsigned char> no_jumps(reps, 0);
    const std::uint64_t seed_paths = derive_seed(cfg.seed, kIdentityPaths);
    const std::uint64_t seed_values = derive_seed(cfg.seed, kIdentityValues);
    parallel_for(reps, cfg.workers, [&](std::size_t i) {
        Stream rng(seed_paths, i);
        const SkeletonPath path = sim.sample_skeleton_until(rng, t);
        const double n_t = static_cast<double>(path.steps());
        double s_star = 0.0;
        for (double j : path.jumps) s_star += j + s;
        double small = 0.0;
        for (double inc : path.small_increments) small += inc;
        const double x_t = path.terminal_value();
        const double right = s_star + small - s * n_t;
        const double scale = std::max({1.0, std::abs(s_star) + std::abs(small) + std::abs(s * n_t), std::abs(x_t)});
        rel_err[i] = std::abs(x_t - right) / scale;
        literal[i] = std::abs(triplet.gamma * (n_t / sim.decomposition().delta - t));
        rhs[i] = right;
        no_jumps[i] = path.steps() == 0 ? 1 : 0;

        Stream rv(seed_values, i);
        lhs[i] = sim.sample_value(rv, t).value();
    });

    IdentityReport rep;
    rep.coupled.name = "identity_coupled";
    rep.coupled.statistic = reps ? *std::max_element(rel_err.begin(), rel_err.end()) : 0.0;
    rep.coupled.threshold = 1e-10;
    rep.coupled.n_samples = reps;
    rep.coupled.passed = rep.coupled.statistic <= rep.coupled.threshold;
    rep.coupled.notes = "relative to max(1, |S*| + |X~| + |gamma N_t / Delta|)";
    rep.uncoupled = stats::ks_two_sample(lhs, rhs, 0.01);
    rep.uncoupled.name = "identity_uncoupled_ks";
    rep.literal_mean_abs = stats::mean_with_stderr(literal).mean;
    rep.runs_without_jumps = static_cast<std::size_t>(std::count(no_jumps.begin(), no_jumps.end(), 1));
    return rep;
}

}  // namespace levy
