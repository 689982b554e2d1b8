#include <catch_amalgamated.hpp>

#include "levysandwich/errors.hpp"
#include "levysandwich/path_engine.hpp"
#include "levysandwich/stats.hpp"
#include "oracles.hpp"

#include <cmath>
#include <vector>

using Catch::Approx;
using namespace levy;

namespace {

SimConfig grid_config(double h = 1e-3) {
    SimConfig c;
    c.grid_step = h;
    return c;
}

// A far atom with a tiny rate keeps Delta > 0 without firing in practice.
LevyTriplet quiet(double gamma, double sigma2) {
    return {gamma, sigma2, MeasureSpec::atoms({{1e6, 1e-12}})};
}

}  // namespace

TEST_CASE("exponential gaps") {
    Stream rng(3, 0);
    const auto g = sample_exponential_gaps(rng, 2.0, 100000);
    double sum = 0.0, lo = 1.0;
    for (double v : g) {
        sum += v;
        lo = std::min(lo, v);
    }
    CHECK(lo > 0.0);
    CHECK(std::abs(sum / g.size() - 0.5) < 3.0 * 0.5 / std::sqrt(g.size()));
    Stream again(3, 0);
    CHECK(sample_exponential_gaps(again, 2.0, 100000) == g);
    CHECK_THROWS_AS(sample_exponential_gaps(rng, 0.0, 3), ConfigError);
}

TEST_CASE("small interval: pure drift") {
    const Decomposition d = decompose(quiet(1.0, 0.0), Cutoff{});
    const SmallProcess small(d, grid_config());
    Stream rng(1, 0);
    const SmallInterval s = simulate_small_interval(rng, small, 1.0, 1e-3);
    CHECK(s.increment == Approx(1.0).epsilon(1e-12));
    CHECK(s.sup == Approx(1.0).epsilon(1e-12));
    CHECK(s.inf == 0.0);
}

TEST_CASE("small interval: zero process") {
    const Decomposition d = decompose(quiet(0.0, 0.0), Cutoff{});
    const SmallProcess small(d, grid_config());
    Stream rng(1, 0);
    std::vector<FinePoint> trace;
    const SmallInterval s = simulate_small_interval(rng, small, 0.7, 0.1, &trace);
    CHECK(s.increment == 0.0);
    CHECK(s.sup == 0.0);
    CHECK(s.inf == 0.0);
    CHECK(trace.size() == 8);  // start, 6 interior grid points, end
}

TEST_CASE("small interval: extremes bracket the endpoints") {
    const LevyTriplet t{0.3, 0.5, MeasureSpec::atoms({{0.5, 2.0}, {-0.4, 1.0}, {3.0, 1.0}})};
    const Decomposition d = decompose(t, Cutoff{});
    const SmallProcess small(d, grid_config());
    Stream rng(8, 0);
    for (int i = 0; i < 200; ++i) {
        std::vector<FinePoint> trace;
        const SmallInterval s = simulate_small_interval(rng, small, rng.exponential(1.0), 1e-2, &trace);
        CHECK(s.sup >= std::max(0.0, s.increment));
        CHECK(s.inf <= std::min(0.0, s.increment));
        for (const FinePoint& p : trace) CHECK((p.x <= s.sup && p.x >= s.inf));
        CHECK(trace.back().x == s.increment);
    }
}

TEST_CASE("small process: inner cutoff and surrogate") {
    const LevyTriplet t{0.0, 0.0, MeasureSpec({PowerSideComponent{Side::Positive, 1.0, 1.5, 0.0, 0.0}})};
    const Decomposition d = decompose(t, Cutoff{});
    SimConfig c = grid_config();
    c.inner_cutoff = 0.0;
    CHECK_THROWS_AS(SmallProcess(d, c), ConfigError);  // infinite activity needs epsilon > 0
    c.inner_cutoff = 1.0;
    CHECK_THROWS_AS(SmallProcess(d, c), ConfigError);  // epsilon must sit below the cutoff
    c.inner_cutoff = 1e-4;
    const SmallProcess small(d, c);
    // int_0^eps x^2 x^(-2.5) dx = 2 sqrt(eps) = 0.02 > 10 eps^2
    CHECK(small.surrogate_variance() == Approx(2.0 * std::sqrt(1e-4)).epsilon(1e-12));
    CHECK(small.dropped_variance() == 0.0);
    CHECK(small.jump_rate() == Approx((std::pow(1e-4, -1.5) - 1.0) / 1.5).epsilon(1e-12));
    // drift keeps E X~_1 = gamma: minus the mean of the simulated inner jumps
    CHECK(small.drift() == Approx(-(std::pow(1e-4, -0.5) - 1.0) / 0.5).epsilon(1e-12));
}

TEST_CASE("exact Brownian sampler") {
    Stream rng(17, 0);
    const int n = 40000;
    std::vector<double> sup(n), drop(n);
    for (int i = 0; i < n; ++i) {
        const BrownianExtremes e = exact_brownian_sup_sampler(rng, 0.0, 1.0, 2.0);
        sup[i] = e.sup;
        drop[i] = e.increment - e.sup;
    }
    const auto ms = stats::mean_with_stderr(sup);
    const auto md = stats::mean_with_stderr(drop);
    CHECK(std::abs(ms.mean - 0.5) < 3.0 * ms.stderr_);
    CHECK(std::abs(md.mean + 0.5) < 3.0 * md.stderr_);
    CHECK_THROWS_AS(exact_brownian_sup_sampler(rng, 0.0, 0.0, 2.0), ConfigError);

    // the drop below the sup shrinks as the drift grows (theta_minus increases)
    auto mean_drop = [](double mu) {
        Stream r(18, 0);
        double sum = 0.0;
        for (int i = 0; i < 20000; ++i) {
            const BrownianExtremes e = exact_brownian_sup_sampler(r, mu, 1.0, 2.0);
            sum += e.increment - e.sup;
        }
        return sum / 20000;
    };
    const double d1 = mean_drop(1.0), d5 = mean_drop(5.0);
    CHECK(d5 > d1);
    CHECK(d1 == Approx(-1.0 / (std::sqrt(1.0 + 4.0) + 1.0)).epsilon(0.05));
}

TEST_CASE("grid Brownian sup against the exponential law") {
    const Decomposition d = decompose(LevyTriplet{0.0, 1.0, MeasureSpec::atoms({{5.0, 1.0}, {-5.0, 1.0}})}, Cutoff{});
    SimConfig c = grid_config(1e-4);
    const PathSimulator sim(d, c);
    const int n = 4000;
    std::vector<double> sup(n);
    for (int i = 0; i < n; ++i) {
        Stream rng(77, static_cast<std::uint64_t>(i));
        sup[i] = sim.sample_skeleton(rng, 0).m_tilde[0];
    }
    const auto rep = stats::ks_one_sample(sup, [](double x) { return oracle::exp_cdf(2.0, x); }, 0.01, 2.0 * std::sqrt(1e-4));
    INFO(rep.statistic << " vs " << rep.threshold);
    CHECK(rep.passed);
}

TEST_CASE("assemble_skeleton: deterministic stand-in") {
    // e1 = 1 with X~ of slope 1, J1 = 5, next interval of length 0.5
    const std::vector<IntervalDraw> intervals{{1.0, {1.0, 1.0, 0.0}}, {0.5, {0.5, 0.5, 0.0}}};
    const std::vector<double> jumps{5.0};
    const SkeletonPath p = assemble_skeleton(intervals, jumps, true);
    CHECK(p.upper[0] == 1.0);
    CHECK(p.s_hat[1] == 6.0);
    CHECK(p.upper[1] == 6.0 + p.m_tilde[1]);
    CHECK(p.taus[1] == 1.0);
    CHECK(p.lower[1] == 6.0);
    CHECK(p.terminal_value() == 6.5);

    const SkeletonPath empty = assemble_skeleton(std::vector<IntervalDraw>{{0.3, {0.0, 0.0, 0.0}}}, {}, true);
    CHECK(empty.taus.size() == 1);
    CHECK(empty.s_hat[0] == 0.0);
    CHECK(empty.steps() == 0);
}

TEST_CASE("sample_skeleton: structural invariants") {
    const LevyTriplet t{0.2, 0.8, MeasureSpec::atoms({{2.0, 1.0}, {-1.5, 0.7}, {0.3, 2.0}, {-0.6, 1.0}})};
    const Decomposition d = decompose(t, Cutoff{});
    SimConfig c = grid_config(1e-2);
    c.record_fine_path = true;
    const PathSimulator sim(d, c);
    for (std::uint64_t i = 0; i < 50; ++i) {
        Stream rng(5, i);
        const SkeletonPath p = sim.sample_skeleton(rng, 20);
        REQUIRE(p.steps() == 20);
        double s = 0.0;
        for (std::size_t r = 0; r <= 20; ++r) {
            if (r > 0) {
                s += p.small_increments[r - 1] + p.jumps[r - 1];
                CHECK(p.taus[r] > p.taus[r - 1]);
                CHECK(p.s_hat[r] == Approx(s).margin(1e-12));
            }
            CHECK(p.m_tilde[r] >= 0.0);
            CHECK(p.i_tilde[r] <= 0.0);
            CHECK(p.lower[r] <= p.s_hat[r]);
            CHECK(p.s_hat[r] <= p.upper[r]);
            CHECK(p.upper[r] == p.s_hat[r] + p.m_tilde[r]);
            CHECK(p.lower[r] == p.s_hat[r] + p.i_tilde[r]);
        }
        for (const FinePoint& f : p.fine) {
            CHECK(f.x <= p.upper[f.interval]);
            CHECK(f.x >= p.lower[f.interval]);
        }
    }
}

TEST_CASE("sample_skeleton: replay is bit-identical") {
    const LevyTriplet t{0.1, 1.0, MeasureSpec::atoms({{2.0, 1.0}, {-0.5, 3.0}})};
    const PathSimulator sim(decompose(t, Cutoff{}), grid_config());
    Stream a(99, 4), b(99, 4);
    const SkeletonPath p = sim.sample_skeleton(a, 10);
    const SkeletonPath q = sim.sample_skeleton(b, 10);
    CHECK(p.s_hat == q.s_hat);
    CHECK(p.m_tilde == q.m_tilde);
    CHECK(p.i_tilde == q.i_tilde);
    CHECK(p.taus == q.taus);
}

TEST_CASE("negated path swaps extremes") {
    const LevyTriplet t{0.1, 1.0, MeasureSpec::atoms({{2.0, 1.0}, {-0.5, 3.0}})};
    const PathSimulator sim(decompose(t, Cutoff{}), grid_config());
    Stream rng(1, 1);
    const SkeletonPath p = sim.sample_skeleton(rng, 5);
    const SkeletonPath q = negated(p);
    for (std::size_t r = 0; r <= 5; ++r) {
        CHECK(q.upper[r] == -p.lower[r]);
        CHECK(q.lower[r] == -p.upper[r]);
        CHECK(q.m_tilde[r] == -p.i_tilde[r]);
    }
}

TEST_CASE("time horizon cuts the last interval") {
    const LevyTriplet t{0.0, 1.0, MeasureSpec::atoms({{2.0, 1.0}})};
    SimConfig c = grid_config(1e-2);
    c.record_fine_path = true;
    const PathSimulator sim(decompose(t, Cutoff{}), c);
    Stream rng(4, 0);
    const SkeletonPath p = sim.sample_skeleton_until(rng, 3.0);
    CHECK(p.truncated_at.value() == 3.0);
    CHECK(p.taus.back() + p.gaps.back() == Approx(3.0).epsilon(1e-14));
    CHECK(p.fine.back().t == Approx(3.0).epsilon(1e-14));
}

TEST_CASE("multilevel: nesting and shrinking gaps") {
    const LevyTriplet t{0.0, 0.2,
                        MeasureSpec({PowerSideComponent{Side::Positive, 0.5, 0.8, 1.0, 0.0},
                                     PowerSideComponent{Side::Negative, 0.5, 0.8, 1.0, 0.0}})};
    const std::vector<Cutoff> levels{{1.0, 1.0}, {0.5, 0.5}, {0.25, 0.25}};
    SimConfig c = grid_config(1e-2);
    c.inner_cutoff = 0.05;
    c.horizon = Horizon::time(5.0);
    for (std::uint64_t i = 0; i < 20; ++i) {
        Stream rng(31, i);
        const MultilevelResult r = multilevel_bounds(rng, t, levels, c);
        CHECK(r.nested);
        CHECK(r.contained);
        for (std::size_t k = 1; k < r.max_gap.size(); ++k) CHECK(r.max_gap[k] <= r.max_gap[k - 1]);
    }
    const std::vector<Cutoff> bad{{0.5, 0.5}, {0.5, 0.25}};
    Stream rng(1, 0);
    CHECK_THROWS_AS(multilevel_bounds(rng, t, bad, c), ConfigError);
}

TEST_CASE("multilevel: one level reproduces the skeleton extremes") {
    const LevyTriplet t{0.1, 0.5, MeasureSpec::atoms({{2.0, 1.0}, {-0.5, 2.0}})};
    SimConfig c = grid_config(1e-2);
    c.horizon = Horizon::steps(8);
    Stream rng(12, 0);
    const std::vector<Cutoff> one{{1.0, 1.0}};
    const MultilevelResult r = multilevel_bounds(rng, t, one, c);
    REQUIRE(r.levels.size() == 1);
    CHECK(r.levels[0].upper == r.finest.upper);
    CHECK(r.levels[0].lower == r.finest.lower);
}

TEST_CASE("exit times") {
    SimConfig c = grid_config();
    Stream rng(2, 0);
    const ExitResult e = exit_time(rng, quiet(1.0, 0.0), 5.0, c);
    CHECK(e.time == Approx(5.0).epsilon(1e-12));
    CHECK(e.exited_top);

    c.time_cap = 1.0;
    CHECK_THROWS_AS(exit_time(rng, quiet(1.0, 0.0), 5.0, c), HorizonExceeded);

    SimConfig s = grid_config();
    const LevyTriplet sym{0.0, 0.0, MeasureSpec::atoms({{1.0, 1.0}, {-1.0, 1.0}})};
    s.cutoff = Cutoff{0.5, 0.5};
    const PathSimulator sim(decompose(sym, s.cutoff), s);
    const int n = 4000;
    int top = 0;
    for (int i = 0; i < n; ++i) {
        Stream r(50, static_cast<std::uint64_t>(i));
        const auto x = sim.try_exit(r, 10.0);
        REQUIRE(x.has_value());
        top += x->exited_top;
        CHECK(x->overshoot == Approx(1.0));
    }
    CHECK(std::abs(top / double(n) - 0.5) < 3.0 * 0.5 / std::sqrt(n));
}

TEST_CASE("config validation") {
    SimConfig c;
    c.grid_step = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = SimConfig{};
    c.horizon = Horizon::time(-1.0);
    CHECK_THROWS_AS(c.validate(), ConfigError);
}
