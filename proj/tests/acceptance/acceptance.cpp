// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.
//
// Exit status is 0 when every criterion passes, or when the only failures
// are the ones listed in kKnownUnattainable (still printed as FAIL, with the
// reason). An unexpected failure, or a known failure that starts passing,
// gives exit status 1.

#include "levysandwich/asymptotics.hpp"
#include "levysandwich/cli/commands.hpp"
#include "levysandwich/decomposition.hpp"
#include "levysandwich/measure.hpp"
#include "levysandwich/parallel.hpp"
#include "levysandwich/path_engine.hpp"
#include "levysandwich/rng.hpp"
#include "levysandwich/sandwich.hpp"
#include "levysandwich/stats.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#ifndef LEVY_CONFIG_DIR
#define LEVY_CONFIG_DIR "tools/configs"
#endif

using namespace levy;
namespace fs = std::filesystem;

namespace {

// ---- pinned tolerances ----------------------------------------------------
constexpr double kContainmentTol = 1e-12;
constexpr std::size_t kContainmentPaths = 1000;
constexpr std::size_t kLawReplications = 10000;
constexpr double kKsLevel = 0.01;
constexpr double kCorrelationMultiplier = 3.0;
constexpr double kIndependenceGridStep = 1e-3;
constexpr double kSupGridStep = 1e-4;
constexpr double kSupKsBase = 0.023;
constexpr std::size_t kScalingN = 10000;
constexpr double kScalingT = 10000.0;
constexpr std::size_t kScalingReplications = 200;
constexpr double kWalkLimitTol = 0.1;
constexpr double kProcessLimitTol = 0.2;
constexpr double kRatioTol = 0.05;
constexpr double kCriterionRelTol = 0.05;
constexpr std::size_t kTrendReplications = 2000;
constexpr double kTrendFloor = 0.95;
constexpr double kSe = 3.0;
constexpr std::size_t kSkellamReplications = 10000;
constexpr double kWalkAlgebraFactor = 5.0;
constexpr double kWalkAlgebraFloor = 1e-9;
constexpr double kUStarRelTol = 0.02;
constexpr double kIdentityTol = 1e-10;
constexpr std::size_t kMultilevelPaths = 100;
constexpr double kQuadratureRelTol = 1e-6;

// Criteria that cannot pass as stated; see the note printed with each.
const std::map<int, std::string> kKnownUnattainable = {
    {9, "Delta U*(50) / U(50) -> 1 needs U(inf) = inf; the atomic fixture has U(inf) = 8.5 and "
        "Delta U*(inf) = 9.8333, so the ratio settles at 1.1569"},
};

int workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

struct Outcome {
    bool passed = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) passed = false;
        detail += (detail.empty() ? "" : "; ") + std::string(ok ? "" : "!") + what;
    }
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}
std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}
std::string fmt(const char* f, double a, double b, double c) {
    char buf[200];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

void require_report(Outcome& o, const stats::TestReport& r) {
    o.require(!r.vacuous && r.passed, r.name + " " + fmt("%.4g <= %.4g", r.statistic, r.threshold));
}

// ---- 1 ----------------------------------------------------------------------
Outcome containment() {
    struct Fixture {
        const char* name;
        LevyTriplet triplet;
        double epsilon;
    };
    const std::vector<Fixture> fixtures = {
        {"atoms", {0.3, 0.0, MeasureSpec::atoms({{2.0, 1.0}, {-1.5, 0.8}, {0.4, 2.0}, {-0.7, 1.5}})}, 0.0},
        {"atoms+brownian", {0.3, 0.6, MeasureSpec::atoms({{2.0, 1.0}, {-1.5, 0.8}, {0.4, 2.0}})}, 0.0},
        {"power", {0.1, 0.0, MeasureSpec({PowerSideComponent{Side::Positive, 0.5, 0.8, 0.0, 0.0},
                                          PowerSideComponent{Side::Negative, 0.7, 1.2, 0.0, 0.0}})}, 0.05},
    };
    Outcome o;
    for (const Fixture& f : fixtures) {
        SimConfig c;
        c.seed = 11;
        c.grid_step = 1e-3;
        c.inner_cutoff = f.epsilon;
        c.record_fine_path = true;
        c.workers = workers();
        const PathSimulator sim(decompose(f.triplet, Cutoff{}), c);
        std::vector<std::size_t> violations(kContainmentPaths, 0), points(kContainmentPaths, 0);
        parallel_for(kContainmentPaths, c.workers, [&](std::size_t i) {
            Stream rng(derive_seed(c.seed, 1), i);
            const SkeletonPath p = sim.sample_skeleton(rng, 10);
            for (const FinePoint& q : p.fine) {
                if (q.x > p.upper[q.interval] + kContainmentTol || q.x < p.lower[q.interval] - kContainmentTol)
                    ++violations[i];
            }
            points[i] = p.fine.size();
        });
        std::size_t v = 0, n = 0;
        for (std::size_t i = 0; i < kContainmentPaths; ++i) {
            v += violations[i];
            n += points[i];
        }
        o.require(v == 0 && n > kContainmentPaths,
                  std::string(f.name) + ": " + std::to_string(v) + " violations in " + std::to_string(n) + " points");
    }
    return o;
}

// ---- 2 ----------------------------------------------------------------------
const LevyTriplet kBrownianFixture{0.2, 1.0, MeasureSpec::atoms({{2.0, 1.0}, {-3.0, 1.0}})};

Outcome walk_law() {
    SimConfig c;
    c.seed = 21;
    c.extremes = ExtremesMode::ExactBrownian;
    c.workers = workers();
    Outcome o;
    for (const auto& r : verify_walk_law(decompose(kBrownianFixture, Cutoff{}), 5, kLawReplications, c)) {
        if (r.name == "step_law_y_plus") continue;  // reported by unit tests; not part of this criterion
        require_report(o, r);
        o.require(r.threshold <= 0.0231, r.name + " critical value " + fmt("%.4f", r.threshold));
    }
    return o;
}

// ---- 3 ----------------------------------------------------------------------
Outcome independence() {
    SimConfig c;
    c.seed = 31;
    c.grid_step = kIndependenceGridStep;
    c.workers = workers();
    Outcome o;
    for (const auto& r : verify_independence(decompose(kBrownianFixture, Cutoff{}), 5, kLawReplications, c)) {
        if (r.name == "independence_m0_drop") continue;  // not part of this criterion
        require_report(o, r);
        if (r.name == "independence_m0_s_plus")
            o.require(r.threshold <= kCorrelationMultiplier / std::sqrt(double(kLawReplications)) + 1e-15,
                      "correlation bound 3/sqrt(N)");
    }
    return o;
}

// ---- 4 ----------------------------------------------------------------------
Outcome brownian_sup() {
    // mu = 0, sigma2 = 1, Delta = 2: sup over [0, e) ~ Exp(2).
    const LevyTriplet t{0.0, 1.0, MeasureSpec::atoms({{2.0, 1.0}, {-2.0, 1.0}})};
    SimConfig c;
    c.seed = 41;
    c.grid_step = kSupGridStep;
    c.workers = workers();
    const PathSimulator sim(decompose(t, Cutoff{}), c);
    std::vector<double> sup(kLawReplications);
    parallel_for(kLawReplications, c.workers, [&](std::size_t i) {
        Stream rng(derive_seed(c.seed, 1), i);
        sup[i] = sim.sample_skeleton(rng, 0).m_tilde[0];
    });
    Outcome o;
    const auto m = stats::mean_with_stderr(sup);
    o.require(std::abs(m.mean - 0.5) <= kSe * m.stderr_,
              fmt("mean %.5f vs 0.5, 3 SE = %.5f", m.mean, kSe * m.stderr_));
    const double ks = stats::ks_one_sample(sup, [](double x) { return oracle::exp_cdf(2.0, x); }).statistic;
    const double bound = kSupKsBase + 2.0 * std::sqrt(kSupGridStep);
    o.require(ks < bound, fmt("KS %.5f < %.5f", ks, bound));
    return o;
}

// ---- 5 ----------------------------------------------------------------------
Outcome scaling() {
    const LevyTriplet t{0.0, 0.0, MeasureSpec::atoms({{2.0, 2.0}})};
    SimConfig c;
    c.seed = 51;
    c.workers = workers();
    const ScalingReport r = scaling_diagnostic(t, Cutoff{}, 1.0, kScalingN, kScalingT, kScalingReplications, c);
    Outcome o;
    o.require(std::abs(r.walk_limit - 2.0) < kWalkLimitTol, fmt("S^_n/n = %.5f", r.walk_limit));
    o.require(std::abs(r.process_limit - 4.0) < kProcessLimitTol, fmt("X_t/t = %.5f", r.process_limit));
    o.require(std::abs(r.ratio / r.delta - 1.0) < kRatioTol,
              fmt("ratio %.5f vs Delta^alpha %.5f (stated 1/Delta^alpha = %.5f)", r.ratio, r.renewal_constant,
                  r.stated_constant));
    return o;
}

// ---- 6 ----------------------------------------------------------------------
const LevyTriplet kDriftFixture{0.0, 0.0, MeasureSpec({PowerSideComponent{Side::Positive, 0.5, 0.5, 0.0, 1.0},
                                                      PowerSideComponent{Side::Negative, 2.0, 2.0, 0.0, 1.0}})};

Outcome criterion_oracle() {
    Outcome o;
    const double got = criterion_value(kDriftFixture, 1e4);
    const double want = oracle::drift::criterion(1e4);
    o.require(std::abs(got / want - 1.0) < kCriterionRelTol, fmt("criterion(1e4) = %.6f, oracle %.6f", got, want));
    const LevyTriplet sym{0.0, 0.7, MeasureSpec::atoms({{2.0, 1.0}, {-2.0, 1.0}, {0.5, 3.0}, {-0.5, 3.0}})};
    bool zero = true;
    for (double x : geometric_grid(0.1, 1e6, 25)) zero = zero && criterion_value(sym, x) == 0.0;
    o.require(zero, "symmetric criterion == 0 on 25 points");
    return o;
}

// ---- 7 ----------------------------------------------------------------------
Outcome drift_trend() {
    SimConfig c;
    c.seed = 71;
    c.workers = workers();
    Outcome o;
    auto trend = [&](const std::vector<McPoint>& pts, const char* what) {
        for (std::size_t k = 1; k < pts.size(); ++k) {
            const double margin = kSe * std::hypot(pts[k].stderr_, pts[k - 1].stderr_);
            o.require(pts[k].estimate + margin >= pts[k - 1].estimate,
                      std::string(what) + fmt(" nondecreasing: %.4f -> %.4f", pts[k - 1].estimate, pts[k].estimate));
        }
        const McPoint& top = pts.back();
        o.require(top.estimate - kSe * top.stderr_ > kTrendFloor || (top.stderr_ == 0.0 && top.estimate > kTrendFloor),
                  std::string(what) + fmt(" top %.4f (3 SE %.4f) > 0.95", top.estimate, kSe * top.stderr_));
    };
    std::vector<McPoint> pos, exit;
    for (double t : {10.0, 100.0, 1000.0}) pos.push_back(mc_positivity(kDriftFixture, t, kTrendReplications, c));
    for (double r : {10.0, 50.0, 250.0}) exit.push_back(mc_exit_positivity(kDriftFixture, r, kTrendReplications, c));
    trend(pos, "P(X_t>0)");
    trend(exit, "P(X_T>0)");
    std::size_t excluded = 0;
    for (const auto& p : exit) excluded += p.excluded;
    o.require(excluded == 0, std::to_string(excluded) + " capped exit runs");
    return o;
}

// ---- 8 ----------------------------------------------------------------------
Outcome skellam() {
    SimConfig c;
    c.seed = 81;
    c.workers = workers();
    c.cutoff = Cutoff{0.5, 0.5};
    const LevyTriplet t{0.0, 0.0, MeasureSpec::atoms({{1.0, 1.0}, {-1.0, 1.0}})};
    const McPoint p = mc_positivity(t, 1.0, kSkellamReplications, c);
    const double want = oracle::skellam_positive(1.0);
    Outcome o;
    o.require(std::abs(p.estimate - want) <= kSe * p.stderr_,
              fmt("P^ = %.5f vs %.6f, 3 SE = %.5f", p.estimate, want, kSe * p.stderr_));
    return o;
}

// ---- 9 ----------------------------------------------------------------------
const LevyTriplet kAtomicFixture{1.0, 0.0, MeasureSpec::atoms({{2.0, 1.0}, {-3.0, 0.5}})};

Outcome walk_algebra() {
    const Decomposition d = decompose(kAtomicFixture, Cutoff{});
    const double window = 2.0 * std::abs(kAtomicFixture.gamma) / d.delta;
    Outcome o;
    for (double x : {2.0, 5.0, 10.0, 50.0}) {
        const double gap = std::abs(walk_constant(d, x));
        const double bound = kWalkAlgebraFactor * tail_minus(kAtomicFixture.measure, x) * window + kWalkAlgebraFloor;
        o.require(gap <= bound, fmt("x=%g: |Delta A* - A| = %.3g <= %.3g", x, gap, bound));
    }
    const WalkFunctionals w = walk_functionals(d, 50.0);
    const double ratio = d.delta * w.u_star / trunc_second_U(kAtomicFixture, 50.0);
    o.require(std::abs(ratio - 1.0) <= kUStarRelTol, fmt("Delta U*(50)/U(50) = %.5f", ratio));

    SimConfig c;
    c.seed = 91;
    c.workers = workers();
    const IdentityReport id = decomposition_identity_check(kAtomicFixture, 10.0, kLawReplications, c);
    o.require(id.coupled.statistic <= kIdentityTol, fmt("coupled identity error %.3g", id.coupled.statistic));
    return o;
}

// Same statement where its hypothesis U(inf) = inf holds.
Outcome walk_algebra_infinite_u() {
    const LevyTriplet t{1.0, 0.0, MeasureSpec({PowerSideComponent{Side::Positive, 1.0, 1.5, 0.0, 1.0},
                                              PowerSideComponent{Side::Negative, 0.5, 1.5, 0.0, 1.0}})};
    const Decomposition d = decompose(t, Cutoff{});
    Outcome o;
    double previous = kInf;
    for (double x : {1e2, 1e4, 1e6, 1e8}) {
        const double err = std::abs(d.delta * walk_functionals(d, x).u_star / trunc_second_U(t, x) - 1.0);
        o.require(err <= previous, fmt("x=%g: |Delta U*/U - 1| = %.3g", x, err));
        previous = err;
    }
    o.require(previous <= kUStarRelTol, "within 2% at the top");
    return o;
}

// ---- 10 ---------------------------------------------------------------------
Outcome multilevel() {
    const LevyTriplet t{0.0, 0.2, MeasureSpec({PowerSideComponent{Side::Positive, 0.5, 0.8, 1.0, 0.0},
                                              PowerSideComponent{Side::Negative, 0.5, 0.8, 1.0, 0.0}})};
    const std::vector<Cutoff> levels = {{1.0, 1.0}, {0.5, 0.5}, {0.25, 0.25}};
    SimConfig c;
    c.seed = 101;
    c.grid_step = 1e-3;
    c.inner_cutoff = 0.05;
    c.horizon = Horizon::time(5.0);
    c.workers = workers();
    std::vector<unsigned char> nested(kMultilevelPaths), contained(kMultilevelPaths), gaps(kMultilevelPaths);
    parallel_for(kMultilevelPaths, c.workers, [&](std::size_t i) {
        Stream rng(derive_seed(c.seed, 1), i);
        const MultilevelResult r = multilevel_bounds(rng, t, levels, c);
        nested[i] = r.nested;
        contained[i] = r.contained;
        gaps[i] = r.max_gap.size() == levels.size();
        for (std::size_t k = 1; k < r.max_gap.size(); ++k) gaps[i] = gaps[i] && r.max_gap[k] <= r.max_gap[k - 1];
    });
    auto count = [](const std::vector<unsigned char>& v) { return std::count(v.begin(), v.end(), 1); };
    Outcome o;
    o.require(count(nested) == long(kMultilevelPaths), "nested on " + std::to_string(count(nested)) + "/100");
    o.require(count(contained) == long(kMultilevelPaths), "contained on " + std::to_string(count(contained)) + "/100");
    o.require(count(gaps) == long(kMultilevelPaths),
              "gap nonincreasing on " + std::to_string(count(gaps)) + "/100");
    return o;
}

// ---- 11 ---------------------------------------------------------------------
Outcome quadrature() {
    struct Case {
        std::string name;
        LevyTriplet triplet;
        std::function<double(double)> a;
        std::function<double(double)> u;
    };
    oracle::Discrete disc;
    disc.gamma = 0.4;
    disc.sigma2 = 0.3;
    disc.atoms = {{2.5, 0.7}, {-4.0, 0.2}, {0.5, 1.0}};
    disc.cells = {{0.2, 3.0, 0.6, +1}, {1.5, 7.0, 0.25, -1}};
    const LevyTriplet disc_triplet{
        disc.gamma, disc.sigma2,
        MeasureSpec({AtomsComponent{{{2.5, 0.7}, {-4.0, 0.2}, {0.5, 1.0}}},
                     DensityTableComponent{Side::Positive, {0.2, 3.0}, {0.6}},
                     DensityTableComponent{Side::Negative, {1.5, 7.0}, {0.25}}})};

    std::vector<Case> cases;
    cases.push_back({"drift", kDriftFixture, oracle::drift::A, oracle::drift::U});
    cases.push_back({"atoms+table", disc_triplet, [&](double x) { return oracle::A(disc, x); },
                     [&](double x) { return oracle::U(disc, x); }});
    for (double alpha : {0.5, 1.5}) {
        const double c = 0.8;
        cases.push_back({fmt("stable alpha=%g", alpha),
                         {0.0, 0.0, MeasureSpec({PowerSideComponent{Side::Positive, c, alpha, 0.0, 0.0}})},
                         [=](double x) { return oracle::stable::A(c, alpha, x); },
                         [=](double x) { return oracle::stable::U(c, alpha, x); }});
    }

    Outcome o;
    const std::vector<double> grid = {1.0, 1.7, 2.5, 4.0, 10.0, 123.0, 1e4, 1e6};
    for (const Case& cs : cases) {
        double worst = 0.0;
        for (double x : grid) {
            for (Method m : {Method::Quadrature, Method::Auto}) {
                const double a = trunc_mean_A(cs.triplet, x, m);
                const double u = trunc_second_U(cs.triplet, x, m);
                const double wa = cs.a(x), wu = cs.u(x);
                worst = std::max(worst, std::abs(a - wa) / std::max(std::abs(wa), 1e-300));
                worst = std::max(worst, std::abs(u - wu) / std::abs(wu));
            }
        }
        o.require(worst < kQuadratureRelTol, cs.name + fmt(" max rel err %.2g", worst));
    }
    return o;
}

// ---- 12 ---------------------------------------------------------------------
std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism() {
    struct Run {
        std::string command;
        std::string config;
        std::string suite;
    };
    const std::vector<Run> runs = {
        {"curve", "drift.json", ""},          {"curve", "symmetric.json", ""},
        {"classify", "drift.json", ""},       {"classify", "symmetric.json", ""},
        {"simulate", "sandwich.json", ""},    {"simulate", "multilevel.json", ""},
        {"simulate", "brownian.json", ""},    {"exit-prob", "drift.json", ""},
        {"exit-prob", "skellam.json", ""},    {"verify", "sandwich.json", "sandwich"},
        {"verify", "prop12.json", "prop12"},  {"verify", "identity.json", "identity25"},
        {"verify", "brownian.json", "thm11"},
    };
    const fs::path work = fs::temp_directory_path() / "levysandwich_acceptance";
    Outcome o;
    for (const Run& r : runs) {
        std::string outputs[2];
        int codes[2];
        for (int k = 0; k < 2; ++k) {
            cli::Invocation inv;
            inv.command = r.command;
            inv.config_path = (fs::path(LEVY_CONFIG_DIR) / r.config).string();
            inv.suite = r.suite;
            const fs::path dir = work / (r.command + "_" + r.config + "_" + std::to_string(k));
            fs::remove_all(dir);
            if (r.command == "simulate") inv.out = dir.string();
            std::ostringstream out, err;
            codes[k] = cli::run(inv, out, err);
            outputs[k] = out.str();
            if (r.command == "simulate")
                for (const char* f : {"skeleton.csv", "sandwich.csv", "path.csv", "envelopes.csv", "summary.json"})
                    outputs[k] += std::string("\n--") + f + "\n" + slurp(dir / f);
        }
        const std::string label = r.command + " " + r.config;
        o.require(codes[0] == codes[1] && outputs[0] == outputs[1] && !outputs[0].empty(),
                  label + " exit " + std::to_string(codes[0]));
    }
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        Outcome (*run)();
    };
    const std::vector<Criterion> criteria = {
        {1, "sandwich containment", containment},
        {2, "walk law equality", walk_law},
        {3, "sup/remainder independence", independence},
        {4, "exponential-time Brownian sup", brownian_sup},
        {5, "scaling limits", scaling},
        {6, "criterion oracle", criterion_oracle},
        {7, "drift trend", drift_trend},
        {8, "Skellam positivity", skellam},
        {9, "embedded-walk algebra", walk_algebra},
        {10, "multilevel envelopes", multilevel},
        {11, "quadrature", quadrature},
        {12, "CLI determinism", determinism},
    };

    int unexpected = 0;
    std::set<int> failed;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.passed = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %2d %-30s [%.1fs] %s\n", o.passed ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
        if (!o.passed) failed.insert(c.id);
        std::fflush(stdout);
    }

    const Outcome extra = walk_algebra_infinite_u();
    std::printf("%s 9b %-30s %s\n", extra.passed ? "PASS" : "FAIL", "U* ratio with U(inf) = inf", extra.detail.c_str());
    if (!extra.passed) ++unexpected;

    for (int id : failed) {
        const auto known = kKnownUnattainable.find(id);
        if (known == kKnownUnattainable.end()) {
            ++unexpected;
        } else {
            std::printf("note %d: known unattainable: %s\n", id, known->second.c_str());
        }
    }
    for (const auto& [id, why] : kKnownUnattainable) {
        if (!failed.count(id)) {
            std::printf("note %d: listed as unattainable but passed\n", id);
            ++unexpected;
        }
    }
    std::printf("%zu/%zu criteria passed, %zu failed (%d unexpected)\n", criteria.size() - failed.size(),
                criteria.size(), failed.size(), unexpected);
    return unexpected == 0 ? 0 : 1;
}
