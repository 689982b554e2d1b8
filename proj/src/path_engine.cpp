#include "levysandwich/path_engine.hpp"

#include "levysandwich/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace levy {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum class Epoch { Start, Grid, PreJump, PostJump, End };

/// Walks X~ over [0, duration) and calls visit(t, x, epoch) at every epoch.
/// The visitor returns false to stop early. `dense` adds the grid points;
/// without it only jump epochs and the end are visited.
template <class Visitor>
SmallInterval walk_small(Stream& rng, const SmallProcess& small, double duration, double h, bool dense,
                         Visitor&& visit) {
    SmallInterval out{0.0, 0.0, 0.0};
    double t = 0.0;
    double x = 0.0;
    const double b = small.drift();
    const double s = std::sqrt(small.diffusion());
    const double rate = small.jump_rate();
    double next_jump = rate > 0.0 ? rng.exponential(rate) : kInf;
    std::size_t grid_index = 0;

    auto advance = [&](double to) {
        const double dt = to - t;
        x += b * dt;
        if (s > 0.0) x += s * std::sqrt(dt) * rng.normal();
        t = to;
    };
    auto record = [&](Epoch kind) {
        out.sup = std::max(out.sup, x);
        out.inf = std::min(out.inf, x);
        return visit(t, x, kind);
    };

    if (!visit(0.0, 0.0, Epoch::Start)) return out;
    for (;;) {
        const double next_grid =
            dense ? std::min(static_cast<double>(grid_index + 1) * h, duration) : duration;
        if (next_jump < next_grid) {
            advance(next_jump);
            if (!record(Epoch::PreJump)) break;
            x += small.sample_jump(rng);
            if (!record(Epoch::PostJump)) break;
            next_jump = t + rng.exponential(rate);
            continue;
        }
        advance(next_grid);
        ++grid_index;
        if (next_grid >= duration) {
            record(Epoch::End);
            break;
        }
        if (!record(Epoch::Grid)) break;
    }
    out.increment = x;
    return out;
}

}  // namespace

void SimConfig::validate() const {
    if (!(grid_step > 0.0) || !std::isfinite(grid_step)) throw ConfigError("sim.grid_step must be > 0");
    if (!(inner_cutoff >= 0.0) || !std::isfinite(inner_cutoff)) throw ConfigError("sim.inner_cutoff must be >= 0");
    if (!(horizon.value > 0.0) || !std::isfinite(horizon.value)) throw ConfigError("sim.horizon must be positive");
    if (workers < 1) throw ConfigError("sim.workers must be >= 1");
    if (!(time_cap > 0.0)) throw ConfigError("sim.time_cap must be > 0");
    cutoff.validate();
}

SmallProcess::SmallProcess(const Decomposition& d, const SimConfig& config) {
    const double eps = config.inner_cutoff;
    if (!(eps < d.cutoff.min()))
        throw ConfigError("sim.inner_cutoff must be < min(cutoff.eta_minus, cutoff.eta_plus)");
    const MeasureSpec& m = d.triplet.measure;

    const Window inner_pos{eps, d.cutoff.eta_plus};
    const Window inner_neg{eps, d.cutoff.eta_minus};
    jumps_ = WindowSampler(m, inner_pos, inner_neg);

    if (eps > 0.0) {
        const Window below{0.0, eps};
        const double sub_var = m.moment(Side::Positive, 2, below) + m.moment(Side::Negative, 2, below);
        if (sub_var > 10.0 * eps * eps)
            surrogate_variance_ = sub_var;
        else
            dropped_variance_ = sub_var;
    }
    diffusion_ = d.small_sigma2 + surrogate_variance_;
    drift_ = d.small_drift - (m.moment(Side::Positive, 1, inner_pos) - m.moment(Side::Negative, 1, inner_neg));
}

std::string SmallProcess::describe() const {
    std::ostringstream os;
    os << "drift=" << drift_ << " diffusion=" << diffusion_ << " inner_jump_rate=" << jump_rate();
    if (surrogate_variance_ > 0.0) os << " gaussian_surrogate_variance=" << surrogate_variance_;
    if (dropped_variance_ > 0.0)
        os << " dropped_small_jump_variance=" << dropped_variance_ << " (bias sd per unit time <= "
           << std::sqrt(dropped_variance_) << ")";
    return os.str();
}

SkeletonPath assemble_skeleton(std::span<const IntervalDraw> intervals, std::span<const double> jumps,
                               bool has_lower) {
    if (intervals.size() != jumps.size() + 1)
        throw ConfigError("skeleton needs exactly one more interval than jumps");
    const std::size_t n = jumps.size();
    SkeletonPath p;
    p.jumps.assign(jumps.begin(), jumps.end());
    p.taus.resize(n + 1);
    p.gaps.resize(n + 1);
    p.small_increments.resize(n + 1);
    p.s_hat.resize(n + 1);
    p.m_tilde.resize(n + 1);
    p.upper.resize(n + 1);
    if (has_lower) {
        p.i_tilde.resize(n + 1);
        p.lower.resize(n + 1);
    }

    p.taus[0] = 0.0;
    p.s_hat[0] = 0.0;
    for (std::size_t r = 0; r <= n; ++r) {
        const IntervalDraw& draw = intervals[r];
        if (r > 0) {
            p.taus[r] = p.taus[r - 1] + intervals[r - 1].gap;
            p.s_hat[r] = p.s_hat[r - 1] + intervals[r - 1].small.increment + jumps[r - 1];
        }
        p.gaps[r] = draw.gap;
        p.small_increments[r] = draw.small.increment;
        p.m_tilde[r] = draw.small.sup;
        p.upper[r] = p.s_hat[r] + draw.small.sup;
        if (has_lower) {
            p.i_tilde[r] = draw.small.inf;
            p.lower[r] = p.s_hat[r] + draw.small.inf;
        }
    }
    return p;
}

SkeletonPath negated(const SkeletonPath& path) {
    SkeletonPath out = path;
    auto flip = [](std::vector<double>& v) {
        for (double& x : v) x = -x;
    };
    flip(out.jumps);
    flip(out.small_increments);
    flip(out.s_hat);
    out.m_tilde = path.i_tilde;
    out.i_tilde = path.m_tilde;
    out.upper = path.lower;
    out.lower = path.upper;
    flip(out.m_tilde);
    flip(out.i_tilde);
    flip(out.upper);
    flip(out.lower);
    for (FinePoint& p : out.fine) p.x = -p.x;
    return out;
}

std::vector<double> sample_exponential_gaps(Stream& rng, double delta, std::size_t n) {
    if (!(delta > 0.0)) throw ConfigError("exponential rate must be > 0");
    std::vector<double> gaps(n);
    for (double& g : gaps) g = rng.exponential(delta);
    return gaps;
}

SmallInterval simulate_small_interval(Stream& rng, const SmallProcess& small, double duration, double grid_step,
                                      std::vector<FinePoint>* trace) {
    if (!(duration > 0.0)) throw ConfigError("interval duration must be > 0");
    const bool dense = small.diffusion() > 0.0 || trace != nullptr;
    return walk_small(rng, small, duration, grid_step, dense, [trace](double t, double x, Epoch) {
        if (trace != nullptr) trace->push_back({t, x, 0});
        return true;
    });
}

BrownianExtremes exact_brownian_sup_sampler(Stream& rng, double mu, double sigma2, double delta) {
    if (!(sigma2 > 0.0)) throw ConfigError("exact Brownian sampler needs sigma2 > 0");
    if (!(delta > 0.0)) throw ConfigError("exact Brownian sampler needs delta > 0");
    const double root = std::sqrt(mu * mu + 2.0 * sigma2 * delta);
    const double theta_plus = (root - mu) / sigma2;
    const double theta_minus = (root + mu) / sigma2;
    const double sup = rng.exponential(theta_plus);
    const double drop = rng.exponential(theta_minus);
    return {sup - drop, sup};
}

PathSimulator::PathSimulator(Decomposition decomposition, SimConfig config)
    : decomposition_(std::move(decomposition)), config_(config), small_(decomposition_, config_) {
    config_.validate();
    if (config_.extremes == ExtremesMode::ExactBrownian) {
        if (decomposition_.small_has_jumps())
            throw ConfigError("exact Brownian extremes need an empty small-jump measure inside I");
        if (!(decomposition_.small_sigma2 > 0.0))
            throw ConfigError("exact Brownian extremes need sigma2 > 0");
        if (config_.record_fine_path) throw ConfigError("exact Brownian extremes have no fine path");
    }
}

SmallInterval PathSimulator::draw_interval(Stream& rng, double duration, std::vector<FinePoint>* trace) const {
    return simulate_small_interval(rng, small_, duration, config_.grid_step, trace);
}

SkeletonPath PathSimulator::sample_skeleton(Stream& rng, std::size_t n) const {
    const double delta = decomposition_.delta;
    std::vector<IntervalDraw> intervals(n + 1);
    std::vector<double> jumps(n);
    std::vector<std::vector<FinePoint>> traces(config_.record_fine_path ? n + 1 : 0);

    const bool exact = config_.extremes == ExtremesMode::ExactBrownian;
    for (std::size_t r = 0; r <= n; ++r) {
        const double gap = rng.exponential(delta);
        if (exact) {
            const BrownianExtremes e =
                exact_brownian_sup_sampler(rng, decomposition_.small_drift, decomposition_.small_sigma2, delta);
            intervals[r] = {gap, {e.increment, e.sup, kNaN}};
        } else {
            intervals[r] = {gap, draw_interval(rng, gap, config_.record_fine_path ? &traces[r] : nullptr)};
        }
        if (r < n) jumps[r] = decomposition_.big_jumps.sample(rng);
    }

    SkeletonPath path = assemble_skeleton(intervals, jumps, !exact);
    path.gaps_coupled = !exact;
    if (config_.record_fine_path) {
        for (std::size_t r = 0; r <= n; ++r)
            for (const FinePoint& p : traces[r])
                path.fine.push_back({path.taus[r] + p.t, path.s_hat[r] + p.x, r});
    }
    return path;
}

SkeletonPath PathSimulator::sample_skeleton_until(Stream& rng, double t_end) const {
    if (config_.extremes == ExtremesMode::ExactBrownian)
        throw ConfigError("time-horizon skeletons need grid extremes");
    if (!(t_end > 0.0)) throw ConfigError("time horizon must be > 0");
    const double delta = decomposition_.delta;
    std::vector<IntervalDraw> intervals;
    std::vector<double> jumps;
    std::vector<std::vector<FinePoint>> traces;

    double t = 0.0;
    for (;;) {
        const double gap = rng.exponential(delta);
        const bool last = t + gap >= t_end;
        const double duration = last ? t_end - t : gap;
        traces.emplace_back();
        intervals.push_back(
            {duration, draw_interval(rng, duration, config_.record_fine_path ? &traces.back() : nullptr)});
        if (last) break;
        t += gap;
        jumps.push_back(decomposition_.big_jumps.sample(rng));
    }

    SkeletonPath path = assemble_skeleton(intervals, jumps, true);
    path.truncated_at = t_end;
    if (config_.record_fine_path) {
        for (std::size_t r = 0; r < intervals.size(); ++r)
            for (const FinePoint& p : traces[r])
                path.fine.push_back({path.taus[r] + p.t, path.s_hat[r] + p.x, r});
    }
    return path;
}

std::vector<double> PathSimulator::sample_walk(Stream& rng, std::size_t n) const {
    const double delta = decomposition_.delta;
    std::vector<double> walk(n + 1, 0.0);
    for (std::size_t r = 1; r <= n; ++r) {
        const double gap = rng.exponential(delta);
        double small = small_.drift() * gap;
        if (small_.diffusion() > 0.0) small += std::sqrt(small_.diffusion() * gap) * rng.normal();
        if (small_.jump_rate() > 0.0)
            for (double s = rng.exponential(small_.jump_rate()); s < gap; s += rng.exponential(small_.jump_rate()))
                small += small_.sample_jump(rng);
        walk[r] = walk[r - 1] + small + decomposition_.big_jumps.sample(rng);
    }
    return walk;
}

PathSimulator::ValueParts PathSimulator::sample_value(Stream& rng, double t) const {
    ValueParts parts{0, 0.0, 0.0};
    for (double s = rng.exponential(decomposition_.delta); s <= t; s += rng.exponential(decomposition_.delta)) {
        ++parts.jump_count;
        parts.jump_sum += decomposition_.big_jumps.sample(rng);
    }
    double small = small_.drift() * t;
    if (small_.diffusion() > 0.0) small += std::sqrt(small_.diffusion() * t) * rng.normal();
    if (small_.jump_rate() > 0.0)
        for (double s = rng.exponential(small_.jump_rate()); s <= t; s += rng.exponential(small_.jump_rate()))
            small += small_.sample_jump(rng);
    parts.small_value = small;
    return parts;
}

std::optional<ExitResult> PathSimulator::try_exit(Stream& rng, double r) const {
    if (!(r > 0.0)) throw ConfigError("exit level r must be > 0");
    const double cap = config_.time_cap;
    const double delta = decomposition_.delta;
    const bool dense = small_.diffusion() > 0.0;
    const double b = small_.drift();

    double t0 = 0.0;
    double level = 0.0;  // X at the start of the current interval
    std::optional<ExitResult> hit;
    while (t0 < cap) {
        const double gap = rng.exponential(delta);
        const double duration = std::min(gap, cap - t0);
        double prev_t = 0.0;
        double prev_x = 0.0;
        const SmallInterval walked =
            walk_small(rng, small_, duration, config_.grid_step, dense, [&](double t, double x, Epoch kind) {
                const double value = level + x;
                if (std::abs(value) > r) {
                    if (!dense && kind != Epoch::PostJump && b != 0.0) {
                        // Linear motion since the last epoch: exact crossing time.
                        const double target = value > 0.0 ? r : -r;
                        const double crossing = prev_t + (target - (level + prev_x)) / b;
                        hit = ExitResult{t0 + crossing, value > 0.0, 0.0};
                    } else {
                        hit = ExitResult{t0 + t, value > 0.0, std::abs(value) - r};
                    }
                    return false;
                }
                prev_t = t;
                prev_x = x;
                return true;
            });
        if (hit) return hit;
        if (gap >= cap - t0) break;
        level += walked.increment + decomposition_.big_jumps.sample(rng);
        t0 += gap;
        if (std::abs(level) > r) return ExitResult{t0, level > 0.0, std::abs(level) - r};
    }
    return std::nullopt;
}

SkeletonPath sample_skeleton(Stream& rng, const Decomposition& decomposition, std::size_t n,
                             const SimConfig& config) {
    return PathSimulator(decomposition, config).sample_skeleton(rng, n);
}

ExitResult exit_time(Stream& rng, const LevyTriplet& triplet, double r, const SimConfig& config) {
    const PathSimulator sim(decompose(triplet, config.cutoff), config);
    const auto result = sim.try_exit(rng, r);
    if (!result) throw HorizonExceeded(config.time_cap);
    return *result;
}

MultilevelResult multilevel_bounds(Stream& rng, const LevyTriplet& triplet, std::span<const Cutoff> levels,
                                   const SimConfig& config) {
    if (levels.empty()) throw ConfigError("levels must name at least one cutoff");
    for (std::size_t k = 1; k < levels.size(); ++k) {
        if (!(levels[k].eta_minus < levels[k - 1].eta_minus && levels[k].eta_plus < levels[k - 1].eta_plus))
            throw ConfigError("levels must shrink strictly on both sides");
    }
    SimConfig fine_config = config;
    fine_config.record_fine_path = true;
    fine_config.extremes = ExtremesMode::Grid;
    const PathSimulator sim(decompose(triplet, levels.back()), fine_config);

    MultilevelResult out;
    out.finest = config.horizon.kind == Horizon::Kind::Steps
                     ? sim.sample_skeleton(rng, static_cast<std::size_t>(config.horizon.value))
                     : sim.sample_skeleton_until(rng, config.horizon.value);
    const SkeletonPath& path = out.finest;
    const std::size_t intervals = path.s_hat.size();

    for (const Cutoff& c : levels) {
        LevelEnvelope env;
        env.cutoff = c;
        env.level_interval.resize(intervals);
        env.starts.push_back(0.0);
        std::size_t current = 0;
        for (std::size_t r = 0; r < intervals; ++r) {
            if (r > 0) {
                const double j = path.jumps[r - 1];
                if (j > c.eta_plus || j < -c.eta_minus) {
                    ++current;
                    env.starts.push_back(path.taus[r]);
                }
            }
            env.level_interval[r] = current;
        }
        env.upper.assign(current + 1, -kInf);
        env.lower.assign(current + 1, kInf);
        for (const FinePoint& p : path.fine) {
            const std::size_t k = env.level_interval[p.interval];
            env.upper[k] = std::max(env.upper[k], p.x);
            env.lower[k] = std::min(env.lower[k], p.x);
        }
        out.levels.push_back(std::move(env));
    }

    out.max_gap.assign(levels.size(), 0.0);
    for (const FinePoint& p : path.fine) {
        for (std::size_t k = 0; k < levels.size(); ++k) {
            const double u = out.upper_at(k, p);
            const double l = out.lower_at(k, p);
            out.max_gap[k] = std::max(out.max_gap[k], u - l);
            if (!(l <= p.x && p.x <= u)) out.contained = false;
            if (k > 0 && !(u <= out.upper_at(k - 1, p) && l >= out.lower_at(k - 1, p))) out.nested = false;
        }
    }
    return out;
}

}  // namespace levy
