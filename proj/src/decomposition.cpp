#include "levysandwich/decomposition.hpp"

#include "levysandwich/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace levy {

void Cutoff::validate() const {
    if (!(eta_minus > 0.0) || !std::isfinite(eta_minus)) throw ConfigError("cutoff.eta_minus must be > 0");
    if (!(eta_plus > 0.0) || !std::isfinite(eta_plus)) throw ConfigError("cutoff.eta_plus must be > 0");
}

AliasTable::AliasTable(const std::vector<double>& weights) {
    const std::size_t n = weights.size();
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    probability_.assign(n, 0.0);
    alias_.assign(n, 0);
    if (n == 0 || !(total > 0.0)) return;

    std::vector<double> scaled(n);
    std::vector<std::size_t> small;
    std::vector<std::size_t> large;
    for (std::size_t i = 0; i < n; ++i) {
        scaled[i] = weights[i] * static_cast<double>(n) / total;
        (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
        const std::size_t s = small.back();
        small.pop_back();
        const std::size_t l = large.back();
        probability_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    for (std::size_t i : large) probability_[i] = 1.0;
    for (std::size_t i : small) probability_[i] = 1.0;
}

std::size_t AliasTable::sample(Stream& rng) const {
    const std::size_t n = probability_.size();
    const double u = rng.uniform() * static_cast<double>(n);
    const std::size_t column = std::min(static_cast<std::size_t>(u), n - 1);
    return (u - static_cast<double>(column)) < probability_[column] ? column : alias_[column];
}

WindowSampler::WindowSampler(const MeasureSpec& measure, Window positive, Window negative) {
    std::vector<double> masses;
    for (const MeasureComponent& comp : measure.components()) {
        for (Side side : {Side::Positive, Side::Negative}) {
            const Window& w = side == Side::Positive ? positive : negative;
            const double mass = component_moment(comp, side, 0, w);
            if (mass == 0.0) continue;
            if (!std::isfinite(mass))
                throw ConfigError("cannot sample a window of infinite Levy mass (set sim.inner_cutoff > 0)");

            Piece piece{};
            piece.sign = sign_of(side);
            if (const auto* atoms = std::get_if<AtomsComponent>(&comp)) {
                piece.kind = Kind::AtomSet;
                double running = 0.0;
                for (const Atom& a : atoms->atoms) {
                    if ((a.position > 0.0) != (side == Side::Positive)) continue;
                    if (!w.contains(std::abs(a.position))) continue;
                    running += a.rate;
                    piece.atom_positions.push_back(a.position);
                    piece.atom_cumulative.push_back(running);
                }
            } else if (const auto* power = std::get_if<PowerSideComponent>(&comp)) {
                piece.kind = Kind::Power;
                piece.alpha = power->index;
                piece.lambda = power->tempering;
                piece.lo = std::max(w.lo, power->floor);
                piece.hi = w.hi;
            } else {
                const auto& table = std::get<DensityTableComponent>(comp);
                piece.kind = Kind::TableSet;
                std::vector<double> cell_mass;
                for (std::size_t i = 0; i < table.density.size(); ++i) {
                    const double a = std::max(table.abscissae[i], w.lo);
                    const double b = std::min(table.abscissae[i + 1], w.hi);
                    if (!(b > a) || table.density[i] == 0.0) continue;
                    piece.cell_lo.push_back(a);
                    piece.cell_hi.push_back(b);
                    cell_mass.push_back(table.density[i] * (b - a));
                }
                piece.cells = AliasTable(cell_mass);
            }
            masses.push_back(mass);
            pieces_.push_back(std::move(piece));
            total_ += mass;
        }
    }
    choose_ = AliasTable(masses);
}

double WindowSampler::sample_piece(const Piece& piece, Stream& rng) const {
    switch (piece.kind) {
        case Kind::AtomSet: {
            const double u = rng.uniform() * piece.atom_cumulative.back();
            const auto it = std::upper_bound(piece.atom_cumulative.begin(), piece.atom_cumulative.end(), u);
            const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - piece.atom_cumulative.begin()),
                                                   piece.atom_positions.size() - 1);
            return piece.atom_positions[idx];
        }
        case Kind::Power: {
            // Truncated Pareto on (lo, hi]: y = lo (1 - u (1 - (lo/hi)^alpha))^(-1/alpha)
            const double span = std::isinf(piece.hi) ? 1.0 : 1.0 - std::pow(piece.lo / piece.hi, piece.alpha);
            for (;;) {
                const double u = rng.uniform();
                double y = piece.lo * std::pow(1.0 - u * span, -1.0 / piece.alpha);
                y = std::min(y, piece.hi);
                if (piece.lambda == 0.0 || rng.uniform() < std::exp(-piece.lambda * (y - piece.lo)))
                    return piece.sign * y;
            }
        }
        case Kind::TableSet: {
            const std::size_t cell = piece.cells.sample(rng);
            const double a = piece.cell_lo[cell];
            const double b = piece.cell_hi[cell];
            return piece.sign * (a + (b - a) * rng.uniform());
        }
    }
    return 0.0;
}

double WindowSampler::sample(Stream& rng) const {
    return sample_piece(pieces_[choose_.sample(rng)], rng);
}

CutoffWindows windows_of(const Cutoff& cutoff) {
    return {Window{cutoff.eta_plus, kInf}, Window{cutoff.eta_minus, kInf}, Window{0.0, cutoff.eta_plus},
            Window{0.0, cutoff.eta_minus}};
}

BigJumpLaw::BigJumpLaw(const MeasureSpec& measure, const Cutoff& cutoff) : measure_(measure), cutoff_(cutoff) {
    const CutoffWindows w = windows_of(cutoff);
    delta_ = measure.mass(Side::Positive, w.big_positive) + measure.mass(Side::Negative, w.big_negative);
    if (!(delta_ > 0.0)) throw ZeroBigJumpRate();
    sampler_ = WindowSampler(measure, w.big_positive, w.big_negative);
}

double BigJumpLaw::upper_tail(double x) const {
    double mass = 0.0;
    if (x >= 0.0) {
        mass = measure_.mass(Side::Positive, Window{std::max(x, cutoff_.eta_plus), kInf});
    } else {
        mass = measure_.mass(Side::Positive, Window{cutoff_.eta_plus, kInf});
        if (-x > cutoff_.eta_minus)
            mass += measure_.mass(Side::Negative, Window{cutoff_.eta_minus, -x, false, false});
    }
    return mass / delta_;
}

double BigJumpLaw::lower_tail(double x) const {
    double mass = 0.0;
    if (x <= 0.0) {
        mass = measure_.mass(Side::Negative, Window{std::max(-x, cutoff_.eta_minus), kInf});
    } else {
        mass = measure_.mass(Side::Negative, Window{cutoff_.eta_minus, kInf});
        if (x > cutoff_.eta_plus)
            mass += measure_.mass(Side::Positive, Window{cutoff_.eta_plus, x, false, false});
    }
    return mass / delta_;
}

double BigJumpLaw::cdf(double x) const { return 1.0 - upper_tail(x); }

MeanValue BigJumpLaw::mean() const {
    const CutoffWindows w = windows_of(cutoff_);
    const double plus = measure_.moment(Side::Positive, 1, w.big_positive);
    const double minus = measure_.moment(Side::Negative, 1, w.big_negative);
    MeanValue out;
    out.positive_part_finite = std::isfinite(plus);
    out.negative_part_finite = std::isfinite(minus);
    if (out.positive_part_finite && out.negative_part_finite) {
        out.value = (plus - minus) / delta_;
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

double drift_of_small(const LevyTriplet& triplet, const Cutoff& cutoff) {
    const MeasureSpec& m = triplet.measure;
    double drift = triplet.gamma;
    // Big jumps with |x| <= 1 leave X~, but their compensator stays behind.
    if (cutoff.eta_plus < 1.0) drift -= m.moment(Side::Positive, 1, Window{cutoff.eta_plus, 1.0});
    if (cutoff.eta_minus < 1.0) drift += m.moment(Side::Negative, 1, Window{cutoff.eta_minus, 1.0});
    // Uncompensated jumps with |x| > 1 that stay inside I add their mean.
    if (cutoff.eta_plus > 1.0) drift += m.moment(Side::Positive, 1, Window{1.0, cutoff.eta_plus});
    if (cutoff.eta_minus > 1.0) drift -= m.moment(Side::Negative, 1, Window{1.0, cutoff.eta_minus});
    return drift;
}

Decomposition decompose(const LevyTriplet& triplet, const Cutoff& cutoff) {
    triplet.validate();
    cutoff.validate();
    Decomposition d;
    d.triplet = triplet;
    d.cutoff = cutoff;
    d.windows = windows_of(cutoff);
    d.big_jumps = BigJumpLaw(triplet.measure, cutoff);
    d.delta = d.big_jumps.rate();
    d.small_sigma2 = triplet.sigma2;
    d.small_drift = drift_of_small(triplet, cutoff);
    d.small_mass = triplet.measure.mass(Side::Positive, d.windows.small_positive) +
                   triplet.measure.mass(Side::Negative, d.windows.small_negative);
    return d;
}

MeanValue step_mean(const Decomposition& decomposition) {
    MeanValue jump_mean = decomposition.big_jumps.mean();
    if (jump_mean.finite()) jump_mean.value += decomposition.small_mean_per_step();
    return jump_mean;
}

}  // namespace levy
