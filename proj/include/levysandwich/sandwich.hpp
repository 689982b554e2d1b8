#pragma once

#include "levysandwich/path_engine.hpp"
#include "levysandwich/stats.hpp"

#include <cstddef>
#include <vector>

namespace levy {

/// The bounding walks of one path: M_n = s_plus[n] + m0 and, when the path
/// carries lower extremes, I_n = s_minus[n] + i0.
struct SandwichWalks {
    std::vector<double> s_plus;
    std::vector<double> s_minus;  ///< empty when the path has no lower extremes
    double m0 = 0.0;
    double i0 = 0.0;              ///< NaN when the path has no lower extremes
};

/// Telescopes the walk steps
///     Y+_r = (X~ increment over interval r-1 - m~_{r-1}) + J_r + m~_r
/// and the mirrored steps from the infima.
SandwichWalks build_sandwich(const SkeletonPath& path);

/// max_n |M_n - S+_n - m0| and the same for the lower side.
double reconstruction_error(const SkeletonPath& path, const SandwichWalks& walks);

/// Two-sample KS of S+_n and S-_n against S^_n from independent runs, plus
/// the one-step law Y+_1 against J + X~(e). Replication r of each sample
/// uses its own stream; the samples use disjoint seeds.
///
/// With exact Brownian extremes the paths carry no infima; S-_n is then
/// taken as -S+_n of -X, which has the law of S- by symmetry.
std::vector<stats::TestReport> verify_walk_law(const Decomposition& decomposition, std::size_t n,
                                               std::size_t replications, const SimConfig& config);

/// Correlation of m~_0 with S+_n and with X~(e_1) - m~_0, and KS of
/// X~(e_1) - m~_0 against independently drawn i~_0.
std::vector<stats::TestReport> verify_independence(const Decomposition& decomposition, std::size_t n,
                                                   std::size_t replications, const SimConfig& config);

/// 2-D KS of (S^_n, m~_n) against (S+_n, m~_0), each pair from its own path.
stats::TestReport verify_joint_law(const Decomposition& decomposition, std::size_t n, std::size_t replications,
                                   const SimConfig& config);

}  // namespace levy
