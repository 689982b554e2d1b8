#pragma once

#include "levysandwich/asymptotics.hpp"
#include "levysandwich/decomposition.hpp"
#include "levysandwich/measure.hpp"
#include "levysandwich/path_engine.hpp"

#include <json.hpp>

#include <cstddef>
#include <string>
#include <vector>

namespace levy::cli {

/// Parameters of the verify suites.
struct VerifyParams {
    std::string suite;             ///< optional default; the command line wins
    std::size_t n = 5;             ///< walk index for the sandwich law checks
    double t = 10.0;               ///< time for the identity check
    std::size_t scaling_n = 10000; ///< walk index for the scaling diagnostic
    double scaling_t = 10000.0;    ///< time for the scaling diagnostic
    double tolerance = 0.05;       ///< relative tolerance on the scaling ratio
};

/// Everything a subcommand needs. Validation happens in parse_config, so a
/// RunConfig that exists satisfies every module invariant it names.
struct RunConfig {
    LevyTriplet triplet;
    Cutoff cutoff;
    SimConfig sim;
    bool has_sim = false;
    std::vector<double> x_grid;
    std::vector<double> t_list;
    std::vector<double> r_list;
    double alpha = 1.0;
    std::vector<Cutoff> levels;
    Thresholds thresholds;
    VerifyParams verify;
};

MeasureSpec parse_measure(const nlohmann::json& node, const std::string& path);
RunConfig parse_config(const nlohmann::json& doc);
/// Reads and parses a config file; ConfigError on unreadable or invalid input.
RunConfig load_config(const std::string& file);

}  // namespace levy::cli
