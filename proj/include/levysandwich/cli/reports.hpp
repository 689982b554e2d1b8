#pragma once

#include "levysandwich/asymptotics.hpp"
#include "levysandwich/path_engine.hpp"
#include "levysandwich/sandwich.hpp"
#include "levysandwich/stats.hpp"

#include <json.hpp>

#include <ostream>
#include <span>
#include <string>

namespace levy::cli {

/// Shortest round-trip decimal; "inf", "-inf", "nan" for the special values.
std::string format_number(double v);

/// Finite numbers as JSON numbers, the rest as the strings of format_number.
nlohmann::json json_number(double v);

/// Header x,N,M,T,D,A,U,criterion.
void write_tail_csv(std::ostream& out, std::span<const TailReport> rows);
/// Header t,x.
void write_path_csv(std::ostream& out, const SkeletonPath& path);
/// Header n,tau,jump,small_increment,s_hat,m_tilde,i_tilde,upper,lower.
void write_skeleton_csv(std::ostream& out, const SkeletonPath& path);
/// Header n,s_plus,s_minus.
void write_sandwich_csv(std::ostream& out, const SandwichWalks& walks);
/// Header t,level,upper,lower; levels are numbered from 1 (coarsest).
void write_envelope_csv(std::ostream& out, const MultilevelResult& result);

nlohmann::json to_json(const TailReport& row);
nlohmann::json to_json(const stats::TestReport& report);
nlohmann::json to_json(const McPoint& point);
nlohmann::json to_json(const CriterionReport& report);
nlohmann::json to_json(const ScalingReport& report);

}  // namespace levy::cli
