#include "levysandwich/cli/reports.hpp"

#include <charconv>
#include <cmath>

namespace levy::cli {

using nlohmann::json;

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

json json_number(double v) {
    if (std::isfinite(v)) return v;
    return format_number(v);
}

void write_tail_csv(std::ostream& out, std::span<const TailReport> rows) {
    out << "x,N,M,T,D,A,U,criterion\n";
    for (const TailReport& r : rows) {
        out << format_number(r.x) << ',' << format_number(r.n_plus) << ',' << format_number(r.m_minus) << ','
            << format_number(r.t_sum) << ',' << format_number(r.d_diff) << ',' << format_number(r.a_trunc) << ','
            << format_number(r.u_trunc) << ',' << format_number(r.criterion) << '\n';
    }
}

void write_path_csv(std::ostream& out, const SkeletonPath& path) {
    out << "t,x\n";
    for (const FinePoint& p : path.fine) out << format_number(p.t) << ',' << format_number(p.x) << '\n';
}

void write_skeleton_csv(std::ostream& out, const SkeletonPath& path) {
    out << "n,tau,jump,small_increment,s_hat,m_tilde,i_tilde,upper,lower\n";
    for (std::size_t r = 0; r < path.s_hat.size(); ++r) {
        out << r << ',' << format_number(path.taus[r]) << ',' << (r > 0 ? format_number(path.jumps[r - 1]) : "")
            << ',' << format_number(path.small_increments[r]) << ',' << format_number(path.s_hat[r]) << ','
            << format_number(path.m_tilde[r]) << ',' << (path.has_lower() ? format_number(path.i_tilde[r]) : "")
            << ',' << format_number(path.upper[r]) << ',' << (path.has_lower() ? format_number(path.lower[r]) : "")
            << '\n';
    }
}

void write_sandwich_csv(std::ostream& out, const SandwichWalks& walks) {
    out << "n,s_plus,s_minus\n";
    for (std::size_t r = 0; r < walks.s_plus.size(); ++r) {
        out << r << ',' << format_number(walks.s_plus[r]) << ','
            << (r < walks.s_minus.size() ? format_number(walks.s_minus[r]) : "") << '\n';
    }
}

void write_envelope_csv(std::ostream& out, const MultilevelResult& result) {
    out << "t,level,upper,lower\n";
    for (const FinePoint& p : result.finest.fine) {
        for (std::size_t k = 0; k < result.levels.size(); ++k) {
            out << format_number(p.t) << ',' << (k + 1) << ',' << format_number(result.upper_at(k, p)) << ','
                << format_number(result.lower_at(k, p)) << '\n';
        }
    }
}

json to_json(const TailReport& r) {
    return json{{"x", json_number(r.x)},           {"N", json_number(r.n_plus)},
                {"M", json_number(r.m_minus)},     {"T", json_number(r.t_sum)},
                {"D", json_number(r.d_diff)},      {"A", json_number(r.a_trunc)},
                {"U", json_number(r.u_trunc)},     {"criterion", json_number(r.criterion)}};
}

json to_json(const stats::TestReport& r) {
    return json{{"name", r.name},
                {"statistic", json_number(r.statistic)},
                {"threshold", json_number(r.threshold)},
                {"n_samples", r.n_samples},
                {"passed", r.passed},
                {"vacuous", r.vacuous},
                {"notes", r.notes}};
}

json to_json(const McPoint& p) {
    return json{{"at", json_number(p.at)},
                {"estimate", json_number(p.estimate)},
                {"stderr", json_number(p.stderr_)},
                {"n", p.n},
                {"excluded", p.excluded}};
}

json to_json(const CriterionReport& r) {
    json grid = json::array();
    for (const TailReport& row : r.grid) grid.push_back(to_json(row));
    json mc = json::object();
    if (!r.mc_positivity.empty() || !r.mc_exit.empty()) {
        json pos = json::array();
        for (const McPoint& p : r.mc_positivity) pos.push_back(to_json(p));
        json exit = json::array();
        for (const McPoint& p : r.mc_exit) exit.push_back(to_json(p));
        mc = json{{"positivity", pos}, {"exit_positivity", exit}};
    } else {
        mc = nullptr;
    }
    return json{{"verdict", to_string(r.verdict)},
                {"branch", to_string(r.branch)},
                {"grid", grid},
                {"mc_evidence", mc},
                {"log_slope", r.log_slope ? json_number(*r.log_slope) : json(nullptr)},
                {"notes", r.notes}};
}

json to_json(const ScalingReport& r) {
    return json{{"delta", json_number(r.delta)},
                {"alpha", json_number(r.alpha)},
                {"walk_limit", json_number(r.walk_limit)},
                {"walk_stderr", json_number(r.walk_stderr)},
                {"process_limit", json_number(r.process_limit)},
                {"process_stderr", json_number(r.process_stderr)},
                {"ratio", json_number(r.ratio)},
                {"renewal_constant", json_number(r.renewal_constant)},
                {"stated_constant", json_number(r.stated_constant)},
                {"vacuous", r.vacuous},
                {"notes", r.notes}};
}

}  // namespace levy::cli
