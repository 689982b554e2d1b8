#include "levysandwich/cli/config.hpp"

#include "levysandwich/errors.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace levy::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

const json& require(const json& node, const std::string& path, const std::string& key) {
    if (!node.is_object()) fail(path, "expected an object");
    const auto it = node.find(key);
    if (it == node.end()) fail(join(path, key), "missing required key");
    return *it;
}

void reject_unknown(const json& node, const std::string& path, std::initializer_list<const char*> known) {
    const std::set<std::string> allowed(known.begin(), known.end());
    for (const auto& [key, value] : node.items())
        if (!allowed.count(key)) fail(join(path, key), "unknown key");
}

double number(const json& node, const std::string& path) {
    if (!node.is_number()) fail(path, "expected a number");
    const double v = node.get<double>();
    if (!std::isfinite(v)) fail(path, "expected a finite number");
    return v;
}

double number_or(const json& node, const std::string& path, const std::string& key, double fallback) {
    const auto it = node.find(key);
    return it == node.end() ? fallback : number(*it, join(path, key));
}

std::uint64_t unsigned_integer(const json& node, const std::string& path) {
    if (!node.is_number_integer() || node.get<std::int64_t>() < 0) {
        if (node.is_number_unsigned()) return node.get<std::uint64_t>();
        if (node.is_number_float()) {
            const double v = node.get<double>();
            if (v >= 0.0 && v == std::floor(v) && v < 9.007199254740992e15) return static_cast<std::uint64_t>(v);
        }
        fail(path, "expected a nonnegative integer");
    }
    return node.get<std::uint64_t>();
}

std::vector<double> number_list(const json& node, const std::string& path) {
    if (!node.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < node.size(); ++i) out.push_back(number(node[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

Side parse_side(const std::string& key) { return key == "plus" ? Side::Positive : Side::Negative; }

void parse_into(const json& node, const std::string& path, std::vector<MeasureComponent>& out) {
    if (!node.is_object()) fail(path, "expected an object");
    const json& kind_node = require(node, path, "kind");
    if (!kind_node.is_string()) fail(join(path, "kind"), "expected a string");
    const std::string kind = kind_node.get<std::string>();

    if (kind == "atoms") {
        reject_unknown(node, path, {"kind", "atoms"});
        const json& list = require(node, path, "atoms");
        const std::string lp = join(path, "atoms");
        if (!list.is_array() || list.empty()) fail(lp, "expected a nonempty array of {position, rate}");
        AtomsComponent c;
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string ap = lp + "[" + std::to_string(i) + "]";
            reject_unknown(list[i], ap, {"position", "rate"});
            const double pos = number(require(list[i], ap, "position"), join(ap, "position"));
            const double rate = number(require(list[i], ap, "rate"), join(ap, "rate"));
            if (pos == 0.0) fail(join(ap, "position"), "atom position must be nonzero");
            if (!(rate > 0.0)) fail(join(ap, "rate"), "atom rate must be > 0");
            c.atoms.push_back({pos, rate});
        }
        out.emplace_back(std::move(c));
    } else if (kind == "power") {
        reject_unknown(node, path, {"kind", "plus", "minus"});
        if (!node.contains("plus") && !node.contains("minus")) fail(path, "power measure needs plus and/or minus");
        for (const char* key : {"plus", "minus"}) {
            if (!node.contains(key)) continue;
            const std::string sp = join(path, key);
            const json& s = node.at(key);
            if (!s.is_object()) fail(sp, "expected an object");
            reject_unknown(s, sp, {"intensity", "index", "tempering", "floor"});
            PowerSideComponent c;
            c.side = parse_side(key);
            c.intensity = number(require(s, sp, "intensity"), join(sp, "intensity"));
            c.index = number(require(s, sp, "index"), join(sp, "index"));
            c.tempering = number_or(s, sp, "tempering", 0.0);
            c.floor = number_or(s, sp, "floor", 0.0);
            if (c.intensity < 0.0) fail(join(sp, "intensity"), "must be >= 0");
            if (!(c.index > 0.0)) fail(join(sp, "index"), "must be > 0");
            if (c.floor == 0.0 && !(c.index < 2.0)) fail(join(sp, "index"), "must be < 2 when floor = 0");
            if (c.tempering < 0.0) fail(join(sp, "tempering"), "must be >= 0");
            if (c.floor < 0.0) fail(join(sp, "floor"), "must be >= 0");
            out.emplace_back(c);
        }
    } else if (kind == "table") {
        reject_unknown(node, path, {"kind", "plus", "minus"});
        if (!node.contains("plus") && !node.contains("minus")) fail(path, "table measure needs plus and/or minus");
        for (const char* key : {"plus", "minus"}) {
            if (!node.contains(key)) continue;
            const std::string sp = join(path, key);
            const json& s = node.at(key);
            reject_unknown(s, sp, {"abscissae", "density"});
            DensityTableComponent c;
            c.side = parse_side(key);
            c.abscissae = number_list(require(s, sp, "abscissae"), join(sp, "abscissae"));
            c.density = number_list(require(s, sp, "density"), join(sp, "density"));
            if (c.abscissae.size() < 2) fail(join(sp, "abscissae"), "needs at least two points");
            if (c.density.size() + 1 != c.abscissae.size())
                fail(join(sp, "density"), "needs exactly one value per cell (abscissae count - 1)");
            for (std::size_t i = 0; i < c.abscissae.size(); ++i) {
                if (c.abscissae[i] < 0.0) fail(join(sp, "abscissae"), "must be >= 0");
                if (i > 0 && !(c.abscissae[i] > c.abscissae[i - 1]))
                    fail(join(sp, "abscissae"), "must be strictly increasing");
            }
            for (double d : c.density)
                if (d < 0.0) fail(join(sp, "density"), "must be >= 0");
            out.emplace_back(std::move(c));
        }
    } else if (kind == "sum") {
        reject_unknown(node, path, {"kind", "parts"});
        const json& parts = require(node, path, "parts");
        const std::string pp = join(path, "parts");
        if (!parts.is_array() || parts.empty()) fail(pp, "expected a nonempty array of measures");
        for (std::size_t i = 0; i < parts.size(); ++i) parse_into(parts[i], pp + "[" + std::to_string(i) + "]", out);
    } else {
        fail(join(path, "kind"), "unknown measure kind '" + kind + "' (atoms, power, table, sum)");
    }
}

Cutoff parse_cutoff(const json& node, const std::string& path) {
    reject_unknown(node, path, {"eta_minus", "eta_plus"});
    Cutoff c;
    c.eta_minus = number(require(node, path, "eta_minus"), join(path, "eta_minus"));
    c.eta_plus = number(require(node, path, "eta_plus"), join(path, "eta_plus"));
    if (!(c.eta_minus > 0.0)) fail(join(path, "eta_minus"), "must be > 0");
    if (!(c.eta_plus > 0.0)) fail(join(path, "eta_plus"), "must be > 0");
    return c;
}

SimConfig parse_sim(const json& node, const Cutoff& cutoff) {
    const std::string path = "sim";
    if (!node.is_object()) fail(path, "expected an object");
    reject_unknown(node, path,
                   {"seed", "grid_step", "inner_cutoff", "horizon", "replications", "workers", "time_cap", "extremes"});
    SimConfig s;
    s.cutoff = cutoff;
    if (node.contains("seed")) s.seed = unsigned_integer(node.at("seed"), "sim.seed");
    s.grid_step = number_or(node, path, "grid_step", s.grid_step);
    s.inner_cutoff = number_or(node, path, "inner_cutoff", s.inner_cutoff);
    s.time_cap = number_or(node, path, "time_cap", s.time_cap);
    if (node.contains("replications")) s.replications = unsigned_integer(node.at("replications"), "sim.replications");
    if (node.contains("workers")) {
        const auto w = unsigned_integer(node.at("workers"), "sim.workers");
        if (w < 1 || w > 1024) fail("sim.workers", "must be in [1, 1024]");
        s.workers = static_cast<int>(w);
    }
    if (node.contains("horizon")) {
        const json& h = node.at("horizon");
        if (!h.is_object() || h.size() != 1 || !(h.contains("steps") || h.contains("time")))
            fail("sim.horizon", "expected {\"steps\": n} or {\"time\": t}");
        if (h.contains("steps")) {
            const auto n = unsigned_integer(h.at("steps"), "sim.horizon.steps");
            s.horizon = Horizon::steps(n);
            if (n == 0) fail("sim.horizon.steps", "must be >= 1");
        } else {
            s.horizon = Horizon::time(number(h.at("time"), "sim.horizon.time"));
        }
    }
    if (node.contains("extremes")) {
        const json& e = node.at("extremes");
        if (!e.is_string()) fail("sim.extremes", "expected \"grid\" or \"exact_brownian\"");
        const std::string v = e.get<std::string>();
        if (v == "grid")
            s.extremes = ExtremesMode::Grid;
        else if (v == "exact_brownian")
            s.extremes = ExtremesMode::ExactBrownian;
        else
            fail("sim.extremes", "expected \"grid\" or \"exact_brownian\"");
    }
    if (!(s.grid_step > 0.0)) fail("sim.grid_step", "must be > 0");
    if (s.inner_cutoff < 0.0) fail("sim.inner_cutoff", "must be >= 0");
    if (!(s.inner_cutoff < cutoff.min())) fail("sim.inner_cutoff", "must be < min(cutoff.eta_minus, cutoff.eta_plus)");
    if (!(s.horizon.value > 0.0)) fail("sim.horizon", "must be positive");
    if (!(s.time_cap > 0.0)) fail("sim.time_cap", "must be > 0");
    if (s.replications < 1) fail("sim.replications", "must be >= 1");
    return s;
}

std::vector<double> parse_grid(const json& node, const std::string& path) {
    if (node.is_array()) {
        std::vector<double> g = number_list(node, path);
        for (double x : g)
            if (!(x > 0.0)) fail(path, "values must be > 0");
        return g;
    }
    if (node.is_object()) {
        reject_unknown(node, path, {"from", "to", "points"});
        const double from = number(require(node, path, "from"), join(path, "from"));
        const double to = number(require(node, path, "to"), join(path, "to"));
        const auto points = unsigned_integer(require(node, path, "points"), join(path, "points"));
        if (!(from > 0.0) || !(to > from)) fail(path, "needs 0 < from < to");
        if (points < 2) fail(join(path, "points"), "must be >= 2");
        return geometric_grid(from, to, points);
    }
    fail(path, "expected an array or {from, to, points}");
}

}  // namespace

MeasureSpec parse_measure(const json& node, const std::string& path) {
    std::vector<MeasureComponent> components;
    parse_into(node, path, components);
    try {
        return MeasureSpec(std::move(components));
    } catch (const ConfigError& e) {
        fail(path, e.what());
    }
}

RunConfig parse_config(const json& doc) {
    if (!doc.is_object()) fail("<root>", "expected an object");
    reject_unknown(doc, "",
                   {"triplet", "cutoff", "sim", "x_grid", "t_list", "r_list", "alpha", "levels", "thresholds", "verify"});
    RunConfig cfg;

    const json& t = require(doc, "", "triplet");
    reject_unknown(t, "triplet", {"gamma", "sigma2", "measure"});
    cfg.triplet.gamma = number_or(t, "triplet", "gamma", 0.0);
    cfg.triplet.sigma2 = number_or(t, "triplet", "sigma2", 0.0);
    if (cfg.triplet.sigma2 < 0.0) fail("triplet.sigma2", "must be >= 0");
    cfg.triplet.measure = parse_measure(require(t, "triplet", "measure"), "triplet.measure");

    cfg.cutoff = doc.contains("cutoff") ? parse_cutoff(doc.at("cutoff"), "cutoff") : Cutoff{};
    cfg.has_sim = doc.contains("sim");
    cfg.sim = cfg.has_sim ? parse_sim(doc.at("sim"), cfg.cutoff) : SimConfig{};
    cfg.sim.cutoff = cfg.cutoff;

    if (doc.contains("x_grid")) cfg.x_grid = parse_grid(doc.at("x_grid"), "x_grid");
    if (doc.contains("t_list")) cfg.t_list = parse_grid(doc.at("t_list"), "t_list");
    if (doc.contains("r_list")) cfg.r_list = parse_grid(doc.at("r_list"), "r_list");
    cfg.alpha = number_or(doc, "", "alpha", 1.0);
    if (!(cfg.alpha > 0.0)) fail("alpha", "must be > 0");

    if (doc.contains("levels")) {
        const json& levels = doc.at("levels");
        if (!levels.is_array() || levels.empty()) fail("levels", "expected a nonempty array of cutoffs");
        for (std::size_t i = 0; i < levels.size(); ++i) {
            const std::string lp = "levels[" + std::to_string(i) + "]";
            cfg.levels.push_back(parse_cutoff(levels[i], lp));
            if (i > 0 && !(cfg.levels[i].eta_minus < cfg.levels[i - 1].eta_minus &&
                           cfg.levels[i].eta_plus < cfg.levels[i - 1].eta_plus))
                fail(lp, "cutoffs must shrink strictly on both sides");
        }
        if (cfg.has_sim && !(cfg.sim.inner_cutoff < cfg.levels.back().min()))
            fail("sim.inner_cutoff", "must be below the finest level cutoff");
    }

    if (doc.contains("thresholds")) {
        const json& th = doc.at("thresholds");
        reject_unknown(th, "thresholds", {"drift", "bounded"});
        cfg.thresholds.drift = number_or(th, "thresholds", "drift", cfg.thresholds.drift);
        cfg.thresholds.bounded = number_or(th, "thresholds", "bounded", cfg.thresholds.bounded);
    }

    if (doc.contains("verify")) {
        const json& v = doc.at("verify");
        reject_unknown(v, "verify", {"suite", "n", "t", "scaling_n", "scaling_t", "tolerance"});
        if (v.contains("suite")) {
            if (!v.at("suite").is_string()) fail("verify.suite", "expected a string");
            cfg.verify.suite = v.at("suite").get<std::string>();
        }
        if (v.contains("n")) cfg.verify.n = unsigned_integer(v.at("n"), "verify.n");
        cfg.verify.t = number_or(v, "verify", "t", cfg.verify.t);
        if (v.contains("scaling_n")) cfg.verify.scaling_n = unsigned_integer(v.at("scaling_n"), "verify.scaling_n");
        cfg.verify.scaling_t = number_or(v, "verify", "scaling_t", cfg.verify.scaling_t);
        cfg.verify.tolerance = number_or(v, "verify", "tolerance", cfg.verify.tolerance);
        if (cfg.verify.n < 1) fail("verify.n", "must be >= 1");
        if (!(cfg.verify.t > 0.0)) fail("verify.t", "must be > 0");
        if (cfg.verify.scaling_n < 1) fail("verify.scaling_n", "must be >= 1");
        if (!(cfg.verify.scaling_t > 0.0)) fail("verify.scaling_t", "must be > 0");
    }

    try {
        cfg.triplet.validate();
    } catch (const ConfigError& e) {
        fail("triplet", e.what());
    }
    return cfg;
}

RunConfig load_config(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError(file + ": cannot open config file");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(file + ": " + e.what());
    }
    return parse_config(doc);
}

}  // namespace levy::cli
