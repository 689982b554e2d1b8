#include "levysandwich/cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Big-jump skeleton decomposition, sandwich walks and drift criteria for Levy processes"};
    app.require_subcommand(1);

    levy::cli::Invocation inv;
    std::string out;
    std::uint64_t seed = 0;

    auto add = [&](const char* name, const char* help) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("config", inv.config_path, "JSON config file")->required();
        sub->add_option("--out", out, "output file (directory for simulate)");
        sub->add_option("--seed", seed, "override sim.seed");
        return sub;
    };
    add("curve", "tabulate N, M, T, D, A, U and the criterion over x_grid (CSV)");
    add("classify", "drift-to-infinity verdict with optional Monte Carlo evidence (JSON)");
    add("simulate", "simulate skeleton paths, sandwich walks and envelopes");
    CLI::App* verify = add("verify", "run a verification suite (JSON report)");
    verify->add_option("--suite", inv.suite, "sandwich | wienerhopf | thm11 | prop12 | identity25");
    add("exit-prob", "P(X at the exit of (-r, r) > 0) over r_list (CSV)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : levy::cli::kConfigError;
    }
    inv.command = app.get_subcommands().front()->get_name();
    const CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--out")) inv.out = out;
    if (sub->count("--seed")) inv.seed = seed;
    return levy::cli::run(inv, std::cout, std::cerr);
}
