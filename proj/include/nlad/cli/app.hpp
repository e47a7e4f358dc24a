#pragma once

#include "commands.hpp"

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace nlad::cli {

inline int run(int argc, const char* const* argv, std::ostream& log = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"Nonlocal advection-diffusion simulator and analysis toolkit", kToolName};
    app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
    app.add_option("--config", config_path, "JSON config file")->required();
    app.add_option("--out", out_dir, "output directory (overrides output.directory)");
    app.add_option("--seed", seed, "seed for the initial perturbation and the sweep");
    app.add_flag("--quiet", quiet, "print nothing on success");

    using Command = std::function<int(const RunConfig&, const Output&)>;
    const std::map<std::string, std::pair<Command, const char*>> commands = {
        {"simulate", {cmd_simulate, "run to steady state; writes trajectory.csv, final_state.csv, energy.json"}},
        {"dispersion", {cmd_dispersion, "linear growth rates of the homogeneous state; writes dispersion.csv"}},
        {"classify", {cmd_classify, "steady-state classes of a two-species model; writes classify.json"}},
        {"sweep", {cmd_sweep, "continuation in gamma_12; writes branch.csv"}},
        {"groebner", {cmd_groebner, "finiteness of the determinant chain; writes groebner.json"}},
        {"solve-n2", {cmd_solve_n2, "exact two-species steady values; writes solve_n2.json"}},
        {"regime-map", {cmd_regime_map, "case table over a gamma grid; writes regime_map.csv"}},
    };
    for (const auto& [name, c] : commands) app.add_subcommand(name, c.second);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, log, err);
        return code == 0 ? kOk : kUsage;
    }

    const CLI::App* sub = app.get_subcommands().front();
    try {
        const RunConfig cfg = read_config(Document::load(config_path), {seed, out_dir});
        Output out{cfg.output_dir, quiet ? nullptr : &log};
        return commands.at(sub->get_name()).first(cfg, out);
    } catch (const ResourceCapError& e) {
        err << "resource cap: " << e.what() << '\n';
        return kResourceCap;
    } catch (const SolverError& e) {
        err << "solver error: " << e.what() << '\n';
        return kNotConverged;
    } catch (const ConfigError& e) {
        err << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        err << config_path << ": " << e.what() << '\n';
        return kUsage;
    } catch (const std::filesystem::filesystem_error& e) {
        err << e.what() << '\n';
        return kUsage;
    }
}

} // namespace nlad::cli
