#pragma once

#include "config.hpp"

#include "../energy.hpp"
#include "../linear_stability.hpp"

#include <filesystem>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace nlad::cli {

// Exit codes of the command line tool.
enum Exit : int { kOk = 0, kUsage = 1, kNotConverged = 2, kResourceCap = 3 };

struct Output {
    std::filesystem::path dir;
    std::ostream* log = nullptr;    // null when quiet

    template <class T>
    void say(const T& msg) const
    {
        if (log) *log << msg << '\n';
    }

    std::string file(const std::string& name) const
    {
        std::filesystem::create_directories(dir);
        return (dir / name).string();
    }
};

inline CsvMeta csv_meta(const RunConfig& c, const std::string& command, std::vector<std::string> extra = {})
{
    extra.insert(extra.begin(), "command=" + command);
    return {c.digest, std::move(extra)};
}

inline json json_meta(const RunConfig& c, const std::string& command)
{
    json m;
    m["tool"] = kToolName;
    m["version"] = kToolVersion;
    m["config_digest"] = c.digest;
    m["command"] = command;
    return m;
}

inline void write_json(const std::string& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

template <class F>
std::string render(F f)
{
    std::ostringstream os;
    f(os);
    return os.str();
}

inline std::vector<std::string> ic_meta(const InitialCondition& ic)
{
    return {"ic=" + ic.kind, "amplitude=" + fmt(ic.amplitude), "seed=" + std::to_string(ic.seed)};
}

inline int cmd_simulate(const RunConfig& c, const Output& out)
{
    const auto& p = c.need_model().numeric;
    const Grid g = c.need_grid();
    const State s0 = initial_state(c, p, g);
    const RunResult r = run_to_steady(s0, p, c.solver);
    const CsvMeta meta = csv_meta(c, "simulate", ic_meta(c.ic));

    write_file(out.file("trajectory.csv"), render([&](std::ostream& os) { write_trajectory_csv(os, r.trajectory, p.n, meta); }));
    write_file(out.file("final_state.csv"), render([&](std::ostream& os) { write_state_csv(os, r.final_state, meta); }));

    json j;
    j["meta"] = json_meta(c, "simulate");
    j["meta"]["ic"] = c.ic.kind;
    j["meta"]["amplitude"] = c.ic.amplitude;
    j["meta"]["seed"] = c.ic.seed;
    j["converged"] = r.converged;
    j["t"] = r.t;
    j["steps"] = r.steps;
    if (p.symmetric()) {
        j["energy"] = to_json(energy_report(r.final_state, p));
    } else {
        j["energy"] = nullptr;
        j["masses"] = r.trajectory.back().masses;
    }
    j["max_u"] = r.final_state.max();
    j["min_u"] = r.final_state.min();
    if (p.n == 2) j["class_guess"] = class_name(guess_class(r.final_state, p));
    write_json(out.file("energy.json"), j);

    out.say(std::string(r.converged ? "steady state" : "no steady state") + " at t=" + fmt(r.t) + " after " +
            std::to_string(r.steps) + " steps, max u=" + fmt(r.final_state.max()));
    return r.converged ? kOk : kNotConverged;
}

inline int cmd_dispersion(const RunConfig& c, const Output& out)
{
    const auto& p = c.need_model().numeric;
    const Grid g = c.need_grid();
    if (c.q_max > g.size() / 2) throw ConfigError(c.source + ": dispersion q_max exceeds M/2");
    const auto table = dispersion(p, g, c.q_max);
    const auto unstable = unstable_modes(p, g, c.q_max);
    std::string modes;
    for (auto q : unstable) modes += (modes.empty() ? "" : " ") + std::to_string(q);
    const CsvMeta meta = csv_meta(c, "dispersion", {std::string("verdict=") + (unstable.empty() ? "stable" : "unstable"),
                                                   "unstable_modes=" + modes});
    write_file(out.file("dispersion.csv"), render([&](std::ostream& os) { write_dispersion_csv(os, table, p.n, meta); }));
    out.say(unstable.empty() ? std::string("homogeneous state is linearly stable")
                             : "unstable modes: " + modes);
    return kOk;
}

inline int cmd_classify(const RunConfig& c, const Output& out)
{
    const auto& p = c.need_model().numeric;
    if (p.n != 2) throw DimensionError("classify needs a two-species model");
    json j;
    j["meta"] = json_meta(c, "classify");
    j["gamma11"] = p.gamma[0][0];
    j["gamma22"] = p.gamma[1][1];
    j["gamma12"] = p.gamma[0][1];
    if (is_unit_pair(p)) {
        const auto r = classify_regime(p);
        j["case"] = case_name(r.regime_case);
        j["classes"] = json::array();
        for (auto cls : r.classes) j["classes"].push_back(class_name(cls));
        j["boundary"] = r.boundary;
        if (p.gamma[0][1] <= 0.0) {
            const double t = -p.gamma[0][1] - 2.0;
            j["energy_bound"] = {{"gamma11_threshold", t}, {"homogeneous_minimum", p.gamma[0][0] > t}};
        }
    } else {
        j["case"] = nullptr;
        j["classes"] = nullptr;
        j["note"] = "the case table needs unit D, p, L and gamma_22 = gamma_11";
    }
    j["candidates"] = json::array();
    for (const auto& m : candidate_minima(p)) {
        json e;
        e["class"] = class_name(m.cls);
        e["u1c"] = m.u1c;
        e["u2c"] = m.u2c;
        e["local_min"] = m.local_min;
        e["energy"] = m.energy;
        if (!m.note.empty()) e["note"] = m.note;
        j["candidates"].push_back(e);
    }
    j["unbounded_descent"] = unbounded_descent_check(p);
    write_json(out.file("classify.json"), j);
    out.say(j["classes"].is_null() ? std::string("no case table for these parameters") : j["classes"].dump());
    return kOk;
}

inline int cmd_sweep(const RunConfig& c, const Output& out)
{
    const auto& p = c.need_model().numeric;
    const Grid g = c.need_grid();
    if (!c.sweep) c.missing("sweep");
    const auto& sw = *c.sweep;
    SweepPlan plan(p, initial_state(c, p, g));
    plan.start = sw.start;
    plan.stop = sw.stop;
    plan.step = sw.step;
    plan.solver = c.solver;
    plan.perturbation = sw.perturbation;
    plan.seed = sw.seed;
    plan.symmetric = sw.symmetric;
    plan.stop_on_collapse = sw.stop_on_collapse;
    plan.collapse_tol = sw.collapse_tol;
    plan.restart_on_error = sw.restart_on_error;
    try {
        plan.points();
    } catch (const ValidationError& e) {
        throw ConfigError(c.source + " line " + std::to_string(sw.line) + " (/sweep): " + e.what());
    }

    const auto pts = run_sweep(plan, [&](const BranchPoint& b, const State&) {
        out.say("gamma12=" + fmt(b.gamma12) + (b.error.empty() ? " amplitude=" + fmt(b.amplitude) + " " + class_name(b.cls)
                                                                 : " solver error: " + b.error));
    });
    auto extra = ic_meta(c.ic);
    extra.push_back("perturbation=" + fmt(sw.perturbation));
    extra.push_back("sweep_seed=" + std::to_string(sw.seed));
    const CsvMeta meta = csv_meta(c, "sweep", extra);
    write_file(out.file("branch.csv"), render([&](std::ostream& os) { write_branch_csv(os, pts, meta); }));
    bool ok = true;
    for (const auto& b : pts) ok = ok && b.converged && b.error.empty();
    return ok ? kOk : kNotConverged;
}

inline std::vector<sym::LexOrder> chosen_orders(const RunConfig& c, std::size_t n)
{
    if (c.symbolic.all_orders) return sym::all_lex_orders(n);
    if (c.symbolic.orders.empty()) return {sym::LexOrder::natural(n)};
    for (const auto& o : c.symbolic.orders) {
        try {
            o.validate(n);
        } catch (const ValidationError& e) {
            throw ConfigError(c.source + " line " + std::to_string(c.symbolic.line) + " (/symbolic): " + e.what());
        }
    }
    return c.symbolic.orders;
}

inline int cmd_groebner(const RunConfig& c, const Output& out)
{
    const auto& r = c.need_exact();
    const auto chain = c.symbolic.chain.value_or(sym::default_chain(r.n));
    sym::ChainSystem sys;
    try {
        sys = sym::build_chain(r, chain);
    } catch (const ValidationError& e) {
        throw ConfigError(c.source + " line " + std::to_string(c.symbolic.line) + " (/symbolic): " + e.what());
    }
    json j;
    j["meta"] = json_meta(c, "groebner");
    j["determinants"] = json::array();
    for (const auto& d : sys.determinants) j["determinants"].push_back(sym::to_string(d));
    j["results"] = json::array();
    std::optional<bool> verdict;
    bool invariant = true;
    for (const auto& o : chosen_orders(c, r.n)) {
        const auto g = sym::buchberger(sys.determinants, o, c.symbolic.caps);
        if (verdict && *verdict != g.zero_dimensional) invariant = false;
        if (!verdict) verdict = g.zero_dimensional;
        j["results"].push_back(sym::to_json(g));
        out.say(g.order.describe() + ": " + (g.zero_dimensional ? "zero-dimensional" : "not zero-dimensional"));
    }
    j["zero_dimensional"] = *verdict;
    j["verdict_order_invariant"] = invariant;
    write_json(out.file("groebner.json"), j);
    return kOk;
}

inline int cmd_solve_n2(const RunConfig& c, const Output& out)
{
    const auto res = sym::solve_n2(c.need_exact());
    json j;
    j["meta"] = json_meta(c, "solve-n2");
    const json body = sym::to_json(res);
    for (const auto& [k, v] : body.items()) j[k] = v;
    write_json(out.file("solve_n2.json"), j);
    out.say(res.degenerate ? "degenerate system: " + res.note : std::to_string(res.solutions.size()) + " real solution(s)");
    return kOk;
}

inline int cmd_regime_map(const RunConfig& c, const Output& out)
{
    const RegimeMapSpec s = c.regime_map.value_or(RegimeMapSpec{});
    write_file(out.file("regime_map.csv"),
               render([&](std::ostream& os) { write_regime_map_csv(os, s, csv_meta(c, "regime-map")); }));
    out.say("wrote " + std::to_string(s.n11 * s.n12) + " points");
    return kOk;
}

} // namespace nlad::cli
