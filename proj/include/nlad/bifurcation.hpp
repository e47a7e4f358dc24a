#pragma once

#include "minimizer_atlas.hpp"
#include "solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <ostream>
#include <vector>

namespace nlad {

struct SweepPlan {
    SweepPlan(ModelParams b, State init) : base(std::move(b)), initial(std::move(init)) {}

    ModelParams base;
    State initial;
    double start = 0.0;
    double stop = 0.0;
    double step = 0.05;           // signed; must point from start to stop
    SolverConfig solver;
    double perturbation = 1e-2;
    std::uint64_t seed = 1;
    bool symmetric = true;        // move gamma_21 together with gamma_12
    bool stop_on_collapse = true;
    double collapse_tol = 1e-3;
    bool restart_on_error = false;   // after a solver error, continue from the homogeneous state

    std::size_t points() const
    {
        if (!(step != 0.0) || !std::isfinite(step)) throw ValidationError("sweep step must be non-zero");
        if ((stop - start) * step < 0.0) throw ValidationError("sweep step points away from the stop value");
        return static_cast<std::size_t>(std::floor(std::abs(stop - start) / std::abs(step) + 1e-9)) + 1;
    }
    double value(std::size_t k) const { return start + static_cast<double>(k) * step; }
};

struct PlateauSignature {
    std::vector<std::size_t> regions;    // connected raised runs; 0 for a flat species
    std::vector<double> widest;          // widest above-mean run holding a raised cell, in length units
    bool overlap = false;                // some cell is raised for both species
};

// A species is flat when it stays within this fraction of its mean.
inline constexpr double kFlatTol = 1e-2;

namespace detail {
// Periodic runs of `mask`; calls f(first, length) for each run.
template <class F>
void for_each_run(const std::vector<bool>& mask, F f)
{
    const std::size_t m = mask.size();
    std::size_t origin = m;
    for (std::size_t k = 0; k < m; ++k)
        if (!mask[k]) {
            origin = k;
            break;
        }
    if (origin == m) {
        f(0, m);
        return;
    }
    std::size_t run = 0, first = 0;
    for (std::size_t j = 1; j <= m; ++j) {
        const std::size_t k = (origin + j) % m;
        if (mask[k]) {
            if (run == 0) first = k;
            ++run;
        } else if (run > 0) {
            f(first, run);
            run = 0;
        }
    }
}
} // namespace detail

inline PlateauSignature plateau_signature(const State& s, const ModelParams& p)
{
    const Grid& g = s.grid();
    const std::size_t m = g.size();
    PlateauSignature sig;
    std::vector<std::vector<bool>> raised(s.species(), std::vector<bool>(m));
    for (std::size_t i = 0; i < s.species(); ++i) {
        std::vector<bool> above(m);
        const double mean = p.mean(i), peak = s.max(i);
        const double low = *std::min_element(s[i].begin(), s[i].end());
        const bool flat = peak - mean <= kFlatTol * mean && mean - low <= kFlatTol * mean;
        // Raised means above half of the species' own peak excess.
        const double cut = mean + 0.5 * (peak - mean);
        for (std::size_t k = 0; k < m; ++k) {
            raised[i][k] = !flat && s[i][k] > cut;
            above[k] = s[i][k] > mean;
        }
        std::size_t count = 0, best = 0;
        detail::for_each_run(raised[i], [&](std::size_t, std::size_t) { ++count; });
        detail::for_each_run(above, [&](std::size_t first, std::size_t len) {
            for (std::size_t j = 0; j < len; ++j)
                if (raised[i][(first + j) % m]) {
                    best = std::max(best, len);
                    break;
                }
        });
        sig.regions.push_back(count);
        sig.widest.push_back(static_cast<double>(best) * g.spacing());
    }
    if (s.species() >= 2)
        for (std::size_t k = 0; k < m; ++k)
            if (raised[0][k] && raised[1][k]) sig.overlap = true;
    return sig;
}

// Wide raised runs are territories, narrow ones are spikes.
inline SteadyClass guess_class(const State& s, const ModelParams& p)
{
    if (s.species() != 2) throw DimensionError("class signatures are defined for two species");
    const auto sig = plateau_signature(s, p);
    const double wide = 0.25 * p.length;
    const std::size_t r1 = sig.regions[0], r2 = sig.regions[1];
    if (r1 == 0 && r2 == 0) return SteadyClass::H;
    if (sig.overlap) return SteadyClass::AInf;
    if (r1 == 0 || r2 == 0) return SteadyClass::S1Inf;
    const bool w1 = sig.widest[0] >= wide, w2 = sig.widest[1] >= wide;
    if (w1 && w2) return SteadyClass::S22;
    if (!w1 && !w2) return SteadyClass::SInfInf;
    return SteadyClass::S1Inf;
}

struct BranchPoint {
    double gamma12 = 0.0;
    double amplitude = 0.0;        // max over species and cells
    double energy = 0.0;
    double dissipation = 0.0;
    bool converged = false;
    bool collapsed = false;
    SteadyClass cls = SteadyClass::H;
    double t = 0.0;
    std::size_t steps = 0;
    std::string error;             // solver failure at this point, empty otherwise
};

inline bool is_collapsed(const State& s, const ModelParams& p, double tol)
{
    for (std::size_t i = 0; i < s.species(); ++i)
        for (double v : s[i])
            if (std::abs(v - p.mean(i)) >= tol) return false;
    return true;
}

inline ModelParams with_gamma12(ModelParams p, double g12, bool symmetric)
{
    p.gamma[0][1] = g12;
    if (symmetric) p.gamma[1][0] = g12;
    return p;
}

// Natural-parameter continuation: each point starts from a perturbed copy of the previous steady state.
inline std::vector<BranchPoint> run_sweep(const SweepPlan& plan,
                                          const std::function<void(const BranchPoint&, const State&)>& on_point = {})
{
    plan.base.validate();
    if (plan.base.n != 2) throw DimensionError("sweeps vary gamma_12 of a two-species model");
    if (plan.initial.species() != 2) throw DimensionError("sweep initial state needs two species");
    if (!(plan.perturbation >= 0.0 && plan.perturbation <= 0.1))
        throw ValidationError("sweep perturbation must lie in [0, 0.1]");
    plan.solver.validate();
    const std::size_t n = plan.points();
    std::vector<BranchPoint> out;
    State current = plan.initial;
    for (std::size_t k = 0; k < n; ++k) {
        const double g12 = plan.value(k);
        const ModelParams p = with_gamma12(plan.base, g12, plan.symmetric);
        const State start = perturbed_state(current, plan.perturbation, plan.seed + k);
        BranchPoint b;
        b.gamma12 = g12;
        try {
            const RunResult r = run_to_steady(start, p, plan.solver);
            current = r.final_state;
            b.energy = r.trajectory.back().energy;
            b.dissipation = r.trajectory.back().dissipation;
            b.converged = r.converged;
            b.t = r.t;
            b.steps = r.steps;
        } catch (const SolverError& e) {
            b.error = e.what();
            b.amplitude = std::numeric_limits<double>::quiet_NaN();
            b.energy = b.dissipation = b.amplitude;
            out.push_back(b);
            if (on_point) on_point(b, start);
            if (!plan.restart_on_error) break;
            current = homogeneous_state(p, start.grid());
            continue;
        }
        b.amplitude = current.max();
        b.collapsed = is_collapsed(current, p, plan.collapse_tol);
        b.cls = guess_class(current, p);
        out.push_back(b);
        if (on_point) on_point(b, current);
        if (b.collapsed && plan.stop_on_collapse) break;
    }
    return out;
}

enum class AnalyticBranch { Homogeneous, Segregated22 };

// Largest |amplitude - analytic height| over points where the analytic branch is a local minimum.
inline double branch_compare(const std::vector<BranchPoint>& pts, AnalyticBranch which, const ModelParams& base,
                             bool symmetric = true)
{
    double worst = -1.0;
    for (const auto& b : pts) {
        if (!b.error.empty()) continue;
        const auto cands = candidate_minima(with_gamma12(base, b.gamma12, symmetric));
        const auto cls = which == AnalyticBranch::Homogeneous ? SteadyClass::H : SteadyClass::S22;
        for (const auto& c : cands) {
            if (c.cls != cls || !c.local_min) continue;
            worst = std::max(worst, std::abs(b.amplitude - std::max(c.u1c, c.u2c)));
        }
    }
    if (worst < 0.0) throw ValidationError("no branch point lies where the analytic branch exists");
    return worst;
}

inline void write_branch_csv(std::ostream& os, const std::vector<BranchPoint>& pts, const CsvMeta& meta = {})
{
    write_csv_meta(os, meta);
    os << "gamma12,amplitude,energy,converged,class_guess,dissipation,collapsed,t,steps,error\n";
    for (const auto& b : pts)
        os << fmt(b.gamma12) << ',' << fmt(b.amplitude) << ',' << fmt(b.energy) << ',' << (b.converged ? 1 : 0) << ','
           << (b.error.empty() ? class_name(b.cls) : "") << ',' << fmt(b.dissipation) << ',' << (b.collapsed ? 1 : 0)
           << ',' << fmt(b.t) << ',' << b.steps << ',' << (b.error.empty() ? "" : "solver-error") << '\n';
}

} // namespace nlad
