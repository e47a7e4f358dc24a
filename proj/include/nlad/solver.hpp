#pragma once

#include "energy.hpp"
#include "model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace nlad {

enum class Scheme { UpwindFV, CentralFV };

inline const char* scheme_name(Scheme s) { return s == Scheme::UpwindFV ? "upwind-fv" : "central-fv"; }

inline Scheme scheme_from_name(const std::string& s)
{
    if (s == "upwind-fv") return Scheme::UpwindFV;
    if (s == "central-fv") return Scheme::CentralFV;
    throw ValidationError("unknown scheme '" + s + "'");
}

struct SolverConfig {
    double dt = 1e-3;              // initial and largest step
    double cfl = 0.5;
    double t_max = 10.0;
    double steady_tol = 1e-6;
    Scheme scheme = Scheme::UpwindFV;
    std::size_t record_every = 200;
    std::size_t steady_checks = 3;

    void validate() const
    {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive");
        if (!(cfl > 0.0 && cfl <= 1.0)) throw ValidationError("cfl must lie in (0, 1]");
        if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ValidationError("t_max must be positive");
        if (!(steady_tol > 0.0)) throw ValidationError("steady_tol must be positive");
        if (record_every == 0) throw ValidationError("record_every must be >= 1");
        if (steady_checks == 0) throw ValidationError("steady_checks must be >= 1");
    }
};

// Integrating-factor Euler step: explicit conservative advection, then exact diffusion in Fourier space.
// Physical and spectral copies of the state are kept in sync so a step costs 3N transforms.
class Stepper {
public:
    Stepper(const ModelParams& p, const State& s, Scheme scheme = Scheme::UpwindFV)
        : p_(p), grid_(s.grid()), scheme_(scheme), fft_(fft_for(s.grid().size()))
    {
        check_grid(p, s.grid());
        if (s.species() != p.n) throw DimensionError("state has wrong number of species");
        const std::size_t m = grid_.size(), nq = m / 2 + 1;
        u_.resize(p.n);
        uhat_.assign(p.n, std::vector<cplx>(nq));
        v_.assign(p.n, std::vector<double>(m));
        flux_.resize(m);
        work_.resize(nq);
        ksym_ = kernel_symbols(p.kernel, grid_);
        kappa_.resize(nq);
        for (std::size_t q = 0; q < nq; ++q) kappa_[q] = grid_.wavenumber(q);
        for (std::size_t i = 0; i < p.n; ++i) {
            u_[i] = s[i];
            fft_.forward(u_[i].data(), uhat_[i].data());
            target_mass_.push_back(s.mass(i));
        }
        velocity_stale_ = true;
    }

    double time() const { return t_; }
    std::size_t steps() const { return steps_; }
    const std::vector<cplx>& spectrum(std::size_t i) const { return uhat_[i]; }

    State state() const
    {
        State s(grid_, p_.n);
        for (std::size_t i = 0; i < p_.n; ++i) s[i] = u_[i];
        return s;
    }

    // v_i = -sum_j gamma_ij d/dx (K * u_j), at cell centres.
    const std::vector<std::vector<double>>& velocity()
    {
        if (!velocity_stale_) return v_;
        const std::size_t nq = work_.size();
        for (std::size_t i = 0; i < p_.n; ++i) {
            for (std::size_t q = 0; q < nq; ++q) {
                cplx acc = 0.0;
                for (std::size_t j = 0; j < p_.n; ++j) acc += p_.gamma[i][j] * uhat_[j][q];
                work_[q] = cplx(0.0, -kappa_[q] * ksym_[q]) * acc;
            }
            work_[nq - 1] = 0.0;
            fft_.inverse(work_.data(), v_[i].data());
        }
        velocity_stale_ = false;
        return v_;
    }

    double max_speed()
    {
        double vmax = 0.0;
        for (const auto& vi : velocity())
            for (double x : vi) vmax = std::max(vmax, std::abs(x));
        return vmax;
    }

    double stable_dt(double cfl, double dt_cap)
    {
        return std::min(dt_cap, cfl * grid_.spacing() / (max_speed() + 1e-12));
    }

    void step(double dt)
    {
        if (!(dt > 0.0)) throw ValidationError("time step must be positive");
        advect(dt);
        diffuse(dt);
        t_ += dt;
        ++steps_;
    }

    // Smallest diffusion step whose integrating factor damps the Nyquist mode by e^-30. Shorter
    // exact-diffusion steps of a sharp profile ring below zero by more than the clipping tolerance.
    double diffusion_floor() const
    {
        const double dmin = *std::min_element(p_.diffusion.begin(), p_.diffusion.end());
        const double kn = kappa_.back();
        return 30.0 / (dmin * kn * kn);
    }

    // One step of length dt with the advection sub-cycled at the CFL limit and a single diffusion update.
    // Equals step(dt) when dt is already advectively stable.
    void advance(double dt, double cfl)
    {
        if (!(dt > 0.0)) throw ValidationError("time step must be positive");
        double done = 0.0;
        while (done < dt) {
            const double rest = dt - done;
            double sub = stable_dt(cfl, rest);
            if (sub >= rest * (1.0 - 1e-12)) sub = rest;
            advect(sub);
            done = sub == rest ? dt : done + sub;
        }
        diffuse(dt);
        t_ += dt;
        ++steps_;
    }

private:
    void advect(double dt)
    {
        const std::size_t m = grid_.size();
        const double h = grid_.spacing();
        const auto& v = velocity();
        for (std::size_t i = 0; i < p_.n; ++i) {
            auto& u = u_[i];
            const auto& vi = v[i];
            double outflow_max = 0.0;
            for (std::size_t k = 0; k < m; ++k) {
                const std::size_t kp = k + 1 == m ? 0 : k + 1;
                const double vf = 0.5 * (vi[k] + vi[kp]);
                if (scheme_ == Scheme::UpwindFV)
                    flux_[k] = vf > 0.0 ? vf * u[k] : vf * u[kp];
                else
                    flux_[k] = 0.5 * vf * (u[k] + u[kp]);
                outflow_max = std::max(outflow_max, std::abs(vf));
            }
            if (scheme_ == Scheme::UpwindFV && 2.0 * dt * outflow_max > h * (1.0 + 1e-12))
                throw SolverError("CFL violation: dt * max|v| / h exceeds 1/2");
            const double r = dt / h;
            double prev = flux_[m - 1];
            for (std::size_t k = 0; k < m; ++k) {
                const double f = flux_[k];
                u[k] -= r * (f - prev);
                prev = f;
            }
            fft_.forward(u.data(), uhat_[i].data());
        }
        velocity_stale_ = true;
    }

    void diffuse(double dt)
    {
        const std::size_t nq = work_.size();
        for (std::size_t i = 0; i < p_.n; ++i) {
            const auto& fac = diffusion_factor(i, dt);
            for (std::size_t q = 1; q < nq; ++q) uhat_[i][q] *= fac[q];
            fft_.inverse(uhat_[i].data(), u_[i].data());
            enforce_positivity(i);
        }
        velocity_stale_ = true;
    }

    const std::vector<double>& diffusion_factor(std::size_t i, double dt)
    {
        if (fac_dt_.size() != p_.n) {
            fac_dt_.assign(p_.n, -1.0);
            fac_.assign(p_.n, std::vector<double>(kappa_.size()));
        }
        if (fac_dt_[i] != dt) {
            for (std::size_t q = 0; q < kappa_.size(); ++q)
                fac_[i][q] = std::exp(-p_.diffusion[i] * kappa_[q] * kappa_[q] * dt);
            fac_dt_[i] = dt;
        }
        return fac_[i];
    }

    void enforce_positivity(std::size_t i)
    {
        auto& u = u_[i];
        double neg = 0.0;
        for (double x : u) {
            if (!std::isfinite(x)) throw SolverError("non-finite density encountered");
            if (x < 0.0) neg -= x;
        }
        if (neg == 0.0) return;
        neg *= grid_.spacing();
        if (neg >= 1e-10 * p_.mass[i])
            throw SolverError("positivity failure: negative mass " + fmt(neg) + " in species " + std::to_string(i + 1));
        for (double& x : u) x = std::max(x, 0.0);
        double mass = 0.0;
        for (double x : u) mass += x;
        mass *= grid_.spacing();
        for (double& x : u) x *= target_mass_[i] / mass;
        fft_.forward(u.data(), uhat_[i].data());
    }

    ModelParams p_;
    Grid grid_;
    Scheme scheme_;
    const RealFft& fft_;
    std::vector<std::vector<double>> u_, v_;
    std::vector<std::vector<cplx>> uhat_;
    std::vector<double> flux_, ksym_, kappa_, target_mass_, fac_dt_;
    std::vector<std::vector<double>> fac_;
    std::vector<cplx> work_;
    bool velocity_stale_ = true;
    double t_ = 0.0;
    std::size_t steps_ = 0;
};

inline std::vector<std::vector<double>> advect_velocity(const State& s, const ModelParams& p)
{
    Stepper st(p, s);
    return st.velocity();
}

// One adaptive step; returns the new state.
inline State step(const State& s, const ModelParams& p, double dt, Scheme scheme = Scheme::UpwindFV)
{
    Stepper st(p, s, scheme);
    st.step(dt);
    return st.state();
}

struct TrajectoryRecord {
    double t = 0.0;
    std::size_t step = 0;
    double energy = std::numeric_limits<double>::quiet_NaN();
    double dissipation = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> masses;
    double min_u = 0.0;
    double max_u = 0.0;
    double steady_metric = std::numeric_limits<double>::quiet_NaN();
};

using Trajectory = std::vector<TrajectoryRecord>;

struct RunResult {
    State final_state;
    Trajectory trajectory;
    bool converged = false;
    double t = 0.0;
    std::size_t steps = 0;
};

inline TrajectoryRecord make_record(const State& s, const ModelParams& p, double t, std::size_t step)
{
    TrajectoryRecord r;
    r.t = t;
    r.step = step;
    double scale = 0.0;
    for (const auto& row : p.gamma)
        for (double g : row) scale = std::max(scale, std::abs(g));
    if (p.symmetric(1e-12 * scale)) {
        r.energy = energy(s, p);
        r.dissipation = dissipation(s, p);
    }
    for (std::size_t i = 0; i < s.species(); ++i) r.masses.push_back(s.mass(i));
    r.min_u = s.min();
    r.max_u = s.max();
    return r;
}

// max_i ||a_i - b_i||_inf / (dt max a_i)
inline double steady_metric(const State& a, const State& b, double dt)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < a.species(); ++i) {
        double diff = 0.0;
        for (std::size_t k = 0; k < a.grid().size(); ++k) diff = std::max(diff, std::abs(a[i][k] - b[i][k]));
        const double peak = std::max(a.max(i), kDensityFloor);
        worst = std::max(worst, diff / (dt * peak));
    }
    return worst;
}

inline RunResult run_to_steady(const State& initial, const ModelParams& p, const SolverConfig& cfg)
{
    cfg.validate();
    Stepper st(p, initial, cfg.scheme);
    RunResult res{initial, {}, false, 0.0, 0};
    res.trajectory.push_back(make_record(initial, p, 0.0, 0));
    State prev = initial;
    double t_prev = 0.0;
    std::size_t calm = 0;
    // The last step is not shortened to land on t_max: the fixed point of the split step
    // depends on dt, so a sudden short step can raise the energy of a settled state.
    while (st.time() < cfg.t_max) {
        const double stable = st.stable_dt(cfg.cfl, cfg.dt);
        const double dt = std::min(cfg.dt, std::max(stable, st.diffusion_floor()));
        const bool last = st.time() + dt >= cfg.t_max;
        if (dt <= stable)
            st.step(dt);
        else
            st.advance(dt, cfg.cfl);
        if (st.steps() % cfg.record_every == 0 || last) {
            State now = st.state();
            auto rec = make_record(now, p, st.time(), st.steps());
            rec.steady_metric = steady_metric(now, prev, st.time() - t_prev);
            res.trajectory.push_back(rec);
            calm = rec.steady_metric < cfg.steady_tol ? calm + 1 : 0;
            prev = std::move(now);
            t_prev = st.time();
            if (calm >= cfg.steady_checks) {
                res.converged = true;
                break;
            }
        }
    }
    res.final_state = st.state();
    res.t = st.time();
    res.steps = st.steps();
    return res;
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr, std::size_t n, const CsvMeta& meta = {})
{
    write_csv_meta(os, meta);
    os << "t,step,energy,dissipation";
    for (std::size_t i = 0; i < n; ++i) os << ",mass_" << (i + 1);
    os << ",min_u,max_u,steady_metric\n";
    for (const auto& r : tr) {
        os << fmt(r.t) << ',' << r.step << ',' << fmt(r.energy) << ',' << fmt(r.dissipation);
        for (double m : r.masses) os << ',' << fmt(m);
        os << ',' << fmt(r.min_u) << ',' << fmt(r.max_u) << ',' << fmt(r.steady_metric) << '\n';
    }
}

} // namespace nlad
