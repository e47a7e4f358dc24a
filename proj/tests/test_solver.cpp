#include "support.hpp"

#include <nlad/energy.hpp>
#include <nlad/solver.hpp>

#include <gtest/gtest.h>

#include <sstream>

using namespace nlad;

namespace {

ModelParams heat(double d)
{
    ModelParams p;
    p.n = 1;
    p.diffusion = {d};
    p.mass = {1.0};
    p.gamma = {{0.0}};
    p.kernel = KernelSpec::top_hat(0.05);
    return p;
}

// Naive DFT derivative, independent of the transform library.
std::vector<double> dft_derivative(const std::vector<double>& f, const Grid& g)
{
    const std::size_t m = f.size();
    std::vector<double> out(m, 0.0);
    for (std::size_t q = 1; q < m / 2; ++q) {
        double re = 0.0, im = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double ph = g.wavenumber(q) * g.x(k);
            re += f[k] * std::cos(ph);
            im -= f[k] * std::sin(ph);
        }
        for (std::size_t k = 0; k < m; ++k) {
            const double ph = g.wavenumber(q) * g.x(k);
            // d/dx of (re + i im) e^{i kappa x} + c.c., normalised
            out[k] += 2.0 / m * g.wavenumber(q) * (-re * std::sin(ph) - im * std::cos(ph));
        }
    }
    return out;
}

} // namespace

TEST(Velocity, HomogeneousIsZero)
{
    const auto p = ModelParams::unit_pair(1.3, 0.4, KernelSpec::top_hat(0.05));
    for (const auto& v : advect_velocity(homogeneous_state(p, Grid(64, 1.0)), p))
        for (double x : v) EXPECT_NEAR(x, 0.0, 1e-14);
}

TEST(Velocity, PointsAwayFromBumpForRepulsion)
{
    ModelParams p = heat(1.0);
    p.gamma = {{2.0}};
    const Grid g(128, 1.0);
    State s(g, 1);
    for (std::size_t k = 0; k < 128; ++k) s[0][k] = 1.0 + 0.5 * std::exp(-std::pow((g.x(k) - 0.5) / 0.05, 2));
    const double m = s.mass(0);
    for (double& x : s[0]) x /= m;
    p.mass = {1.0};
    const auto v = advect_velocity(s, p)[0];
    EXPECT_LT(v[54], 0.0);   // left of the peak
    EXPECT_GT(v[73], 0.0);   // right of the peak
}

TEST(Velocity, DeltaKernelIsLocalDerivative)
{
    auto p = ModelParams::unit_pair(0.7, -0.4);
    const Grid g(64, 1.0);
    const auto s = perturbed_state(homogeneous_state(p, g), 0.1, 12);
    const auto v = advect_velocity(s, p);
    const auto d0 = dft_derivative(s[0], g), d1 = dft_derivative(s[1], g);
    for (std::size_t k = 0; k < 64; ++k) {
        EXPECT_NEAR(v[0][k], -(p.gamma[0][0] * d0[k] + p.gamma[0][1] * d1[k]), 1e-8);
        EXPECT_NEAR(v[1][k], -(p.gamma[1][0] * d0[k] + p.gamma[1][1] * d1[k]), 1e-8);
    }
}

TEST(Step, HomogeneousUnchanged)
{
    const auto p = ModelParams::unit_pair(1.05, 0.0, KernelSpec::top_hat(0.025));
    const auto s = homogeneous_state(p, Grid(128, 1.0));
    const auto t = step(s, p, 1e-3);
    for (std::size_t i = 0; i < 2; ++i)
        for (double x : t[i]) EXPECT_NEAR(x, 1.0, 1e-14);
}

TEST(Step, HeatEquationModeDecay)
{
    const auto p = heat(0.7);
    const Grid g(64, 1.0);
    const auto s = mode_state(p, g, 3, 0.5, {1.0});
    const double dt = 0.01;
    const auto t = step(s, p, dt);
    const double decay = std::exp(-0.7 * g.wavenumber(3) * g.wavenumber(3) * dt);
    for (std::size_t k = 0; k < 64; ++k) EXPECT_NEAR(t[0][k] - 1.0, (s[0][k] - 1.0) * decay, 1e-10);
}

TEST(Step, ConservesMassAndRejectsCflViolation)
{
    const auto p = ModelParams::unit_pair(-1.05, 0.0, KernelSpec::top_hat(0.05));
    const auto s = perturbed_state(homogeneous_state(p, Grid(256, 1.0)), 0.1, 1);
    const auto t = step(s, p, 1e-4);
    for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(t.mass(i), s.mass(i), 1e-12);
    Stepper st(p, perturbed_state(homogeneous_state(p, Grid(256, 1.0)), 0.1, 2));
    EXPECT_THROW(st.step(10.0 * st.stable_dt(0.5, 1.0)), SolverError);
    EXPECT_NO_THROW(st.step(st.stable_dt(0.5, 1.0)));
}

TEST(Step, PositivityFailureIsReported)
{
    const auto p = heat(1.0);
    const Grid g(64, 1.0);
    State s(g, 1);
    s[0][10] = 64.0;
    EXPECT_THROW(step(s, p, 1e-7), SolverError);
}

TEST(Step, AdvanceMatchesStepWhenStable)
{
    const auto p = ModelParams::unit_pair(-1.05, 0.0, KernelSpec::top_hat(0.05));
    const auto s = perturbed_state(homogeneous_state(p, Grid(128, 1.0)), 0.1, 3);
    Stepper a(p, s), b(p, s);
    const double dt = a.stable_dt(0.5, 1.0);
    a.step(dt);
    b.advance(dt, 0.5);
    EXPECT_EQ(a.state()[0], b.state()[0]);
    EXPECT_EQ(a.state()[1], b.state()[1]);
}

TEST(Step, SubcycledAdvectionKeepsSharpSpikePositive)
{
    // A co-located spike pair drives the CFL step well below the diffusion floor.
    const auto p = ModelParams::unit_pair(-1.05, 0.2, KernelSpec::top_hat(0.025));
    const Grid g(512, 1.0);
    const auto s = perturbed_state(template_state(p, g, SteadyClass::AInf, 0.1), 0.01, 7);
    Stepper st(p, s);
    const double floor = st.diffusion_floor();
    ASSERT_LT(st.stable_dt(0.5, 1.0), floor);
    for (int k = 0; k < 50; ++k) EXPECT_NO_THROW(st.advance(floor, 0.5));
    const auto t = st.state();
    EXPECT_GE(t.min(), 0.0);
    for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(t.mass(i), s.mass(i), 1e-12);
    EXPECT_NEAR(st.time(), 50.0 * floor, 1e-15);
}

TEST(Run, StationaryStartStays)
{
    const auto p = ModelParams::unit_pair(0.2, 0.2, KernelSpec::top_hat(0.025));
    SolverConfig cfg;
    cfg.t_max = 2.0;
    cfg.record_every = 100;
    const auto r = run_to_steady(homogeneous_state(p, Grid(256, 1.0)), p, cfg);
    EXPECT_TRUE(r.converged);
    for (const auto& rec : r.trajectory) EXPECT_NEAR(rec.energy, 0.4, 1e-12);
    EXPECT_NEAR(r.final_state.max(), 1.0, 1e-12);
}

TEST(Run, AttractionFormsCoLocatedPeak)
{
    const auto p = ModelParams::unit_pair(-1.05, 0.0, KernelSpec::top_hat(0.05));
    SolverConfig cfg;
    cfg.t_max = 8.0;
    const auto r = run_to_steady(perturbed_state(homogeneous_state(p, Grid(256, 1.0)), 0.05, 1), p, cfg);
    const auto& u = r.final_state;
    EXPECT_GT(u.max(), 2.0);
    const auto peak0 = std::max_element(u[0].begin(), u[0].end()) - u[0].begin();
    const auto peak1 = std::max_element(u[1].begin(), u[1].end()) - u[1].begin();
    EXPECT_LE(std::abs(peak0 - peak1), 2);
}

TEST(Run, MassPositivityAndEnergyOnRandomConfigs)
{
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 8; ++trial) {
        const auto p = nlad::testing::random_symmetric_pair(rng);
        SolverConfig cfg;
        cfg.t_max = 0.5;
        cfg.record_every = 25;
        const auto r = run_to_steady(perturbed_state(homogeneous_state(p, Grid(128, 1.0)), 0.05, trial), p, cfg);
        const double bound = lower_bound(p);
        for (std::size_t k = 0; k < r.trajectory.size(); ++k) {
            const auto& rec = r.trajectory[k];
            for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(rec.masses[i], p.mass[i], 1e-8 * p.mass[i]);
            EXPECT_GE(rec.min_u, 0.0);
            EXPECT_GE(rec.energy, bound);
            EXPECT_LE(rec.dissipation, 1e-10);
            if (k > 0) {
                EXPECT_GT(rec.t, r.trajectory[k - 1].t);
                EXPECT_LE(rec.energy, r.trajectory[k - 1].energy + 1e-8 * std::abs(r.trajectory[k - 1].energy));
            }
        }
    }
}

TEST(Run, EnergySlopeMatchesDissipation)
{
    const auto p = ModelParams::unit_pair(1.3, 0.0, KernelSpec::top_hat(0.05));
    const Grid g(256, 1.0);
    Stepper st(p, mode_state(p, g, 1, 0.05, {1.0, -1.0}));
    for (int k = 0; k < 200; ++k) st.step(1e-4);
    const auto a = st.state();
    const double d = dissipation(a, p);
    ASSERT_GT(std::abs(d), 1e-6);
    const double dt = 1e-6;
    st.step(dt);
    const double slope = (energy(st.state(), p) - energy(a, p)) / dt;
    EXPECT_NEAR(slope, d, 0.1 * std::abs(d));
}

TEST(Run, EarlyGrowthMatchesDispersion)
{
    const auto p = ModelParams::unit_pair(1.05, 0.0, KernelSpec::top_hat(0.05));
    const auto f = nlad::testing::fit_mode_growth(p, 128, 1, 0.5, 1e-5);
    EXPECT_GT(f.predicted, 0.0);
    EXPECT_NEAR(f.measured, f.predicted, 0.05 * std::abs(f.predicted));
}

TEST(Run, Deterministic)
{
    const auto p = ModelParams::unit_pair(1.2, 0.0, KernelSpec::top_hat(0.05));
    SolverConfig cfg;
    cfg.t_max = 0.3;
    cfg.record_every = 10;
    const auto init = perturbed_state(homogeneous_state(p, Grid(128, 1.0)), 0.02, 4);
    const auto a = run_to_steady(init, p, cfg), b = run_to_steady(init, p, cfg);
    std::ostringstream sa, sb;
    write_trajectory_csv(sa, a.trajectory, 2);
    write_trajectory_csv(sb, b.trajectory, 2);
    EXPECT_EQ(sa.str(), sb.str());
    EXPECT_EQ(a.final_state[0], b.final_state[0]);
}

TEST(Config, Validation)
{
    SolverConfig c;
    c.cfl = 1.5;
    EXPECT_THROW(c.validate(), ValidationError);
    c = {};
    c.steady_tol = 0.0;
    EXPECT_THROW(c.validate(), ValidationError);
    EXPECT_EQ(scheme_from_name("central-fv"), Scheme::CentralFV);
    EXPECT_THROW(scheme_from_name("rk4"), ValidationError);
}
