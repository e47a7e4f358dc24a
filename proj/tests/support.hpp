#pragma once

#include <nlad/linear_stability.hpp>
#include <nlad/solver.hpp>

#include <Eigen/Dense>

#include <random>
#include <vector>

namespace nlad::testing {

struct GrowthFit {
    double measured = 0.0;
    double predicted = 0.0;
};

// Seeds the dominant eigenvector of mode q, integrates for time T with a fixed step and fits
// log|projection| against t by least squares over the second half of the run.
inline GrowthFit fit_mode_growth(const ModelParams& p, std::size_t m, std::size_t q, double T, double dt,
                                 double amplitude = 1e-4)
{
    const Grid g(m, p.length);
    const double kappa = g.wavenumber(q);
    const auto mat = stability_matrix(p, kappa);
    Eigen::EigenSolver<Eigen::MatrixXd> es(mat);
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i).real() > es.eigenvalues()(best).real()) best = i;
    std::vector<double> w(p.n);
    double wmax = 0.0;
    for (std::size_t i = 0; i < p.n; ++i) wmax = std::max(wmax, std::abs(w[i] = es.eigenvectors()(i, best).real()));
    for (double& x : w) x /= wmax;

    Stepper st(p, mode_state(p, g, q, amplitude, w));
    auto projection = [&](const State& s) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < p.n; ++i) {
            double c = 0.0;
            for (std::size_t k = 0; k < m; ++k) c += (s[i][k] - p.mean(i)) * std::cos(kappa * g.x(k));
            c *= 2.0 / static_cast<double>(m) / p.mean(i);
            num += w[i] * c;
            den += w[i] * w[i];
        }
        return num / den;
    };
    const std::size_t steps = static_cast<std::size_t>(std::llround(T / dt));
    const std::size_t samples = 20;
    std::vector<double> ts, ys;
    for (std::size_t k = 1; k <= steps; ++k) {
        st.step(dt);
        if (k * 2 >= steps && k % std::max<std::size_t>(1, steps / (2 * samples)) == 0) {
            ts.push_back(st.time());
            ys.push_back(std::log(std::abs(projection(st.state()))));
        }
    }
    const double n = static_cast<double>(ts.size());
    double st_ = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        st_ += ts[k];
        sy += ys[k];
        stt += ts[k] * ts[k];
        sty += ts[k] * ys[k];
    }
    GrowthFit f;
    f.measured = (n * sty - st_ * sy) / (n * stt - st_ * st_);
    f.predicted = kappa * kappa * sorted_eigenvalues(mat).front().real();
    return f;
}

// Two species, symmetric gamma, random masses and diffusions, top-hat kernel.
inline ModelParams random_symmetric_pair(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> pos(0.5, 1.5), g(-1.6, 1.6), a(0.05, 0.15);
    ModelParams p;
    p.diffusion = {pos(rng), pos(rng)};
    p.mass = {pos(rng), pos(rng)};
    const double off = g(rng), self = 0.5 * g(rng);
    p.gamma = {{self, off}, {off, 0.5 * g(rng)}};
    p.kernel = KernelSpec::top_hat(a(rng));
    return p;
}

} // namespace nlad::testing
