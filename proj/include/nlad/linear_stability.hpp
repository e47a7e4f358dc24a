#pragma once

#include "model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <ostream>
#include <vector>

namespace nlad {

// L_ij(kappa) = -gamma_ij ubar_i Khat(kappa) - D_i delta_ij
inline Eigen::MatrixXd stability_matrix(const ModelParams& p, double kappa)
{
    p.validate();
    const double kh = kernel_fourier(p.kernel, kappa);
    Eigen::MatrixXd m(p.n, p.n);
    for (std::size_t i = 0; i < p.n; ++i)
        for (std::size_t j = 0; j < p.n; ++j)
            m(i, j) = -p.gamma[i][j] * p.mean(i) * kh - (i == j ? p.diffusion[i] : 0.0);
    return m;
}

// Eigenvalues sorted by descending real part, ties by descending imaginary part.
inline std::vector<cplx> sorted_eigenvalues(const Eigen::MatrixXd& m)
{
    std::vector<cplx> ev;
    if ((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
        for (Eigen::Index i = 0; i < m.rows(); ++i) ev.emplace_back(es.eigenvalues()(i), 0.0);
    } else {
        Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
        for (Eigen::Index i = 0; i < m.rows(); ++i) ev.push_back(es.eigenvalues()(i));
    }
    std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
    });
    return ev;
}

struct EigenPair2 {
    cplx plus;
    cplx minus;
    bool complex = false;
};

// Closed form for two species.
inline EigenPair2 eigenvalues_n2(const ModelParams& p, double kappa)
{
    if (p.n != 2) throw DimensionError("eigenvalues_n2 needs two species");
    const auto m = stability_matrix(p, kappa);
    const double a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
    const double half_tr = 0.5 * (a + d);
    const double disc = 0.25 * (a - d) * (a - d) + b * c;
    EigenPair2 r;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        r.plus = half_tr + s;
        r.minus = half_tr - s;
    } else {
        auto ev = sorted_eigenvalues(m);
        r.plus = ev[0];
        r.minus = ev[1];
        r.complex = true;
    }
    return r;
}

struct DispersionRow {
    std::size_t q = 0;
    double kappa = 0.0;
    std::vector<cplx> eigenvalues;
    double growth = 0.0;          // kappa^2 max Re lambda, 0 for q = 0
    bool complex_spectrum = false;
};

using DispersionTable = std::vector<DispersionRow>;

inline DispersionTable dispersion(const ModelParams& p, const Grid& g, std::size_t q_max = 0)
{
    check_grid(p, g);
    if (q_max == 0) q_max = g.size() / 4;
    if (q_max > g.size() / 2) throw ValidationError("q_max exceeds M/2");
    DispersionTable t;
    t.reserve(q_max + 1);
    for (std::size_t q = 0; q <= q_max; ++q) {
        DispersionRow r;
        r.q = q;
        r.kappa = g.wavenumber(q);
        r.eigenvalues = sorted_eigenvalues(stability_matrix(p, r.kappa));
        r.growth = q == 0 ? 0.0 : r.kappa * r.kappa * r.eigenvalues.front().real();
        for (auto e : r.eigenvalues)
            if (std::abs(e.imag()) > 1e-10) r.complex_spectrum = true;
        t.push_back(std::move(r));
    }
    return t;
}

// Modes 1..q_max with strictly positive growth; exact marginal modes count as stable.
inline std::vector<std::size_t> unstable_modes(const ModelParams& p, const Grid& g, std::size_t q_max = 0)
{
    double scale = 0.0;
    for (std::size_t i = 0; i < p.n; ++i) {
        scale = std::max(scale, p.diffusion[i]);
        for (double gij : p.gamma[i]) scale = std::max(scale, std::abs(gij) * p.mean(i));
    }
    std::vector<std::size_t> out;
    for (const auto& r : dispersion(p, g, q_max))
        if (r.q > 0 && r.eigenvalues.front().real() > 1e-12 * scale) out.push_back(r.q);
    return out;
}

inline bool is_unstable(const ModelParams& p, const Grid& g, std::size_t q_max = 0)
{
    return !unstable_modes(p, g, q_max).empty();
}

inline void write_dispersion_csv(std::ostream& os, const DispersionTable& t, std::size_t n, const CsvMeta& meta = {})
{
    write_csv_meta(os, meta);
    os << "q,kappa";
    for (std::size_t i = 0; i < n; ++i) os << ",re_lambda_" << (i + 1);
    for (std::size_t i = 0; i < n; ++i) os << ",im_lambda_" << (i + 1);
    os << ",growth_rate,complex_spectrum\n";
    for (const auto& r : t) {
        os << r.q << ',' << fmt(r.kappa);
        for (auto e : r.eigenvalues) os << ',' << fmt(e.real());
        for (auto e : r.eigenvalues) os << ',' << fmt(e.imag());
        os << ',' << fmt(r.growth) << ',' << (r.complex_spectrum ? 1 : 0) << '\n';
    }
}

} // namespace nlad
