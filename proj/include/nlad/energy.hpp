#pragma once

#include "model.hpp"

#include <json.hpp>

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

namespace nlad {

inline constexpr double kDensityFloor = 1e-14;

inline void require_symmetric(const ModelParams& p)
{
    double scale = 0.0;
    for (const auto& row : p.gamma)
        for (double g : row) scale = std::max(scale, std::abs(g));
    if (!p.symmetric(1e-12 * scale)) throw ContractError("energy requires a symmetric interaction matrix");
}

namespace detail {

inline double entropy_density(double u) { return u > kDensityFloor ? u * std::log(u) : 0.0; }

inline std::vector<std::vector<double>> convolve_all(const State& s, const KernelSpec& k)
{
    std::vector<std::vector<double>> c;
    c.reserve(s.species());
    for (std::size_t i = 0; i < s.species(); ++i) c.push_back(periodic_convolve(s[i], k, s.grid()));
    return c;
}

inline double energy_with(const State& s, const ModelParams& p, const std::vector<std::vector<double>>& avg)
{
    const std::size_t m = s.grid().size();
    double total = 0.0;
    for (std::size_t i = 0; i < p.n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            double inter = 0.0;
            for (std::size_t j = 0; j < p.n; ++j) inter += p.gamma[i][j] * avg[j][k];
            acc += p.diffusion[i] * entropy_density(s[i][k]) + 0.5 * s[i][k] * inter;
        }
        total += acc;
    }
    return total * s.grid().spacing();
}

inline void check_state(const State& s, const ModelParams& p)
{
    check_grid(p, s.grid());
    if (s.species() != p.n) throw DimensionError("state has wrong number of species");
}

} // namespace detail

inline double energy(const State& s, const ModelParams& p)
{
    detail::check_state(s, p);
    require_symmetric(p);
    return detail::energy_with(s, p, detail::convolve_all(s, p.kernel));
}

// Energy of the local (alpha -> 0) model.
inline double local_energy(const State& s, const ModelParams& p)
{
    detail::check_state(s, p);
    require_symmetric(p);
    std::vector<std::vector<double>> avg;
    for (std::size_t i = 0; i < p.n; ++i) avg.push_back(s[i]);
    return detail::energy_with(s, p, avg);
}

// -int sum_i u_i |d/dx (D_i ln u_i + sum_j gamma_ij K*u_j)|^2, derivative taken spectrally.
inline double dissipation(const State& s, const ModelParams& p)
{
    detail::check_state(s, p);
    require_symmetric(p);
    const Grid& g = s.grid();
    const std::size_t m = g.size();
    const auto avg = detail::convolve_all(s, p.kernel);
    const auto& fft = fft_for(m);
    double total = 0.0;
    std::vector<double> f(m);
    for (std::size_t i = 0; i < p.n; ++i) {
        for (std::size_t k = 0; k < m; ++k) {
            double v = p.diffusion[i] * std::log(std::max(s[i][k], kDensityFloor));
            for (std::size_t j = 0; j < p.n; ++j) v += p.gamma[i][j] * avg[j][k];
            f[k] = v;
        }
        auto spec = fft.forward(f);
        for (std::size_t q = 0; q < spec.size(); ++q) spec[q] *= cplx(0.0, g.wavenumber(q));
        spec.back() = 0.0;
        const auto df = fft.inverse(spec);
        for (std::size_t k = 0; k < m; ++k)
            if (s[i][k] > kDensityFloor) total += s[i][k] * df[k] * df[k];
    }
    return -total * g.spacing();
}

inline double lower_bound(const ModelParams& p)
{
    p.validate();
    if (p.kernel.is_delta()) throw UnsupportedError("the energy lower bound needs a top-hat kernel");
    double diff = 0.0, inter = 0.0;
    for (std::size_t i = 0; i < p.n; ++i) {
        diff += p.diffusion[i];
        for (std::size_t j = 0; j < p.n; ++j) inter += std::abs(p.gamma[i][j]) * p.mass[i] * p.mass[j];
    }
    return -std::exp(-1.0) * p.length * diff - 0.5 * (0.5 / p.kernel.alpha) * inter;
}

struct EnergyReport {
    double energy = 0.0;
    double local_energy = 0.0;
    double dissipation = 0.0;
    std::optional<double> lower_bound;
    std::vector<double> masses;
};

inline EnergyReport energy_report(const State& s, const ModelParams& p)
{
    EnergyReport r;
    r.energy = energy(s, p);
    r.local_energy = local_energy(s, p);
    r.dissipation = dissipation(s, p);
    if (!p.kernel.is_delta()) r.lower_bound = lower_bound(p);
    for (std::size_t i = 0; i < s.species(); ++i) r.masses.push_back(s.mass(i));
    return r;
}

inline nlohmann::ordered_json to_json(const EnergyReport& r)
{
    nlohmann::ordered_json j;
    j["E"] = r.energy;
    j["E_local"] = r.local_energy;
    j["dissipation"] = r.dissipation;
    j["lower_bound"] = r.lower_bound ? nlohmann::ordered_json(*r.lower_bound) : nlohmann::ordered_json(nullptr);
    j["masses"] = r.masses;
    return j;
}

} // namespace nlad
