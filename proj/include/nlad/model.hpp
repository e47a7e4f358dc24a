#pragma once

#include "errors.hpp"
#include "grid.hpp"
#include "io.hpp"
#include "kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace nlad {

struct ModelParams {
    std::size_t n = 2;
    std::vector<double> diffusion;             // D_i
    std::vector<std::vector<double>> gamma;    // gamma[i][j]
    std::vector<double> mass;                  // p_i
    double length = 1.0;                       // L
    KernelSpec kernel = KernelSpec::delta();

    double mean(std::size_t i) const { return mass[i] / length; }

    bool symmetric(double tol = 0.0) const
    {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (std::abs(gamma[i][j] - gamma[j][i]) > tol) return false;
        return true;
    }

    void validate() const
    {
        if (n < 1) throw DimensionError("number of species must be >= 1");
        if (diffusion.size() != n || mass.size() != n || gamma.size() != n)
            throw DimensionError("D, p and gamma must have N entries");
        for (const auto& row : gamma)
            if (row.size() != n) throw DimensionError("gamma must be N x N");
        for (std::size_t i = 0; i < n; ++i) {
            if (!(diffusion[i] > 0.0) || !std::isfinite(diffusion[i]))
                throw ValidationError("diffusion coefficients must be positive");
            if (!(mass[i] > 0.0) || !std::isfinite(mass[i]))
                throw ValidationError("species masses must be positive");
            for (double g : gamma[i])
                if (!std::isfinite(g)) throw ValidationError("gamma entries must be finite");
        }
        if (!(length > 0.0) || !std::isfinite(length)) throw ValidationError("L must be positive");
        validate_kernel(kernel, length);
    }

    // Two species, unit D, p, L and zero self-interaction unless given.
    static ModelParams unit_pair(double g12, double g11 = 0.0, KernelSpec k = KernelSpec::delta())
    {
        ModelParams m;
        m.n = 2;
        m.diffusion = {1.0, 1.0};
        m.mass = {1.0, 1.0};
        m.gamma = {{g11, g12}, {g12, g11}};
        m.kernel = k;
        return m;
    }
};

enum class SteadyClass { H, S22, SInfInf, S1Inf, AInf };

inline constexpr std::array<SteadyClass, 5> kAllClasses = {
    SteadyClass::H, SteadyClass::S22, SteadyClass::SInfInf, SteadyClass::S1Inf, SteadyClass::AInf};

inline const char* class_name(SteadyClass c)
{
    switch (c) {
    case SteadyClass::H: return "S_H";
    case SteadyClass::S22: return "S_S22";
    case SteadyClass::SInfInf: return "S_SInfInf";
    case SteadyClass::S1Inf: return "S_S1Inf";
    case SteadyClass::AInf: return "S_AInf";
    }
    return "?";
}

inline SteadyClass class_from_name(const std::string& s)
{
    for (auto c : kAllClasses)
        if (s == class_name(c)) return c;
    throw ValidationError("unknown steady-state class '" + s + "'");
}

inline unsigned class_bit(SteadyClass c) { return 1u << static_cast<unsigned>(c); }

class State {
public:
    State(Grid grid, std::size_t n) : grid_(grid), u_(n, std::vector<double>(grid.size(), 0.0)) {}

    const Grid& grid() const { return grid_; }
    std::size_t species() const { return u_.size(); }
    std::vector<double>& operator[](std::size_t i) { return u_[i]; }
    const std::vector<double>& operator[](std::size_t i) const { return u_[i]; }

    double mass(std::size_t i) const
    {
        double s = 0.0;
        for (double v : u_[i]) s += v;
        return s * grid_.spacing();
    }
    double min() const
    {
        double m = INFINITY;
        for (const auto& f : u_) m = std::min(m, *std::min_element(f.begin(), f.end()));
        return m;
    }
    double max() const
    {
        double m = -INFINITY;
        for (const auto& f : u_) m = std::max(m, *std::max_element(f.begin(), f.end()));
        return m;
    }
    double max(std::size_t i) const { return *std::max_element(u_[i].begin(), u_[i].end()); }

private:
    Grid grid_;
    std::vector<std::vector<double>> u_;
};

inline void check_grid(const ModelParams& p, const Grid& g)
{
    p.validate();
    if (std::abs(g.length() - p.length) > 1e-12 * p.length)
        throw ValidationError("grid length differs from model L");
}

inline State homogeneous_state(const ModelParams& p, const Grid& g)
{
    check_grid(p, g);
    State s(g, p.n);
    for (std::size_t i = 0; i < p.n; ++i) std::fill(s[i].begin(), s[i].end(), p.mean(i));
    return s;
}

// Uniform deviate on [-1, 1] from the top 53 bits, so the stream is fixed by the seed alone.
inline double signed_unit(std::mt19937_64& rng)
{
    return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
}

inline State perturbed_state(const State& base, double amplitude, std::uint64_t seed)
{
    if (!(amplitude >= 0.0 && amplitude <= 0.1))
        throw ValidationError("perturbation amplitude must lie in [0, 0.1]");
    if (amplitude == 0.0) return base;
    State s = base;
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < s.species(); ++i) {
        const double before = base.mass(i);
        for (double& v : s[i]) v *= 1.0 + amplitude * signed_unit(rng);
        const double after = s.mass(i);
        if (after > 0.0)
            for (double& v : s[i]) v *= before / after;
    }
    return s;
}

// Cosine mode q with per-species weights w_i: u_i = ubar_i (1 + a w_i cos(kappa_q x)).
inline State mode_state(const ModelParams& p, const Grid& g, std::size_t q, double amplitude,
                        const std::vector<double>& weights)
{
    check_grid(p, g);
    if (weights.size() != p.n) throw DimensionError("mode weights need N entries");
    if (q == 0 || q > g.size() / 2) throw ValidationError("mode index must lie in 1..M/2");
    double wmax = 0.0;
    for (double w : weights) wmax = std::max(wmax, std::abs(w));
    if (!(amplitude * wmax < 1.0)) throw ValidationError("mode amplitude too large for positivity");
    State s(g, p.n);
    const double kq = g.wavenumber(q);
    for (std::size_t i = 0; i < p.n; ++i)
        for (std::size_t k = 0; k < g.size(); ++k)
            s[i][k] = p.mean(i) * (1.0 + amplitude * weights[i] * std::cos(kq * g.x(k)));
    return s;
}

namespace detail {
// Cells whose centres fall in [a, b); heights chosen so the species mass is exact.
inline void fill_block(State& s, std::size_t i, double a, double b, double mass)
{
    const Grid& g = s.grid();
    std::size_t count = 0;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (g.x(k) >= a && g.x(k) < b) ++count;
    if (count == 0) throw ValidationError("template support contains no grid cell");
    const double height = mass / (static_cast<double>(count) * g.spacing());
    for (std::size_t k = 0; k < g.size(); ++k) s[i][k] = (g.x(k) >= a && g.x(k) < b) ? height : 0.0;
}
} // namespace detail

// Piecewise-constant representative of a class, species-1 support starting at x = 0.
inline State template_state(const ModelParams& p, const Grid& g, SteadyClass cls,
                            std::optional<double> spike_width = std::nullopt)
{
    check_grid(p, g);
    if (p.n != 2) throw DimensionError("class templates are defined for two species");
    const double L = p.length;
    const bool spiky = cls == SteadyClass::SInfInf || cls == SteadyClass::S1Inf || cls == SteadyClass::AInf;
    double w = 0.0;
    if (spiky) {
        if (!spike_width) throw ValidationError("spike_width is required for this class");
        w = *spike_width;
        if (!(w >= 2.0 * g.spacing())) throw ValidationError("spike_width must be at least two cells");
        if (!(w < 0.5 * L)) throw ValidationError("spike_width must be below L/2");
    }
    State s(g, 2);
    const double p1 = p.mass[0], p2 = p.mass[1];
    switch (cls) {
    case SteadyClass::H:
        return homogeneous_state(p, g);
    case SteadyClass::S22: {
        const double d1 = p.diffusion[0], d2 = p.diffusion[1];
        const double s1 = p1 * d1 * L / (p1 * d1 + p2 * d2);
        detail::fill_block(s, 0, 0.0, s1, p1);
        detail::fill_block(s, 1, s1, L, p2);
        break;
    }
    case SteadyClass::SInfInf:
        detail::fill_block(s, 0, 0.0, w, p1);
        detail::fill_block(s, 1, 0.5 * L, 0.5 * L + w, p2);
        break;
    case SteadyClass::S1Inf:
        detail::fill_block(s, 0, 0.0, L - w, p1);
        detail::fill_block(s, 1, L - w, L, p2);
        break;
    case SteadyClass::AInf:
        detail::fill_block(s, 0, 0.0, w, p1);
        detail::fill_block(s, 1, 0.0, w, p2);
        break;
    }
    return s;
}

inline void write_state_csv(std::ostream& os, const State& s, const CsvMeta& meta = {})
{
    write_csv_meta(os, meta);
    os << "x";
    for (std::size_t i = 0; i < s.species(); ++i) os << ",u_" << (i + 1);
    os << '\n';
    for (std::size_t k = 0; k < s.grid().size(); ++k) {
        os << fmt(s.grid().x(k));
        for (std::size_t i = 0; i < s.species(); ++i) os << ',' << fmt(s[i][k]);
        os << '\n';
    }
}

inline State read_state_csv(std::istream& is, double length)
{
    std::string line;
    std::vector<std::vector<double>> cols;
    bool header = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto cells = split(line, ',');
        if (!header) {
            if (cells.size() < 2 || cells[0] != "x") throw ValidationError("state CSV header must start with x");
            cols.assign(cells.size() - 1, {});
            header = true;
            continue;
        }
        if (cells.size() != cols.size() + 1) throw ValidationError("state CSV row has wrong column count");
        for (std::size_t i = 0; i < cols.size(); ++i) cols[i].push_back(parse_double(cells[i + 1]));
    }
    if (!header) throw ValidationError("state CSV is empty");
    State s(Grid(cols.empty() ? 0 : cols[0].size(), length), cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) s[i] = cols[i];
    return s;
}

} // namespace nlad
