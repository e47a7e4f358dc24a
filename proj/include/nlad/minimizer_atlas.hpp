#pragma once

#include "model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

namespace nlad {

namespace detail {
inline void require_pair(const ModelParams& p)
{
    p.validate();
    if (p.n != 2) throw DimensionError("the plateau analysis is defined for two species");
    if (p.gamma[0][1] != p.gamma[1][0]) throw ContractError("the plateau analysis needs gamma_12 = gamma_21");
}
} // namespace detail

// Energy of single-plateau profiles with heights (u1c, u2c) in the local limit.
inline double script_energy(const ModelParams& p, double u1c, double u2c)
{
    detail::require_pair(p);
    const double p1 = p.mass[0], p2 = p.mass[1], L = p.length;
    if (!(u1c >= p1 / L * (1 - 1e-12)) || !(u2c >= p2 / L * (1 - 1e-12)))
        throw ValidationError("plateau heights must satisfy u_ic >= p_i / L");
    double e = p1 * (p.diffusion[0] * std::log(u1c) + 0.5 * p.gamma[0][0] * u1c) +
               p2 * (p.diffusion[1] * std::log(u2c) + 0.5 * p.gamma[1][1] * u2c);
    const double overlap = p1 / u1c + p2 / u2c - L;
    if (overlap > 0.0) e += p.gamma[0][1] * u1c * u2c * overlap;
    return e;
}

struct MinimumCandidate {
    SteadyClass cls;
    double u1c = 0.0;
    double u2c = 0.0;
    bool local_min = false;
    double energy = 0.0;
    std::string note;
};

// M_S (segregated plateaus) and M_H (homogeneous), each with a first-order Taylor-sign verdict.
inline std::vector<MinimumCandidate> candidate_minima(const ModelParams& p)
{
    detail::require_pair(p);
    const double p1 = p.mass[0], p2 = p.mass[1], d1 = p.diffusion[0], d2 = p.diffusion[1], L = p.length;
    const double g11 = p.gamma[0][0], g22 = p.gamma[1][1], g12 = p.gamma[0][1];
    std::vector<MinimumCandidate> out;

    {
        const double P = p1 * d1 + p2 * d2;
        MinimumCandidate c{SteadyClass::S22, P / (d1 * L), P / (d2 * L), false, 0.0, {}};
        const double u1 = c.u1c, u2 = c.u2c;
        // Feasible directions on the segregated side satisfy w.d >= 0, on the overlapping side w.d <= 0.
        const double w1 = p1 / (u1 * u1), w2 = p2 / (u2 * u2);
        const double lo1 = p1 * d1 / u1 + 0.5 * g11 * p1, lo2 = p2 * d2 / u2 + 0.5 * g22 * p2;
        const double hi1 = lo1 + g12 * (p2 - L * u2), hi2 = lo2 + g12 * (p1 - L * u1);
        auto parallel = [](double a1, double a2, double b1, double b2) {
            return std::abs(a1 * b2 - a2 * b1) <= 1e-10 * (std::abs(a1 * b2) + std::abs(a2 * b1) + 1e-300);
        };
        if (!parallel(lo1, lo2, w1, w2) || !parallel(hi1, hi2, w1, w2)) {
            c.note = "not a critical point of the constrained energy";
        } else {
            const double mu_lo = lo1 / w1, mu_hi = hi1 / w1;
            c.local_min = mu_lo > 0.0 && mu_hi < 0.0;
        }
        c.energy = script_energy(p, u1, u2);
        out.push_back(c);
    }
    {
        MinimumCandidate c{SteadyClass::H, p1 / L, p2 / L, false, 0.0, {}};
        const double a1 = d1 * L + 0.5 * g11 * p1, a2 = d2 * L + 0.5 * g22 * p2;
        if (g12 >= 0.0)
            c.local_min = a1 > 0.0 && a2 > 0.0;
        else
            c.local_min = a1 > 0.0 && a2 > 0.0 && a1 * p1 + a2 * p2 + g12 * p1 * p2 > 0.0;
        c.energy = script_energy(p, c.u1c, c.u2c);
        out.push_back(c);
    }
    return out;
}

enum class RegimeCase { A1, A2, B1, B2, C1, C2, C3, C4 };

inline const char* case_name(RegimeCase c)
{
    static constexpr std::array<const char*, 8> names = {"A1", "A2", "B1", "B2", "C1", "C2", "C3", "C4"};
    return names[static_cast<std::size_t>(c)];
}

struct RegimeResult {
    RegimeCase regime_case;
    std::vector<SteadyClass> classes;
    unsigned mask = 0;
    bool boundary = false;
};

inline std::vector<SteadyClass> case_classes(RegimeCase c)
{
    using S = SteadyClass;
    switch (c) {
    case RegimeCase::A1: return {S::H};
    case RegimeCase::A2: return {S::H, S::S22};
    case RegimeCase::B1: return {S::H, S::AInf};
    case RegimeCase::B2: return {S::AInf};
    case RegimeCase::C1: return {S::H, S::SInfInf, S::S1Inf};
    case RegimeCase::C2: return {S::H, S::S22, S::SInfInf, S::S1Inf};
    case RegimeCase::C3: return {S::S22, S::SInfInf, S::S1Inf};
    case RegimeCase::C4: return {S::SInfInf, S::S1Inf};
    }
    return {};
}

// Unit D, p, L with gamma_22 = gamma_11 and gamma_21 = gamma_12. On a dividing line the
// point goes to the first listed case whose closure contains it, and is flagged.
inline RegimeResult classify_regime(double g11, double g12)
{
    if (!std::isfinite(g11) || !std::isfinite(g12)) throw ValidationError("gamma values must be finite");
    RegimeResult r{};
    bool edge = g12 == 0.0;
    if (g11 >= 0.0 && g12 >= 0.0) {
        edge = edge || g11 == 0.0 || g11 == 2 * g12 - 1;
        r.regime_case = g11 >= 2 * g12 - 1 ? RegimeCase::A1 : RegimeCase::A2;
    } else if (g12 <= 0.0) {
        edge = edge || g11 == -g12 - 1;
        r.regime_case = g11 >= -g12 - 1 ? RegimeCase::B1 : RegimeCase::B2;
    } else {
        edge = edge || g11 == 2 * g12 - 1 || g11 == g12 - 1 || g11 == -1.0;
        if (g11 >= 2 * g12 - 1)
            r.regime_case = RegimeCase::C1;
        else if (g11 >= g12 - 1)
            r.regime_case = RegimeCase::C2;
        else if (g11 >= -1.0)
            r.regime_case = RegimeCase::C3;
        else
            r.regime_case = RegimeCase::C4;
    }
    r.boundary = edge;
    r.classes = case_classes(r.regime_case);
    for (auto c : r.classes) r.mask |= class_bit(c);
    return r;
}

inline bool is_unit_pair(const ModelParams& p)
{
    return p.n == 2 && p.diffusion[0] == 1.0 && p.diffusion[1] == 1.0 && p.mass[0] == 1.0 && p.mass[1] == 1.0 &&
           p.length == 1.0 && p.gamma[0][0] == p.gamma[1][1] && p.gamma[0][1] == p.gamma[1][0];
}

inline RegimeResult classify_regime(const ModelParams& p)
{
    p.validate();
    if (!is_unit_pair(p))
        throw ContractError("the case table assumes unit D, p, L, gamma_22 = gamma_11 and gamma_21 = gamma_12");
    return classify_regime(p.gamma[0][0], p.gamma[0][1]);
}

// Co-located spikes u1c = u2c = s: sum p_i D_i ln s + gamma_12 min(p1, p2) s must fall strictly.
// Sample points start past the turning point P / (|gamma_12| min p) so small |gamma_12| is still detected.
inline bool unbounded_descent_check(const ModelParams& p)
{
    detail::require_pair(p);
    const double g12 = p.gamma[0][1];
    if (g12 >= 0.0) return false;
    const double P = p.mass[0] * p.diffusion[0] + p.mass[1] * p.diffusion[1];
    const double pm = std::min(p.mass[0], p.mass[1]);
    const double scale = std::max(1.0, P / (-g12 * pm));
    auto f = [&](double s) { return P * std::log(s) + g12 * pm * s; };
    double prev = INFINITY;
    for (double s : {10.0, 100.0, 1000.0}) {
        const double v = f(s * scale);
        if (!(v < prev)) return false;
        prev = v;
    }
    return true;
}

struct RegimeMapSpec {
    double g12_min = -2.0, g12_max = 2.0;
    double g11_min = -2.0, g11_max = 2.0;
    std::size_t n12 = 81, n11 = 81;
};

inline void write_regime_map_csv(std::ostream& os, const RegimeMapSpec& s, const CsvMeta& meta = {})
{
    if (s.n12 < 2 || s.n11 < 2) throw ValidationError("regime map needs at least 2 samples per axis");
    write_csv_meta(os, meta);
    os << "gamma12,gamma11,case,mask,boundary\n";
    for (std::size_t a = 0; a < s.n11; ++a) {
        const double g11 = s.g11_min + (s.g11_max - s.g11_min) * static_cast<double>(a) / static_cast<double>(s.n11 - 1);
        for (std::size_t b = 0; b < s.n12; ++b) {
            const double g12 =
                s.g12_min + (s.g12_max - s.g12_min) * static_cast<double>(b) / static_cast<double>(s.n12 - 1);
            const auto r = classify_regime(g11, g12);
            os << fmt(g12) << ',' << fmt(g11) << ',' << case_name(r.regime_case) << ',' << r.mask << ','
               << (r.boundary ? 1 : 0) << '\n';
        }
    }
}

} // namespace nlad
