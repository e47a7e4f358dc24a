#pragma once

#include "chain.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace nlad::sym {

// Dense univariate polynomial over Q, coefficients from degree 0 upward, no trailing zeros.
using UPoly = std::vector<mpq_class>;

namespace upoly {

inline UPoly trim(UPoly p)
{
    while (!p.empty() && p.back() == 0) p.pop_back();
    return p;
}

inline int degree(const UPoly& p) { return static_cast<int>(p.size()) - 1; }

inline UPoly mul(const UPoly& a, const UPoly& b)
{
    if (a.empty() || b.empty()) return {};
    UPoly r(a.size() + b.size() - 1, mpq_class(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return trim(r);
}

inline UPoly sub(const UPoly& a, const UPoly& b)
{
    UPoly r(std::max(a.size(), b.size()), mpq_class(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    return trim(r);
}

inline UPoly derivative(const UPoly& p)
{
    UPoly r;
    for (std::size_t i = 1; i < p.size(); ++i) r.push_back(p[i] * static_cast<long>(i));
    return trim(r);
}

inline std::pair<UPoly, UPoly> divmod(UPoly a, const UPoly& b)
{
    if (b.empty()) throw ConsistencyError("polynomial division by zero");
    if (a.size() < b.size()) return {{}, trim(a)};
    UPoly q(a.size() - b.size() + 1, mpq_class(0));
    for (int k = degree(a) - degree(b); k >= 0; --k) {
        const mpq_class c = a[k + b.size() - 1] / b.back();
        q[k] = c;
        for (std::size_t j = 0; j < b.size(); ++j) a[k + j] -= c * b[j];
    }
    a.resize(b.size() - 1);
    return {trim(q), trim(a)};
}

inline UPoly monic(UPoly p)
{
    if (p.empty()) return p;
    const mpq_class lc = p.back();
    for (auto& c : p) c /= lc;
    return p;
}

inline UPoly gcd(UPoly a, UPoly b)
{
    a = trim(a);
    b = trim(b);
    while (!b.empty()) {
        auto r = divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return monic(a);
}

inline UPoly squarefree(const UPoly& p)
{
    const UPoly g = gcd(p, derivative(p));
    return monic(divmod(p, g).first);
}

inline mpq_class eval(const UPoly& p, const mpq_class& x)
{
    mpq_class s = 0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) s = s * x + *it;
    return s;
}

inline int sign_at(const UPoly& p, double x) { return sgn(eval(p, mpq_class(x))); }

// Real roots of a square-free polynomial, ascending, each to within one ulp.
inline std::vector<double> real_roots(const UPoly& p)
{
    const int d = degree(p);
    if (d <= 0) return {};
    if (d == 1) return {mpq_class(-p[0] / p[1]).get_d()};
    double bound = 0.0;
    for (int i = 0; i < d; ++i) bound = std::max(bound, std::abs(mpq_class(p[i] / p[d]).get_d()));
    bound += 1.0;
    std::vector<double> pts{-bound};
    for (double c : real_roots(squarefree(derivative(p))))
        if (c > -bound && c < bound) pts.push_back(c);
    pts.push_back(bound);
    std::vector<double> roots;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        double a = pts[k], b = pts[k + 1];
        const int sa = sign_at(p, a), sb = sign_at(p, b);
        if (sa == 0) {
            if (roots.empty() || roots.back() != a) roots.push_back(a);
            continue;
        }
        if (sb == 0 || sa == sb) continue;
        while (true) {
            const double m = 0.5 * (a + b);
            if (m <= a || m >= b) break;
            const int sm = sign_at(p, m);
            if (sm == 0) {
                a = b = m;
                break;
            }
            (sm == sa ? a : b) = m;
        }
        roots.push_back(std::abs(sign_at(p, a)) == 0 ? a : (a + b) * 0.5);
    }
    if (sign_at(p, bound) == 0) roots.push_back(bound);
    return roots;
}

} // namespace upoly

struct SolveN2Result {
    std::vector<std::array<double, 2>> solutions;
    std::vector<std::array<double, 2>> residuals;   // relative residuals of det A_1 and det A_2
    bool degenerate = false;
    std::string note;
    Polynomial det1{2}, det2{2};
    UPoly resultant;
};

inline double relative_residual(const Polynomial& p, double u1, double u2)
{
    const auto [v, a] = p.evaluate_with_scale({static_cast<long double>(u1), static_cast<long double>(u2)});
    return a == 0 ? 0.0 : static_cast<double>(std::fabs(v) / a);
}

namespace detail {
// Coefficient of u2^k of a bivariate polynomial, as a polynomial in u1.
inline UPoly coefficient_in_u2(const Polynomial& p, unsigned k)
{
    UPoly r;
    for (const auto& t : p.terms()) {
        if (t.e[1] != k) continue;
        if (r.size() <= t.e[0]) r.resize(t.e[0] + 1, mpq_class(0));
        r[t.e[0]] += t.c;
    }
    return upoly::trim(r);
}

inline void newton_polish(const Polynomial& f, const Polynomial& g, double& u1, double& u2)
{
    const Polynomial f1 = f.derivative(0), f2 = f.derivative(1), g1 = g.derivative(0), g2 = g.derivative(1);
    auto score = [&](double a, double b) { return std::max(relative_residual(f, a, b), relative_residual(g, a, b)); };
    double best = score(u1, u2);
    for (int it = 0; it < 8 && best > 0.0; ++it) {
        const std::vector<double> x{u1, u2};
        const long double fv = f.evaluate_with_scale({u1, u2}).first, gv = g.evaluate_with_scale({u1, u2}).first;
        const long double a = f1.evaluate(x), b = f2.evaluate(x), c = g1.evaluate(x), d = g2.evaluate(x);
        const long double det = a * d - b * c;
        if (det == 0) break;
        const double n1 = static_cast<double>(u1 - (d * fv - b * gv) / det);
        const double n2 = static_cast<double>(u2 - (a * gv - c * fv) / det);
        const double s = score(n1, n2);
        if (!(s < best)) break;
        u1 = n1;
        u2 = n2;
        best = s;
    }
}
} // namespace detail

// Common zeros of det A_1 and det A_2 for two species, with A_2 = augment_chain(A_1, {0}).
// Both determinants are linear in u2, so eliminating u2 leaves a univariate resultant in u1.
inline SolveN2Result solve_n2(const RationalParams& p, bool polish = true)
{
    if (p.n != 2) throw DimensionError("solve_n2 needs two species");
    const auto sys = build_chain(p, default_chain(2));
    SolveN2Result res;
    res.det1 = sys.determinants[0];
    res.det2 = sys.determinants[1];
    if (res.det1.degree_in(1) > 1 || res.det2.degree_in(1) > 1)
        throw ConsistencyError("determinants are expected to be linear in u2");
    const UPoly a1 = detail::coefficient_in_u2(res.det1, 0), b1 = detail::coefficient_in_u2(res.det1, 1);
    const UPoly a2 = detail::coefficient_in_u2(res.det2, 0), b2 = detail::coefficient_in_u2(res.det2, 1);
    res.resultant = upoly::sub(upoly::mul(a1, b2), upoly::mul(a2, b1));

    std::vector<std::array<double, 2>> sols;
    auto add_if_fixed = [&](const mpq_class& r_exact, double r) {
        // b1(r) = 0: eq. 1 holds only if a1(r) = 0, and then eq. 2 fixes u2.
        if (upoly::eval(a1, r_exact) != 0 && upoly::eval(a1, mpq_class(r)) != 0) return;
        if (!b2.empty() && upoly::eval(b2, mpq_class(r)) != 0) {
            sols.push_back({r, -upoly::eval(a2, mpq_class(r)).get_d() / upoly::eval(b2, mpq_class(r)).get_d()});
        } else if (upoly::eval(a2, mpq_class(r)) == 0) {
            res.degenerate = true;
            res.note = "a line of solutions u1 = " + std::to_string(r);
        }
    };

    if (res.resultant.empty()) {
        if (!b1.empty()) {
            res.degenerate = true;
            res.note = "eliminant vanishes identically: a curve of common zeros";
        } else if (a1.empty()) {
            res.degenerate = true;
            res.note = "det A_1 vanishes identically";
        } else {
            for (double r : upoly::real_roots(upoly::squarefree(a1))) add_if_fixed(mpq_class(r), r);
        }
    } else {
        const UPoly rs = upoly::squarefree(res.resultant);
        const UPoly g = b1.empty() ? rs : upoly::gcd(rs, b1);
        const UPoly free_part = upoly::divmod(rs, g).first;
        for (double r : upoly::real_roots(free_part)) {
            const double num = upoly::eval(a1, mpq_class(r)).get_d(), den = upoly::eval(b1, mpq_class(r)).get_d();
            sols.push_back({r, -num / den});
        }
        for (double r : upoly::real_roots(g)) {
            // r approximates an exact root of g; a1 and g share it iff their gcd does
            const UPoly shared = upoly::gcd(g, a1);
            const bool a1_zero = upoly::degree(shared) >= 1 && std::abs(upoly::eval(shared, mpq_class(r)).get_d()) <
                                                                   1e-9 * (1.0 + std::abs(r));
            if (!a1_zero) continue;
            add_if_fixed(mpq_class(0), r);
        }
    }
    std::sort(sols.begin(), sols.end());
    for (auto s : sols) {
        if (!std::isfinite(s[0]) || !std::isfinite(s[1])) continue;
        if (polish) detail::newton_polish(res.det1, res.det2, s[0], s[1]);
        res.solutions.push_back(s);
        res.residuals.push_back({relative_residual(res.det1, s[0], s[1]), relative_residual(res.det2, s[0], s[1])});
    }
    return res;
}

inline nlohmann::ordered_json to_json(const SolveN2Result& r)
{
    nlohmann::ordered_json j;
    j["solutions"] = nlohmann::ordered_json::array();
    for (const auto& s : r.solutions) j["solutions"].push_back({s[0], s[1]});
    j["residuals"] = nlohmann::ordered_json::array();
    for (const auto& s : r.residuals) j["residuals"].push_back({s[0], s[1]});
    j["degenerate"] = r.degenerate;
    j["note"] = r.note;
    j["det_A1"] = to_string(r.det1);
    j["det_A2"] = to_string(r.det2);
    return j;
}

} // namespace nlad::sym
