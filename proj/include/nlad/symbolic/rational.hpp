#pragma once

#include "../errors.hpp"

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <string>

namespace nlad::sym {

// Simplest fraction within 1e-12 (relative) of x with denominator at most 10^6.
inline mpq_class to_rational(double x)
{
    if (!std::isfinite(x)) throw ValidationError("parameter is not finite");
    const double tol = 1e-12 * std::max(1.0, std::abs(x));
    mpz_class h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double r = x;
    for (int it = 0; it < 64; ++it) {
        const double a = std::floor(r);
        const mpz_class ai(a);
        const mpz_class h2 = ai * h1 + h0, k2 = ai * k1 + k0;
        if (k2 > 1000000) break;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        mpq_class q(h1, k1);
        q.canonicalize();
        if (std::abs(q.get_d() - x) <= tol) return q;
        const double frac = r - a;
        if (frac == 0.0) break;
        r = 1.0 / frac;
    }
    throw ValidationError("parameter " + std::to_string(x) + " is not a simple rational; give it as \"p/q\"");
}

// "3/4", "-2", "1.05" or "1e-3", read exactly.
inline mpq_class parse_rational(const std::string& s)
{
    if (s.empty()) throw ValidationError("empty rational");
    if (s.find('/') != std::string::npos) {
        mpq_class q;
        if (q.set_str(s, 10) != 0 || q.get_den() == 0) throw ValidationError("bad rational '" + s + "'");
        q.canonicalize();
        return q;
    }
    std::size_t i = 0;
    bool neg = false;
    if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
    mpz_class num = 0, den = 1;
    bool digits = false, dot = false;
    for (; i < s.size() && s[i] != 'e' && s[i] != 'E'; ++i) {
        if (s[i] == '.' && !dot) {
            dot = true;
        } else if (std::isdigit(static_cast<unsigned char>(s[i]))) {
            num = num * 10 + (s[i] - '0');
            if (dot) den *= 10;
            digits = true;
        } else {
            throw ValidationError("bad rational '" + s + "'");
        }
    }
    if (!digits) throw ValidationError("bad rational '" + s + "'");
    long exp10 = 0;
    if (i < s.size()) {
        try {
            std::size_t used = 0;
            exp10 = std::stol(s.substr(i + 1), &used);
            if (used != s.size() - i - 1) throw ValidationError("bad exponent");
        } catch (const std::exception&) {
            throw ValidationError("bad rational '" + s + "'");
        }
    }
    mpz_class p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(std::abs(exp10)));
    if (exp10 >= 0) num *= p10;
    else den *= p10;
    mpq_class q(neg ? mpz_class(-num) : num, den);
    q.canonicalize();
    return q;
}

} // namespace nlad::sym
