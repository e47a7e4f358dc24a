#pragma once

#include "../errors.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace nlad::sym {

inline constexpr std::size_t kMaxVars = 6;

using Exponent = std::array<std::uint16_t, kMaxVars>;

inline Exponent exp_add(const Exponent& a, const Exponent& b)
{
    Exponent r{};
    for (std::size_t i = 0; i < kMaxVars; ++i) {
        const unsigned s = unsigned(a[i]) + unsigned(b[i]);
        if (s > 0xFFFFu) throw ResourceCapError("monomial exponent overflow");
        r[i] = static_cast<std::uint16_t>(s);
    }
    return r;
}

inline Exponent exp_sub(const Exponent& a, const Exponent& b)
{
    Exponent r{};
    for (std::size_t i = 0; i < kMaxVars; ++i) r[i] = static_cast<std::uint16_t>(a[i] - b[i]);
    return r;
}

inline bool exp_divides(const Exponent& a, const Exponent& b)
{
    for (std::size_t i = 0; i < kMaxVars; ++i)
        if (a[i] > b[i]) return false;
    return true;
}

inline Exponent exp_lcm(const Exponent& a, const Exponent& b)
{
    Exponent r{};
    for (std::size_t i = 0; i < kMaxVars; ++i) r[i] = std::max(a[i], b[i]);
    return r;
}

inline unsigned exp_degree(const Exponent& a)
{
    unsigned d = 0;
    for (auto e : a) d += e;
    return d;
}

struct Term {
    Exponent e{};
    mpq_class c;
};

// Sparse polynomial over Q in u1..un. Terms are kept in descending lex order with u1 > u2 > ...
class Polynomial {
public:
    explicit Polynomial(std::size_t nvars = 1) : n_(nvars)
    {
        if (nvars == 0 || nvars > kMaxVars) throw DimensionError("polynomials support 1 to 6 variables");
    }

    static Polynomial constant(std::size_t nvars, const mpq_class& c)
    {
        Polynomial p(nvars);
        if (c != 0) p.terms_.push_back({Exponent{}, c});
        return p;
    }

    static Polynomial variable(std::size_t nvars, std::size_t i)
    {
        if (i >= nvars) throw DimensionError("variable index out of range");
        Polynomial p(nvars);
        Term t;
        t.e[i] = 1;
        t.c = 1;
        p.terms_.push_back(t);
        return p;
    }

    static Polynomial from_terms(std::size_t nvars, std::vector<Term> terms)
    {
        Polynomial p(nvars);
        std::map<Exponent, mpq_class, std::greater<>> acc;
        for (auto& t : terms) acc[t.e] += t.c;
        for (auto& [e, c] : acc)
            if (c != 0) p.terms_.push_back({e, c});
        return p;
    }

    std::size_t nvars() const { return n_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    unsigned degree() const
    {
        unsigned d = 0;
        for (const auto& t : terms_) d = std::max(d, exp_degree(t.e));
        return d;
    }

    unsigned degree_in(std::size_t var) const
    {
        unsigned d = 0;
        for (const auto& t : terms_) d = std::max<unsigned>(d, t.e[var]);
        return d;
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) { return combine(a, b, 1); }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return combine(a, b, -1); }
    Polynomial operator-() const
    {
        Polynomial r = *this;
        for (auto& t : r.terms_) t.c = -t.c;
        return r;
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b)
    {
        check_same(a, b);
        Polynomial r(a.n_);
        for (const auto& t : a.terms_) {
            Polynomial part(a.n_);
            part.terms_.reserve(b.terms_.size());
            for (const auto& s : b.terms_) part.terms_.push_back({exp_add(t.e, s.e), t.c * s.c});
            r = r + part;
        }
        return r;
    }

    friend Polynomial operator*(const mpq_class& k, const Polynomial& a)
    {
        Polynomial r(a.n_);
        if (k == 0) return r;
        r.terms_ = a.terms_;
        for (auto& t : r.terms_) t.c *= k;
        return r;
    }

    Polynomial& operator+=(const Polynomial& o) { return *this = *this + o; }
    Polynomial& operator-=(const Polynomial& o) { return *this = *this - o; }
    Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

    bool operator==(const Polynomial& o) const
    {
        if (n_ != o.n_ || terms_.size() != o.terms_.size()) return false;
        for (std::size_t i = 0; i < terms_.size(); ++i)
            if (terms_[i].e != o.terms_[i].e || terms_[i].c != o.terms_[i].c) return false;
        return true;
    }

    Polynomial derivative(std::size_t var) const
    {
        if (var >= n_) throw DimensionError("variable index out of range");
        std::vector<Term> out;
        for (const auto& t : terms_) {
            if (t.e[var] == 0) continue;
            Term d = t;
            d.c *= t.e[var];
            d.e[var] -= 1;
            out.push_back(d);
        }
        return from_terms(n_, std::move(out));
    }

    mpq_class evaluate(const std::vector<mpq_class>& x) const
    {
        if (x.size() != n_) throw DimensionError("evaluation point has wrong dimension");
        mpq_class s = 0;
        for (const auto& t : terms_) {
            mpq_class m = t.c;
            for (std::size_t i = 0; i < n_; ++i)
                for (unsigned k = 0; k < t.e[i]; ++k) m *= x[i];
            s += m;
        }
        return s;
    }

    // Value and sum of absolute term values, for relative residuals.
    std::pair<long double, long double> evaluate_with_scale(const std::vector<long double>& x) const
    {
        if (x.size() != n_) throw DimensionError("evaluation point has wrong dimension");
        long double s = 0, a = 0;
        for (const auto& t : terms_) {
            long double m = static_cast<long double>(t.c.get_d());
            for (std::size_t i = 0; i < n_; ++i) m *= std::pow(x[i], static_cast<int>(t.e[i]));
            s += m;
            a += std::fabs(m);
        }
        return {s, a};
    }

    double evaluate(const std::vector<double>& x) const
    {
        std::vector<long double> xl(x.begin(), x.end());
        return static_cast<double>(evaluate_with_scale(xl).first);
    }

    const Term& lead() const
    {
        if (terms_.empty()) throw ContractError("zero polynomial has no leading term");
        return terms_.front();
    }

    // Largest numerator or denominator size in bits.
    std::size_t max_coefficient_bits() const
    {
        std::size_t b = 0;
        for (const auto& t : terms_)
            b = std::max({b, mpz_sizeinbase(t.c.get_num_mpz_t(), 2), mpz_sizeinbase(t.c.get_den_mpz_t(), 2)});
        return b;
    }

private:
    static void check_same(const Polynomial& a, const Polynomial& b)
    {
        if (a.n_ != b.n_) throw DimensionError("polynomials have different variable counts");
    }

    static Polynomial combine(const Polynomial& a, const Polynomial& b, int sign)
    {
        check_same(a, b);
        Polynomial r(a.n_);
        r.terms_.reserve(a.terms_.size() + b.terms_.size());
        std::size_t i = 0, j = 0;
        while (i < a.terms_.size() || j < b.terms_.size()) {
            if (j == b.terms_.size() || (i < a.terms_.size() && a.terms_[i].e > b.terms_[j].e)) {
                r.terms_.push_back(a.terms_[i++]);
            } else if (i == a.terms_.size() || b.terms_[j].e > a.terms_[i].e) {
                Term t = b.terms_[j++];
                if (sign < 0) t.c = -t.c;
                r.terms_.push_back(std::move(t));
            } else {
                mpq_class c = sign > 0 ? mpq_class(a.terms_[i].c + b.terms_[j].c) : mpq_class(a.terms_[i].c - b.terms_[j].c);
                if (c != 0) r.terms_.push_back({a.terms_[i].e, c});
                ++i;
                ++j;
            }
        }
        return r;
    }

    std::size_t n_;
    std::vector<Term> terms_;
};

inline std::string var_name(std::size_t i) { return "u" + std::to_string(i + 1); }

inline std::string monomial_string(const Exponent& e, std::size_t nvars)
{
    std::string s;
    for (std::size_t i = 0; i < nvars; ++i) {
        if (e[i] == 0) continue;
        if (!s.empty()) s += ' ';
        s += var_name(i);
        if (e[i] > 1) s += '^' + std::to_string(e[i]);
    }
    return s.empty() ? "1" : s;
}

// Terms in the given order, e.g. "8 * u1 u2 u3 - 4 * u1 u2 + 1".
inline std::string to_string(const std::vector<Term>& terms, std::size_t nvars)
{
    if (terms.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& t : terms) {
        mpq_class c = t.c;
        if (first) {
            if (c < 0) {
                out += "-";
                c = -c;
            }
        } else {
            out += c < 0 ? " - " : " + ";
            if (c < 0) c = -c;
        }
        first = false;
        const bool unit = exp_degree(t.e) == 0;
        if (unit)
            out += c.get_str();
        else if (c == 1)
            out += monomial_string(t.e, nvars);
        else
            out += c.get_str() + " * " + monomial_string(t.e, nvars);
    }
    return out;
}

inline std::string to_string(const Polynomial& p) { return to_string(p.terms(), p.nvars()); }

// Inverse of to_string; accepts any term order and repeated monomials.
inline Polynomial parse_polynomial(const std::string& text, std::size_t nvars)
{
    std::vector<Term> terms;
    std::size_t i = 0;
    auto skip = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    auto fail = [&](const std::string& why) -> void {
        throw ValidationError("polynomial parse error at column " + std::to_string(i + 1) + ": " + why);
    };
    skip();
    if (text.compare(i, std::string::npos, "0") == 0) return Polynomial(nvars);
    int sign = 1;
    bool expect_term = true;
    while (true) {
        skip();
        if (i >= text.size()) break;
        if (!expect_term) {
            if (text[i] == '+') sign = 1;
            else if (text[i] == '-') sign = -1;
            else fail("expected + or -");
            ++i;
            expect_term = true;
            continue;
        }
        if (text[i] == '-' && terms.empty()) {
            sign = -sign;
            ++i;
            skip();
        }
        Term t;
        t.c = sign;
        bool have_coeff = false;
        if (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            std::size_t j = i;
            while (j < text.size() && (std::isdigit(static_cast<unsigned char>(text[j])) || text[j] == '/')) ++j;
            mpq_class c;
            if (c.set_str(text.substr(i, j - i), 10) != 0) fail("bad coefficient");
            c.canonicalize();
            t.c *= c;
            i = j;
            have_coeff = true;
            skip();
            if (i < text.size() && text[i] == '*') {
                ++i;
                skip();
            } else {
                terms.push_back(t);
                expect_term = false;
                continue;
            }
        }
        bool any = false;
        while (i < text.size() && text[i] == 'u') {
            ++i;
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            if (j == i) fail("expected variable index");
            const std::size_t v = std::stoul(text.substr(i, j - i));
            if (v == 0 || v > nvars) fail("variable index out of range");
            i = j;
            unsigned power = 1;
            if (i < text.size() && text[i] == '^') {
                ++i;
                std::size_t k = i;
                while (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) ++k;
                if (k == i) fail("expected exponent");
                power = static_cast<unsigned>(std::stoul(text.substr(i, k - i)));
                i = k;
            }
            t.e[v - 1] = static_cast<std::uint16_t>(t.e[v - 1] + power);
            any = true;
            skip();
        }
        if (!any && !have_coeff) fail("expected a term");
        if (!any && have_coeff) fail("expected a monomial after '*'");
        terms.push_back(t);
        expect_term = false;
    }
    if (expect_term && !terms.empty()) fail("dangling operator");
    if (terms.empty()) fail("empty polynomial");
    return Polynomial::from_terms(nvars, std::move(terms));
}

} // namespace nlad::sym
