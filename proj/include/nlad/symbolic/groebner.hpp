#pragma once

#include "polynomial.hpp"

#include <json.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

namespace nlad::sym {

// Lex order given as a ranking of variables, most significant first (0-based).
struct LexOrder {
    std::vector<std::size_t> rank;

    static LexOrder natural(std::size_t n)
    {
        LexOrder o;
        o.rank.resize(n);
        std::iota(o.rank.begin(), o.rank.end(), 0);
        return o;
    }

    void validate(std::size_t n) const
    {
        std::vector<std::size_t> s = rank;
        std::sort(s.begin(), s.end());
        if (s.size() != n) throw ValidationError("variable order must list every variable once");
        for (std::size_t i = 0; i < n; ++i)
            if (s[i] != i) throw ValidationError("variable order must be a permutation");
    }

    std::string describe() const
    {
        std::string s = "lex(";
        for (std::size_t i = 0; i < rank.size(); ++i) s += (i ? " > " : "") + var_name(rank[i]);
        return s + ")";
    }

    // Move variable rank[k] into slot k so the order becomes plain lex on the slots.
    Exponent to_slots(const Exponent& e) const
    {
        Exponent r{};
        for (std::size_t k = 0; k < rank.size(); ++k) r[k] = e[rank[k]];
        return r;
    }
    Exponent from_slots(const Exponent& e) const
    {
        Exponent r{};
        for (std::size_t k = 0; k < rank.size(); ++k) r[rank[k]] = e[k];
        return r;
    }
};

inline std::vector<LexOrder> all_lex_orders(std::size_t n)
{
    std::vector<LexOrder> out;
    LexOrder o = LexOrder::natural(n);
    do out.push_back(o);
    while (std::next_permutation(o.rank.begin(), o.rank.end()));
    return out;
}

struct GroebnerCaps {
    std::size_t max_pairs = 10000;
    std::size_t max_coefficient_bits = 8u * 1024u * 1024u;
};

struct GroebnerResult {
    LexOrder order;
    std::size_t nvars = 0;
    std::vector<std::vector<Term>> basis;        // original variable labels, terms in `order`
    std::vector<Exponent> leading;               // original labels
    bool zero_dimensional = false;
    std::vector<int> pure_power;                 // per variable; -1 if no pure-power leading monomial
    std::size_t pairs_processed = 0;

    bool inconsistent() const { return basis.size() == 1 && exp_degree(leading[0]) == 0; }
};

namespace detail {

using Poly = std::map<Exponent, mpq_class, std::greater<>>;   // slot lex, leading term first

inline Poly to_slots(const Polynomial& p, const LexOrder& o)
{
    Poly r;
    for (const auto& t : p.terms()) r.emplace(o.to_slots(t.e), t.c);
    return r;
}

inline void make_monic(Poly& p)
{
    if (p.empty()) return;
    const mpq_class inv = 1 / p.begin()->second;
    for (auto& [e, c] : p) c *= inv;
}

// p -= c * x^shift * g
inline void sub_scaled(Poly& p, const mpq_class& c, const Exponent& shift, const Poly& g)
{
    for (const auto& [e, gc] : g) {
        const Exponent m = exp_add(e, shift);
        auto it = p.find(m);
        if (it == p.end()) {
            p.emplace(m, -c * gc);
        } else {
            it->second -= c * gc;
            if (it->second == 0) p.erase(it);
        }
    }
}

inline std::size_t coefficient_bits(const Poly& p)
{
    std::size_t b = 0;
    for (const auto& [e, c] : p)
        b = std::max({b, mpz_sizeinbase(c.get_num_mpz_t(), 2), mpz_sizeinbase(c.get_den_mpz_t(), 2)});
    return b;
}

// Full reduction of p by the monic polynomials `by`.
inline Poly reduce(Poly p, const std::vector<const Poly*>& by)
{
    Poly rem;
    while (!p.empty()) {
        auto lt = p.begin();
        const Poly* hit = nullptr;
        for (const Poly* g : by)
            if (exp_divides(g->begin()->first, lt->first)) {
                hit = g;
                break;
            }
        if (hit) {
            const mpq_class c = lt->second;
            const Exponent shift = exp_sub(lt->first, hit->begin()->first);
            sub_scaled(p, c, shift, *hit);
        } else {
            rem.insert(*lt);
            p.erase(lt);
        }
    }
    return rem;
}

inline Poly spoly(const Poly& f, const Poly& g)
{
    const Exponent l = exp_lcm(f.begin()->first, g.begin()->first);
    Poly r;
    const Exponent sf = exp_sub(l, f.begin()->first), sg = exp_sub(l, g.begin()->first);
    for (const auto& [e, c] : f) r.emplace(exp_add(e, sf), c / f.begin()->second);
    sub_scaled(r, 1 / g.begin()->second, sg, g);
    return r;
}

} // namespace detail

// Reduced Groebner basis under a lex order; Buchberger with the Gebauer-Moeller pair criteria.
inline GroebnerResult buchberger(const std::vector<Polynomial>& input, const LexOrder& order,
                                 const GroebnerCaps& caps = {})
{
    using namespace detail;
    if (input.empty()) throw ValidationError("empty polynomial system");
    const std::size_t n = input[0].nvars();
    for (const auto& p : input)
        if (p.nvars() != n) throw DimensionError("polynomials have different variable counts");
    order.validate(n);

    std::vector<Poly> f;
    for (const auto& p : input) {
        Poly q = to_slots(p, order);
        if (q.empty()) continue;
        make_monic(q);
        f.push_back(std::move(q));
    }
    GroebnerResult res;
    res.order = order;
    res.nvars = n;
    if (f.empty()) throw ValidationError("polynomial system contains only zeros");

    auto lm = [&](std::size_t i) -> const Exponent& { return f[i].begin()->first; };
    auto coprime = [](const Exponent& a, const Exponent& b) {
        for (std::size_t i = 0; i < kMaxVars; ++i)
            if (a[i] && b[i]) return false;
        return true;
    };
    using Pair = std::pair<std::size_t, std::size_t>;
    std::set<std::size_t> G;
    std::set<Pair> B;

    auto update = [&](std::size_t ih) {
        const Exponent& mh = lm(ih);
        std::vector<std::size_t> C(G.begin(), G.end());
        std::vector<std::size_t> D;
        for (std::size_t a = 0; a < C.size(); ++a) {
            const std::size_t ig = C[a];
            const Exponent l = exp_lcm(mh, lm(ig));
            bool keep = coprime(mh, lm(ig));
            if (!keep) {
                keep = true;
                for (std::size_t b = a + 1; b < C.size() && keep; ++b)
                    if (exp_divides(exp_lcm(mh, lm(C[b])), l)) keep = false;
                for (std::size_t d : D)
                    if (keep && exp_divides(exp_lcm(mh, lm(d)), l)) keep = false;
            }
            if (keep) D.push_back(ig);
        }
        std::set<Pair> next;
        for (const auto& [i1, i2] : B) {
            const Exponent l12 = exp_lcm(lm(i1), lm(i2));
            if (!exp_divides(mh, l12) || exp_lcm(lm(i1), mh) == l12 || exp_lcm(lm(i2), mh) == l12)
                next.insert({i1, i2});
        }
        for (std::size_t ig : D)
            if (!coprime(mh, lm(ig))) next.insert({ig, ih});
        B = std::move(next);
        std::set<std::size_t> g2;
        for (std::size_t ig : G)
            if (!exp_divides(mh, lm(ig))) g2.insert(ig);
        g2.insert(ih);
        G = std::move(g2);
    };

    for (std::size_t i = 0; i < f.size(); ++i) update(i);

    while (!B.empty()) {
        // normal selection: smallest lcm in the order, ties by pair indices
        auto best = B.begin();
        Exponent best_l = exp_lcm(lm(best->first), lm(best->second));
        for (auto it = std::next(B.begin()); it != B.end(); ++it) {
            const Exponent l = exp_lcm(lm(it->first), lm(it->second));
            if (l < best_l) {
                best = it;
                best_l = l;
            }
        }
        const Pair pr = *best;
        B.erase(best);
        if (++res.pairs_processed > caps.max_pairs)
            throw ResourceCapError("Groebner computation exceeded " + std::to_string(caps.max_pairs) + " S-pairs");
        std::vector<const Poly*> by;
        for (std::size_t ig : G) by.push_back(&f[ig]);
        Poly h = reduce(spoly(f[pr.first], f[pr.second]), by);
        if (h.empty()) continue;
        make_monic(h);
        if (coefficient_bits(h) > caps.max_coefficient_bits)
            throw ResourceCapError("Groebner coefficient exceeded the size cap");
        f.push_back(std::move(h));
        update(f.size() - 1);
    }

    // minimal then reduced basis
    std::vector<std::size_t> gs(G.begin(), G.end());
    std::vector<std::size_t> minimal;
    for (std::size_t a : gs) {
        bool redundant = false;
        for (std::size_t b : gs)
            if (a != b && exp_divides(lm(b), lm(a)) && (lm(b) != lm(a) || b < a)) redundant = true;
        if (!redundant) minimal.push_back(a);
    }
    std::vector<Poly> reduced;
    for (std::size_t a : minimal) {
        std::vector<const Poly*> others;
        for (std::size_t b : minimal)
            if (b != a) others.push_back(&f[b]);
        Poly tail = f[a];
        const auto lead = *tail.begin();
        tail.erase(tail.begin());
        Poly r = reduce(std::move(tail), others);
        r.insert(lead);
        make_monic(r);
        reduced.push_back(std::move(r));
    }
    std::sort(reduced.begin(), reduced.end(),
              [](const Poly& a, const Poly& b) { return a.begin()->first > b.begin()->first; });

    res.pure_power.assign(n, -1);
    for (const auto& r : reduced) {
        std::vector<Term> terms;
        for (const auto& [e, c] : r) terms.push_back({order.from_slots(e), c});
        const Exponent lead = terms.front().e;
        res.leading.push_back(lead);
        res.basis.push_back(std::move(terms));
        std::size_t nonzero = 0, var = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (lead[i]) {
                ++nonzero;
                var = i;
            }
        if (nonzero == 0) {
            for (auto& pp : res.pure_power) pp = 0;
        } else if (nonzero == 1) {
            const int e = lead[var];
            if (res.pure_power[var] < 0 || e < res.pure_power[var]) res.pure_power[var] = e;
        }
    }
    res.zero_dimensional = std::all_of(res.pure_power.begin(), res.pure_power.end(), [](int e) { return e >= 0; });
    return res;
}

inline nlohmann::ordered_json to_json(const GroebnerResult& r)
{
    nlohmann::ordered_json j;
    j["order"] = r.order.describe();
    j["zero_dimensional"] = r.zero_dimensional;
    j["inconsistent"] = r.inconsistent();
    j["pairs_processed"] = r.pairs_processed;
    nlohmann::ordered_json pp = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < r.nvars; ++i)
        pp[var_name(i)] = r.pure_power[i] >= 0 ? nlohmann::ordered_json(r.pure_power[i]) : nlohmann::ordered_json(nullptr);
    j["pure_power_exponents"] = pp;
    j["leading_monomials"] = nlohmann::ordered_json::array();
    for (const auto& e : r.leading) j["leading_monomials"].push_back(monomial_string(e, r.nvars));
    j["basis"] = nlohmann::ordered_json::array();
    for (const auto& b : r.basis) j["basis"].push_back(to_string(b, r.nvars));
    return j;
}

} // namespace nlad::sym
