#pragma once

#include "chain.hpp"
#include "groebner.hpp"
#include "solve_n2.hpp"

#include <optional>
#include <vector>

namespace nlad::sym {

struct FinitenessVerdict {
    ChainSystem system;
    GroebnerResult groebner;
    bool finite = false;
    std::optional<std::size_t> n2_real_roots;   // two species only, from solve_n2
};

inline FinitenessVerdict finiteness_verdict(const RationalParams& p, const std::vector<ChainStep>& chain,
                                            const LexOrder& order, const GroebnerCaps& caps = {})
{
    FinitenessVerdict v;
    v.system = build_chain(p, chain);
    v.groebner = buchberger(v.system.determinants, order, caps);
    v.finite = v.groebner.zero_dimensional;
    if (p.n == 2) {
        const auto r = solve_n2(p);
        if (!r.degenerate) v.n2_real_roots = r.solutions.size();
    }
    return v;
}

} // namespace nlad::sym
