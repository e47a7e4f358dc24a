#pragma once

#include "matrix.hpp"

#include <vector>

namespace nlad::sym {

// One chain link: augment matrix number `from` (0 = steady matrix, k = k-th link) keeping `rows`.
struct ChainStep {
    std::size_t from = 0;
    std::vector<std::size_t> rows;   // 0-based
};

// Links that extend A_1 to A_N by always keeping the first N-1 rows of the latest matrix.
inline std::vector<ChainStep> default_chain(std::size_t n)
{
    std::vector<ChainStep> out;
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r + 1 < n; ++r) rows.push_back(r);
    for (std::size_t k = 0; k + 1 < n; ++k) out.push_back({k, rows});
    return out;
}

struct ChainSystem {
    std::vector<PolyMatrix> matrices;
    std::vector<Polynomial> determinants;
};

inline ChainSystem build_chain(const RationalParams& p, const std::vector<ChainStep>& chain)
{
    ChainSystem s;
    s.matrices.push_back(steady_matrix(p));
    for (const auto& step : chain) {
        if (step.from >= s.matrices.size()) throw ValidationError("chain step refers to a matrix not yet built");
        s.matrices.push_back(augment_chain(s.matrices[step.from], step.rows));
    }
    for (const auto& m : s.matrices) s.determinants.push_back(determinant(m));
    return s;
}

} // namespace nlad::sym
