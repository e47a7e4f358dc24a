#pragma once

#include "../model.hpp"
#include "polynomial.hpp"
#include "rational.hpp"

#include <vector>

namespace nlad::sym {

struct RationalParams {
    std::size_t n = 0;
    std::vector<mpq_class> diffusion;
    std::vector<std::vector<mpq_class>> gamma;

    void validate() const
    {
        if (n < 1 || n > 4) throw DimensionError("symbolic analysis supports 1 to 4 species");
        if (diffusion.size() != n || gamma.size() != n) throw DimensionError("D and gamma need N entries");
        for (const auto& row : gamma)
            if (row.size() != n) throw DimensionError("gamma must be N x N");
        for (const auto& d : diffusion)
            if (d <= 0) throw ValidationError("diffusion coefficients must be positive");
    }

    static RationalParams from(const ModelParams& p)
    {
        RationalParams r;
        r.n = p.n;
        for (double d : p.diffusion) r.diffusion.push_back(to_rational(d));
        for (const auto& row : p.gamma) {
            r.gamma.emplace_back();
            for (double g : row) r.gamma.back().push_back(to_rational(g));
        }
        r.validate();
        return r;
    }
};

using PolyMatrix = std::vector<std::vector<Polynomial>>;

inline void check_square(const PolyMatrix& m)
{
    if (m.empty()) throw DimensionError("empty matrix");
    for (const auto& row : m)
        if (row.size() != m.size()) throw DimensionError("matrix is not square");
}

// Entry (i, j) = gamma_ij u_i + D_i delta_ij.
inline PolyMatrix steady_matrix(const RationalParams& p)
{
    p.validate();
    PolyMatrix m(p.n);
    for (std::size_t i = 0; i < p.n; ++i)
        for (std::size_t j = 0; j < p.n; ++j) {
            Polynomial e = p.gamma[i][j] * Polynomial::variable(p.n, i);
            if (i == j) e += Polynomial::constant(p.n, p.diffusion[i]);
            m[i].push_back(e);
        }
    return m;
}

// Laplace expansion along the first row.
inline Polynomial determinant(const PolyMatrix& m)
{
    check_square(m);
    const std::size_t n = m.size();
    if (n > 4) throw UnsupportedError("determinants are limited to dimension 4");
    const std::size_t nv = m[0][0].nvars();
    if (n == 1) return m[0][0];
    Polynomial det(nv);
    for (std::size_t c = 0; c < n; ++c) {
        if (m[0][c].is_zero()) continue;
        PolyMatrix minor;
        for (std::size_t r = 1; r < n; ++r) {
            minor.emplace_back();
            for (std::size_t k = 0; k < n; ++k)
                if (k != c) minor.back().push_back(m[r][k]);
        }
        const Polynomial term = m[0][c] * determinant(minor);
        det = (c % 2 == 0) ? det + term : det - term;
    }
    return det;
}

inline std::vector<Polynomial> gradient(const Polynomial& p)
{
    std::vector<Polynomial> g;
    for (std::size_t i = 0; i < p.nvars(); ++i) g.push_back(p.derivative(i));
    return g;
}

// First row: gradient of det(m); then the kept rows of m (0-based), in the given order.
inline PolyMatrix augment_chain(const PolyMatrix& m, const std::vector<std::size_t>& keep_rows)
{
    check_square(m);
    const std::size_t n = m.size();
    if (m[0][0].nvars() != n) throw DimensionError("chain matrices must have one column per variable");
    if (keep_rows.size() + 1 != n) throw DimensionError("augment_chain keeps exactly N-1 rows");
    for (std::size_t r : keep_rows)
        if (r >= n) throw DimensionError("row index out of range");
    PolyMatrix out;
    out.push_back(gradient(determinant(m)));
    for (std::size_t r : keep_rows) out.push_back(m[r]);
    return out;
}

} // namespace nlad::sym
