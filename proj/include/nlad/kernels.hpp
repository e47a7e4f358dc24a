#pragma once

#include "errors.hpp"
#include "fft.hpp"
#include "grid.hpp"

#include <cmath>
#include <vector>

namespace nlad {

struct KernelSpec {
    enum class Kind { TopHat, Delta };
    Kind kind = Kind::Delta;
    double alpha = 0.0;

    static KernelSpec top_hat(double alpha) { return {Kind::TopHat, alpha}; }
    static KernelSpec delta() { return {Kind::Delta, 0.0}; }

    bool is_delta() const { return kind == Kind::Delta; }
    bool operator==(const KernelSpec&) const = default;
};

inline void validate_kernel(const KernelSpec& k, double length)
{
    if (k.is_delta()) return;
    if (!(k.alpha > 0.0) || !std::isfinite(k.alpha))
        throw ValidationError("top-hat half-width alpha must be positive");
    if (!(2.0 * k.alpha < length))
        throw ValidationError("top-hat support 2*alpha must be smaller than L");
}

inline double torus_distance(double x, double length)
{
    return std::abs(x - length * std::round(x / length));
}

inline double kernel_eval(const KernelSpec& k, double x, double length)
{
    if (k.is_delta()) throw UnsupportedError("the delta kernel has no pointwise values");
    validate_kernel(k, length);
    return torus_distance(x, length) <= k.alpha ? 0.5 / k.alpha : 0.0;
}

inline double kernel_fourier(const KernelSpec& k, double kappa)
{
    if (k.is_delta()) return 1.0;
    const double z = kappa * k.alpha;
    if (std::abs(z) < 1e-4) return 1.0 - z * z / 6.0;
    return std::sin(z) / z;
}

// Multiplier table for modes q = 0..M/2.
inline std::vector<double> kernel_symbols(const KernelSpec& k, const Grid& g)
{
    std::vector<double> s(g.size() / 2 + 1);
    for (std::size_t q = 0; q < s.size(); ++q) s[q] = kernel_fourier(k, g.wavenumber(q));
    return s;
}

inline std::vector<double> periodic_convolve(const std::vector<double>& f, const KernelSpec& k, const Grid& g)
{
    if (f.size() != g.size()) throw DimensionError("field length does not match grid");
    validate_kernel(k, g.length());
    if (k.is_delta()) return f;
    const auto& fft = fft_for(g.size());
    auto spec = fft.forward(f);
    const auto sym = kernel_symbols(k, g);
    for (std::size_t q = 0; q < spec.size(); ++q) spec[q] *= sym[q];
    return fft.inverse(spec);
}

} // namespace nlad
