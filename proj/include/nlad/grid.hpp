#pragma once

#include "errors.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

namespace nlad {

inline bool is_power_of_two(std::size_t m) { return m != 0 && (m & (m - 1)) == 0; }

// Uniform cell-centred grid on the periodic interval [0, L).
class Grid {
public:
    Grid(std::size_t m, double length) : m_(m), length_(length)
    {
        if (m < 16 || !is_power_of_two(m))
            throw ValidationError("grid size M must be a power of two >= 16, got " + std::to_string(m));
        if (!(length > 0.0) || !std::isfinite(length))
            throw ValidationError("domain length L must be positive and finite");
    }

    std::size_t size() const { return m_; }
    double length() const { return length_; }
    double spacing() const { return length_ / static_cast<double>(m_); }
    double x(std::size_t k) const { return (static_cast<double>(k) + 0.5) * spacing(); }
    double wavenumber(std::size_t q) const { return 2.0 * std::numbers::pi * static_cast<double>(q) / length_; }

    bool operator==(const Grid&) const = default;

private:
    std::size_t m_;
    double length_;
};

} // namespace nlad
