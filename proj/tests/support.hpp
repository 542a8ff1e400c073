#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <vector>

#include "compacton/grid.hpp"

namespace testing_support {

inline compacton::Field random_field(std::size_t m, unsigned seed, double lo = -1.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    compacton::Field u(m);
    for (auto& v : u) v = dist(rng);
    return u;
}

/// Smooth, strictly positive periodic field on the grid.
inline compacton::Field smooth_positive(const compacton::PeriodicGrid& grid, double base = 1.0, double amp = 0.3) {
    compacton::Field u(grid.size());
    const double k = 2.0 * std::numbers::pi / grid.length();
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double x = grid.x(j);
        u[j] = base + amp * std::sin(k * x) + 0.5 * amp * std::cos(2.0 * k * x + 0.3);
    }
    return u;
}

inline double max_diff(const compacton::Field& a, const compacton::Field& b) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

/// (R u)_j = u_{-j mod M}: reflection x -> -x about node 0.
inline compacton::Field reflect(const compacton::Field& u) {
    const std::size_t m = u.size();
    compacton::Field r(m);
    for (std::size_t j = 0; j < m; ++j) r[j] = u[(m - j) % m];
    return r;
}

} // namespace testing_support
