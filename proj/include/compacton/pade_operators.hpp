#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>

#include "compacton/errors.hpp"
#include "compacton/grid.hpp"

namespace compacton {

/// Five-point periodic stencil `scale * sum_s coeffs[s+2] * E^s`, where E is
/// the unit shift E u_j = u_{j+1}. Coefficients are the exact integer
/// numerators of the compact schemes; the rational denominator and the power
/// of the spacing are folded into `scale` once, at construction.
struct CirculantPentaOperator {
    std::array<double, 5> coeffs{};
    double scale = 1.0;

    double coefficient(int offset) const noexcept { return scale * coeffs[static_cast<std::size_t>(offset + 2)]; }

    double coefficient_sum() const noexcept {
        return scale * (coeffs[0] + coeffs[1] + coeffs[2] + coeffs[3] + coeffs[4]);
    }

    /// Infinity norm of the operator as a matrix (any M >= 5).
    double abs_row_sum() const noexcept {
        double s = 0.0;
        for (double c : coeffs) s += std::abs(c);
        return std::abs(scale) * s;
    }
};

/// The compact (Padé) operator family: A is the mass stencil and
/// A^{-1}B, A^{-1}S, A^{-1}C, A^{-1}D approximate d/dx .. d^4/dx^4.
struct OperatorSet {
    CirculantPentaOperator A;
    CirculantPentaOperator B;
    CirculantPentaOperator S;
    CirculantPentaOperator C;
    CirculantPentaOperator D;
    double dx = 0.0;
};

inline OperatorSet build_operator_set(double dx) {
    if (!(dx > 0.0) || !std::isfinite(dx)) {
        throw InvalidArgument("build_operator_set: dx must be positive and finite");
    }
    const double dx2 = dx * dx;
    OperatorSet ops;
    ops.dx = dx;
    ops.A = {{1.0, 26.0, 66.0, 26.0, 1.0}, 1.0 / 120.0};
    ops.B = {{-1.0, -10.0, 0.0, 10.0, 1.0}, 1.0 / (24.0 * dx)};
    ops.S = {{1.0, 2.0, -6.0, 2.0, 1.0}, 1.0 / (6.0 * dx2)};
    ops.C = {{-1.0, 2.0, 0.0, -2.0, 1.0}, 1.0 / (2.0 * dx2 * dx)};
    ops.D = {{1.0, -4.0, 6.0, -4.0, 1.0}, 1.0 / (dx2 * dx2)};
    return ops;
}

/// out_j = scale * sum_{s=-2..2} c_s u_{(j+s) mod M}. `out` must not alias `u`.
inline void apply_into(const CirculantPentaOperator& op, std::span<const double> u, std::span<double> out) {
    const std::size_t m = u.size();
    const auto& c = op.coeffs;
    auto at = [&](std::size_t j, int s) {
        const std::ptrdiff_t k = static_cast<std::ptrdiff_t>(j) + s;
        const auto mm = static_cast<std::ptrdiff_t>(m);
        return u[static_cast<std::size_t>(k < 0 ? k + mm : (k >= mm ? k - mm : k))];
    };
    auto edge = [&](std::size_t j) {
        out[j] = op.scale * (c[0] * at(j, -2) + c[1] * at(j, -1) + c[2] * u[j] + c[3] * at(j, 1) + c[4] * at(j, 2));
    };
    edge(0);
    edge(1);
    for (std::size_t j = 2; j + 2 < m; ++j) {
        out[j] = op.scale * (c[0] * u[j - 2] + c[1] * u[j - 1] + c[2] * u[j] + c[3] * u[j + 1] + c[4] * u[j + 2]);
    }
    edge(m - 2);
    edge(m - 1);
}

inline Field apply(const CirculantPentaOperator& op, std::span<const double> u, const PeriodicGrid& grid) {
    grid.require_conforming(u, "apply");
    Field out(u.size());
    apply_into(op, u, out);
    return out;
}

/// Fourier symbol: the eigenvalue of the operator on the mode exp(i k x).
inline std::complex<double> symbol(const CirculantPentaOperator& op, double k, double dx) {
    std::complex<double> acc{0.0, 0.0};
    for (int s = -2; s <= 2; ++s) {
        const double theta = static_cast<double>(s) * k * dx;
        acc += op.coeffs[static_cast<std::size_t>(s + 2)] * std::complex<double>(std::cos(theta), std::sin(theta));
    }
    return op.scale * acc;
}

} // namespace compacton
