#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "compacton/errors.hpp"
#include "compacton/pade_operators.hpp"

namespace compacton {

using Series = std::vector<std::complex<double>>;

/// Taylor coefficients in k of symbol(op, k, dx), up to and including k^order.
/// Built from the integer stencil moments sum_s c_s s^m, so there is no
/// cancellation at small k dx.
inline Series symbol_series(const CirculantPentaOperator& op, double dx, std::size_t order) {
    Series out(order + 1);
    std::complex<double> idx_pow{1.0, 0.0};
    double factorial = 1.0;
    for (std::size_t m = 0; m <= order; ++m) {
        if (m > 0) {
            idx_pow *= std::complex<double>(0.0, dx);
            factorial *= static_cast<double>(m);
        }
        double moment = 0.0;
        for (int s = -2; s <= 2; ++s) {
            double sm = 1.0;
            for (std::size_t p = 0; p < m; ++p) sm *= s;
            moment += op.coeffs[static_cast<std::size_t>(s + 2)] * sm;
        }
        out[m] = op.scale * idx_pow * (moment / factorial);
    }
    return out;
}

/// Power-series quotient num/den truncated at the common order.
inline Series series_divide(const Series& num, const Series& den) {
    if (den.empty() || den[0] == std::complex<double>{0.0, 0.0}) {
        throw InvalidArgument("series_divide: denominator must have a nonzero constant term");
    }
    const std::size_t order = std::min(num.size(), den.size());
    Series q(order);
    for (std::size_t m = 0; m < order; ++m) {
        std::complex<double> acc = num[m];
        for (std::size_t j = 1; j <= m; ++j) acc -= den[j] * q[m - j];
        q[m] = acc / den[0];
    }
    return q;
}

} // namespace compacton
