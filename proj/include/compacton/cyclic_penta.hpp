#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "compacton/errors.hpp"
#include "compacton/grid.hpp"
#include "compacton/pade_operators.hpp"

namespace compacton {

/// M x M periodic pentadiagonal matrix. Row j holds the entries at columns
/// (j-2 .. j+2) mod M. Sums of circulant stencils, stencils right-multiplied
/// by a diagonal, and plain diagonals all stay in this form.
class CyclicPentaMatrix {
public:
    using Row = std::array<double, 5>;

    explicit CyclicPentaMatrix(std::size_t n) : rows_(n, Row{}) {
        if (n < PeriodicGrid::kMinNodes) {
            throw InvalidArgument("CyclicPentaMatrix: need at least 5 rows");
        }
    }

    static CyclicPentaMatrix circulant(const CirculantPentaOperator& op, std::size_t n, double weight = 1.0) {
        CyclicPentaMatrix m(n);
        m.add(op, weight);
        return m;
    }

    std::size_t size() const noexcept { return rows_.size(); }
    const Row& row(std::size_t j) const noexcept { return rows_[j]; }
    Row& row(std::size_t j) noexcept { return rows_[j]; }

    void set_zero() noexcept { std::fill(rows_.begin(), rows_.end(), Row{}); }

    /// this += weight * op
    CyclicPentaMatrix& add(const CirculantPentaOperator& op, double weight) {
        Row c{};
        for (std::size_t s = 0; s < 5; ++s) c[s] = weight * op.scale * op.coeffs[s];
        for (auto& r : rows_) {
            for (std::size_t s = 0; s < 5; ++s) r[s] += c[s];
        }
        return *this;
    }

    /// this += weight * op * diag(d): column (j+s) of the stencil is scaled by d_{j+s}.
    CyclicPentaMatrix& add_column_scaled(const CirculantPentaOperator& op, double weight, std::span<const double> d) {
        require(d.size());
        const std::size_t n = rows_.size();
        Row c{};
        for (std::size_t s = 0; s < 5; ++s) c[s] = weight * op.scale * op.coeffs[s];
        for (std::size_t j = 0; j < n; ++j) {
            for (int s = -2; s <= 2; ++s) {
                const std::size_t col = wrap(j, s);
                rows_[j][static_cast<std::size_t>(s + 2)] += c[static_cast<std::size_t>(s + 2)] * d[col];
            }
        }
        return *this;
    }

    CyclicPentaMatrix& add_diagonal(std::span<const double> d) {
        require(d.size());
        for (std::size_t j = 0; j < rows_.size(); ++j) rows_[j][2] += d[j];
        return *this;
    }

    void multiply_into(std::span<const double> x, std::span<double> y) const {
        require(x.size());
        require(y.size());
        const std::size_t n = rows_.size();
        for (std::size_t j = 0; j < n; ++j) {
            const Row& r = rows_[j];
            double acc = 0.0;
            for (int s = -2; s <= 2; ++s) acc += r[static_cast<std::size_t>(s + 2)] * x[wrap(j, s)];
            y[j] = acc;
        }
    }

    Field multiply(std::span<const double> x) const {
        Field y(rows_.size());
        multiply_into(x, y);
        return y;
    }

    double max_abs() const noexcept {
        double m = 0.0;
        for (const auto& r : rows_) {
            for (double v : r) m = std::max(m, std::abs(v));
        }
        return m;
    }

    double norm_inf() const noexcept {
        double m = 0.0;
        for (const auto& r : rows_) {
            double s = 0.0;
            for (double v : r) s += std::abs(v);
            m = std::max(m, s);
        }
        return m;
    }

    std::size_t wrap(std::size_t j, int s) const noexcept {
        const auto n = static_cast<std::ptrdiff_t>(rows_.size());
        std::ptrdiff_t k = static_cast<std::ptrdiff_t>(j) + s;
        if (k < 0) k += n;
        if (k >= n) k -= n;
        return static_cast<std::size_t>(k);
    }

private:
    void require(std::size_t len) const {
        if (len != rows_.size()) {
            throw InvalidArgument("CyclicPentaMatrix: vector length " + std::to_string(len) +
                                  " does not match matrix size " + std::to_string(rows_.size()));
        }
    }

    std::vector<Row> rows_;
};

/// LU factorization of a CyclicPentaMatrix in O(M).
///
/// The matrix is split into its non-periodic band (|i-j| <= 2) plus at most
/// six wrap-around corner entries, which live in rows 0, 1, M-2 and M-1. The
/// band is factored by Gaussian elimination with partial pivoting (upper
/// bandwidth grows to 4); the corners are a rank-4 update handled by the
/// Sherman-Morrison-Woodbury formula with a 4x4 capacitance system.
///
/// A factorization object owns its workspace and may be refactored in place.
class CyclicPentaFactorization {
public:
    /// Pivots smaller than this multiple of the largest matrix entry count as zero.
    static constexpr double kRelativePivotFloor = 64.0 * std::numeric_limits<double>::epsilon();

    CyclicPentaFactorization() = default;
    explicit CyclicPentaFactorization(const CyclicPentaMatrix& m) { factor(m); }

    void factor(const CyclicPentaMatrix& m) {
        n_ = m.size();
        upper_.resize(n_);
        lower_.resize(n_);
        pivot_.resize(n_);
        const double floor = kRelativePivotFloor * std::max(m.max_abs(), std::numeric_limits<double>::min());
        factor_band(m, floor);
        factor_corners(m);
    }

    std::size_t size() const noexcept { return n_; }

    /// Solves in place.
    void solve_in_place(std::span<double> x) const {
        if (x.size() != n_) {
            throw InvalidArgument("CyclicPentaFactorization::solve: rhs length mismatch");
        }
        band_solve(x);
        std::array<double, 4> vy{};
        for (std::size_t a = 0; a < 4; ++a) vy[a] = corner_dot(a, x);
        const auto w = cap_solve(vy);
        for (std::size_t b = 0; b < 4; ++b) {
            if (w[b] == 0.0) continue;
            const double* z = &woodbury_[b * n_];
            for (std::size_t i = support_[b].first; i < support_[b].second; ++i) x[i] -= z[i] * w[b];
        }
    }

    Field solve(std::span<const double> rhs) const {
        Field x(rhs.begin(), rhs.end());
        solve_in_place(x);
        return x;
    }

private:
    using Window = std::array<double, 5>;

    // Band entry of row r at column col (corner entries excluded).
    static double band_entry(const CyclicPentaMatrix& m, std::size_t r, std::ptrdiff_t col) {
        const auto n = static_cast<std::ptrdiff_t>(m.size());
        const std::ptrdiff_t s = col - static_cast<std::ptrdiff_t>(r);
        if (s < -2 || s > 2 || col < 0 || col >= n) return 0.0;
        return m.row(r)[static_cast<std::size_t>(s + 2)];
    }

    static Window load(const CyclicPentaMatrix& m, std::size_t r, std::size_t start) {
        Window w{};
        for (std::size_t k = 0; k < 5; ++k) w[k] = band_entry(m, r, static_cast<std::ptrdiff_t>(start + k));
        return w;
    }

    void factor_band(const CyclicPentaMatrix& m, double floor) {
        // Three live rows, each a window over columns k..k+4.
        std::array<Window, 3> live{};
        for (std::size_t i = 0; i < 3 && i < n_; ++i) live[i] = load(m, i, 0);

        for (std::size_t k = 0; k < n_; ++k) {
            const std::size_t active = std::min<std::size_t>(3, n_ - k);
            std::size_t p = 0;
            for (std::size_t i = 1; i < active; ++i) {
                if (std::abs(live[i][0]) > std::abs(live[p][0])) p = i;
            }
            if (p != 0) std::swap(live[0], live[p]);
            pivot_[k] = static_cast<std::uint8_t>(p);

            const double piv = live[0][0];
            if (!(std::abs(piv) > floor)) {
                throw NumericalFailure("cyclic pentadiagonal solve: band elimination pivot below threshold at row " +
                                           std::to_string(k),
                                       std::abs(piv));
            }
            upper_[k] = live[0];
            lower_[k] = {0.0, 0.0};
            for (std::size_t i = 1; i < active; ++i) {
                const double l = live[i][0] / piv;
                lower_[k][i - 1] = l;
                if (l != 0.0) {
                    for (std::size_t c = 1; c < 5; ++c) live[i][c] -= l * live[0][c];
                }
            }
            // Shift rows up one slot and the windows right one column.
            for (std::size_t i = 0; i < 2; ++i) {
                for (std::size_t c = 0; c < 4; ++c) live[i][c] = live[i + 1][c + 1];
                live[i][4] = 0.0;
            }
            if (k + 5 < n_) live[2] = m.row(k + 3);
            else if (k + 3 < n_) live[2] = load(m, k + 3, k + 1);
            else live[2] = Window{};
        }
    }

    void band_solve(std::span<double> x) const {
        const std::size_t n = n_;
        for (std::size_t k = 0; k < n; ++k) {
            if (pivot_[k] != 0) std::swap(x[k], x[k + pivot_[k]]);
            const double xk = x[k];
            if (xk == 0.0) continue;
            if (k + 1 < n) x[k + 1] -= lower_[k][0] * xk;
            if (k + 2 < n) x[k + 2] -= lower_[k][1] * xk;
        }
        for (std::size_t kk = n; kk-- > 0;) {
            const Window& u = upper_[kk];
            double s = x[kk];
            for (std::size_t c = 1; c < 5 && kk + c < n; ++c) s -= u[c] * x[kk + c];
            x[kk] = s / u[0];
        }
    }

    // Band solve for the unit vector e_idx. The solution decays away from
    // idx, so both sweeps stop once they run into a stretch of exact zeros.
    // Returns the half-open index range outside of which the result is zero.
    std::pair<std::size_t, std::size_t> band_solve_unit(std::size_t idx, std::span<double> x) const {
        const std::size_t n = n_;
        x[idx] = 1.0;
        const std::size_t first = idx >= 2 ? idx - 2 : 0;
        std::size_t end = n;
        for (std::size_t k = first; k < n; ++k) {
            if (pivot_[k] != 0) std::swap(x[k], x[k + pivot_[k]]);
            const double xk = x[k];
            if (xk == 0.0) {
                if (k > idx && (k + 1 >= n || x[k + 1] == 0.0) && (k + 2 >= n || x[k + 2] == 0.0)) {
                    end = k;
                    break;
                }
                continue;
            }
            if (k + 1 < n) x[k + 1] -= lower_[k][0] * xk;
            if (k + 2 < n) x[k + 2] -= lower_[k][1] * xk;
        }
        std::size_t begin = 0;
        std::size_t zeros = 0;
        for (std::size_t kk = end; kk-- > 0;) {
            const Window& u = upper_[kk];
            double s = x[kk];
            for (std::size_t c = 1; c < 5 && kk + c < n; ++c) s -= u[c] * x[kk + c];
            x[kk] = s / u[0];
            if (kk < first) {
                zeros = x[kk] == 0.0 ? zeros + 1 : 0;
                if (zeros == 4) {
                    begin = kk;
                    break;
                }
            }
        }
        return {begin, end};
    }

    // Corner rows: 0, 1, n-2, n-1. corner_[a] lists (column, value) pairs.
    struct CornerRow {
        std::size_t row = 0;
        std::array<std::size_t, 2> col{};
        std::array<double, 2> val{};
        std::size_t count = 0;
    };

    double corner_dot(std::size_t a, std::span<const double> x) const {
        const CornerRow& cr = corners_[a];
        double s = 0.0;
        for (std::size_t i = 0; i < cr.count; ++i) s += cr.val[i] * x[cr.col[i]];
        return s;
    }

    void factor_corners(const CyclicPentaMatrix& m) {
        const std::size_t n = n_;
        const std::array<std::size_t, 4> rows{0, 1, n - 2, n - 1};
        for (std::size_t a = 0; a < 4; ++a) {
            CornerRow cr;
            cr.row = rows[a];
            for (int s = -2; s <= 2; ++s) {
                const auto col = static_cast<std::ptrdiff_t>(rows[a]) + s;
                if (col >= 0 && col < static_cast<std::ptrdiff_t>(n)) continue;
                const double v = m.row(rows[a])[static_cast<std::size_t>(s + 2)];
                cr.col[cr.count] = m.wrap(rows[a], s);
                cr.val[cr.count] = v;
                ++cr.count;
            }
            corners_[a] = cr;
        }

        woodbury_.assign(4 * n, 0.0);
        for (std::size_t b = 0; b < 4; ++b) {
            support_[b] = band_solve_unit(rows[b], std::span<double>(&woodbury_[b * n], n));
        }
        for (std::size_t a = 0; a < 4; ++a) {
            for (std::size_t b = 0; b < 4; ++b) {
                cap_[a][b] = (a == b ? 1.0 : 0.0) + corner_dot(a, std::span<const double>(&woodbury_[b * n], n));
            }
        }
        // Dense LU with partial pivoting on the 4x4 capacitance matrix.
        double cap_scale = 0.0;
        for (const auto& r : cap_) {
            for (double v : r) cap_scale = std::max(cap_scale, std::abs(v));
        }
        for (std::size_t k = 0; k < 4; ++k) {
            std::size_t p = k;
            for (std::size_t i = k + 1; i < 4; ++i) {
                if (std::abs(cap_[i][k]) > std::abs(cap_[p][k])) p = i;
            }
            std::swap(cap_[k], cap_[p]);
            cap_pivot_[k] = p;
            const double piv = cap_[k][k];
            if (!(std::abs(piv) > 1e3 * kRelativePivotFloor * cap_scale) || !(std::abs(piv) > 0.0)) {
                throw NumericalFailure("cyclic pentadiagonal solve: periodic coupling system is singular", std::abs(piv));
            }
            for (std::size_t i = k + 1; i < 4; ++i) {
                const double l = cap_[i][k] / piv;
                cap_[i][k] = l;
                for (std::size_t c = k + 1; c < 4; ++c) cap_[i][c] -= l * cap_[k][c];
            }
        }
    }

    std::array<double, 4> cap_solve(std::array<double, 4> y) const {
        // Rows of cap_ were swapped whole, so all interchanges go first.
        for (std::size_t k = 0; k < 4; ++k) std::swap(y[k], y[cap_pivot_[k]]);
        for (std::size_t k = 0; k < 4; ++k) {
            for (std::size_t i = k + 1; i < 4; ++i) y[i] -= cap_[i][k] * y[k];
        }
        for (std::size_t k = 4; k-- > 0;) {
            double s = y[k];
            for (std::size_t c = k + 1; c < 4; ++c) s -= cap_[k][c] * y[c];
            y[k] = s / cap_[k][k];
        }
        return y;
    }

    std::size_t n_ = 0;
    std::vector<Window> upper_;
    std::vector<std::array<double, 2>> lower_;
    std::vector<std::uint8_t> pivot_;
    std::array<CornerRow, 4> corners_{};
    std::vector<double> woodbury_;
    std::array<std::pair<std::size_t, std::size_t>, 4> support_{};
    std::array<std::array<double, 4>, 4> cap_{};
    std::array<std::size_t, 4> cap_pivot_{};
};

/// Solves matrix * x = rhs with one step of iterative refinement.
inline Field solve_circulant_banded(const CyclicPentaMatrix& matrix, std::span<const double> rhs) {
    const CyclicPentaFactorization lu(matrix);
    Field x = lu.solve(rhs);
    Field r = matrix.multiply(x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = rhs[i] - r[i];
    lu.solve_in_place(r);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += r[i];
    return x;
}

} // namespace compacton
