#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "compacton/cyclic_penta.hpp"
#include "compacton/pade_operators.hpp"
#include "support.hpp"

using namespace compacton;
using testing_support::max_diff;
using testing_support::random_field;

namespace {

using Dense = std::vector<std::vector<double>>;

Dense to_dense(const CyclicPentaMatrix& m) {
    const std::size_t n = m.size();
    Dense a(n, std::vector<double>(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        for (int s = -2; s <= 2; ++s) a[j][m.wrap(j, s)] += m.row(j)[static_cast<std::size_t>(s + 2)];
    }
    return a;
}

// Plain Gaussian elimination with partial pivoting, used as the reference.
Field dense_solve(Dense a, Field b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
        }
        std::swap(a[k], a[p]);
        std::swap(b[k], b[p]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a[i][k] / a[k][k];
            for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
            b[i] -= f * b[k];
        }
    }
    Field x(n);
    for (std::size_t i = n; i-- > 0;) {
        double acc = b[i];
        for (std::size_t j = i + 1; j < n; ++j) acc -= a[i][j] * x[j];
        x[i] = acc / a[i][i];
    }
    return x;
}

CyclicPentaMatrix random_matrix(std::size_t n, unsigned seed, double diagonal_boost) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    CyclicPentaMatrix m(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (auto& v : m.row(j)) v = dist(rng);
        m.row(j)[2] += diagonal_boost;
    }
    return m;
}

} // namespace

TEST(CyclicPenta, IdentitySolve) {
    CyclicPentaMatrix m(9);
    m.add_diagonal(Field(9, 1.0));
    const Field b = random_field(9, 3);
    EXPECT_LT(max_diff(CyclicPentaFactorization(m).solve(b), b), 1e-15);
}

TEST(CyclicPenta, MassStencilPreservesConstants) {
    const auto ops = build_operator_set(0.1);
    const auto m = CyclicPentaMatrix::circulant(ops.A, 50);
    const Field x = CyclicPentaFactorization(m).solve(Field(50, 2.0));
    for (double v : x) EXPECT_NEAR(v, 2.0, 1e-14);
}

class CyclicPentaSizes : public ::testing::TestWithParam<std::size_t> {};

TEST_P(CyclicPentaSizes, MatchesDenseEliminationWithoutDominance) {
    const std::size_t n = GetParam();
    for (unsigned seed = 0; seed < 5; ++seed) {
        const auto m = random_matrix(n, 100 + seed + static_cast<unsigned>(n), 0.0);
        const Field b = random_field(n, seed);
        const Field ref = dense_solve(to_dense(m), b);
        const Field x = CyclicPentaFactorization(m).solve(b);
        double scale = 1.0;
        for (double v : ref) scale = std::max(scale, std::abs(v));
        EXPECT_LT(max_diff(x, ref), 1e-9 * scale) << "n=" << n << " seed=" << seed;
    }
}

TEST_P(CyclicPentaSizes, RoundTrip) {
    const std::size_t n = GetParam();
    const auto m = random_matrix(n, 7, 6.0);
    const Field x = random_field(n, 11);
    const Field b = m.multiply(x);
    EXPECT_LT(max_diff(solve_circulant_banded(m, b), x), 1e-13);
}

INSTANTIATE_TEST_SUITE_P(Sizes, CyclicPentaSizes, ::testing::Values(5, 6, 7, 8, 9, 10, 13, 31, 200));

TEST(CyclicPenta, NewtonLikeMatrix) {
    // Shape of the time-stepping Jacobian: A/dt minus a skew and a dissipative part,
    // with a variable nonlinear block.
    const std::size_t n = 500;
    const auto ops = build_operator_set(0.1);
    const Field d = random_field(n, 5, 0.0, 3.0);
    CyclicPentaMatrix m = CyclicPentaMatrix::circulant(ops.A, n, 10.0);
    m.add(ops.B, -0.25).add(ops.D, 0.5e-3).add_column_scaled(ops.B, 0.5, d).add_column_scaled(ops.C, 0.5, d);
    const Field x = random_field(n, 9);
    const Field b = m.multiply(x);
    const Field got = solve_circulant_banded(m, b);
    EXPECT_LT(max_diff(got, x), 1e-9);
}

TEST(CyclicPenta, SingularStencilThrows) {
    const auto ops = build_operator_set(0.1);
    // Constants span the null space of every difference stencil.
    for (const auto* op : {&ops.S, &ops.D}) {
        const auto m = CyclicPentaMatrix::circulant(*op, 40);
        try {
            CyclicPentaFactorization lu(m);
            FAIL() << "expected NumericalFailure";
        } catch (const NumericalFailure& e) {
            EXPECT_LE(std::abs(e.pivot()), 1e-8 * m.max_abs());
        }
    }
}

TEST(CyclicPenta, ZeroMatrixThrows) {
    EXPECT_THROW(CyclicPentaFactorization(CyclicPentaMatrix(12)), NumericalFailure);
}

TEST(CyclicPenta, SizeChecks) {
    EXPECT_THROW(CyclicPentaMatrix(4), InvalidArgument);
    CyclicPentaMatrix m(6);
    EXPECT_THROW(m.multiply(Field(5, 0.0)), InvalidArgument);
    m.add_diagonal(Field(6, 1.0));
    const CyclicPentaFactorization lu(m);
    EXPECT_THROW(lu.solve(Field(7, 0.0)), InvalidArgument);
}

TEST(CyclicPenta, RefactorReusesObject) {
    CyclicPentaFactorization lu;
    for (unsigned seed = 0; seed < 3; ++seed) {
        const auto m = random_matrix(40, seed, 0.5);
        lu.factor(m);
        const Field x = random_field(40, seed + 50);
        const Field b = m.multiply(x);
        const Field ref = dense_solve(to_dense(m), b);
        EXPECT_LT(max_diff(lu.solve(b), ref), 1e-9);
    }
}
