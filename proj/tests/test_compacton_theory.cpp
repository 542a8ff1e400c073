#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "compacton/compacton_theory.hpp"
#include "compacton/diagnostics.hpp"

using namespace compacton;

namespace {

constexpr double kPi = std::numbers::pi;

const double kExponents[] = {3.0, 2.0, 5.0 / 3.0, 1.5, 1.4, 4.0 / 3.0, 9.0 / 7.0, 1.25};

// Classical RK4 on dc/dt = f(c), independent of the closed-form decay.
double rk4(double c, double n, double a2, double a4, double t_end, int steps) {
    const double h = t_end / steps;
    for (int i = 0; i < steps; ++i) {
        const double k1 = velocity_ode_rhs(c, n, a2, a4);
        const double k2 = velocity_ode_rhs(c + 0.5 * h * k1, n, a2, a4);
        const double k3 = velocity_ode_rhs(c + 0.5 * h * k2, n, a2, a4);
        const double k4 = velocity_ode_rhs(c + h * k3, n, a2, a4);
        c += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return c;
}

} // namespace

TEST(CompactonProfile, QuadraticCase) {
    EXPECT_DOUBLE_EQ(support_halfwidth(2.0), 2.0 * kPi);
    EXPECT_DOUBLE_EQ(support_halfwidth(3.0), 1.5 * kPi);
    EXPECT_DOUBLE_EQ(peak_amplitude(2.0, 1.0), 4.0 / 3.0);
    EXPECT_DOUBLE_EQ(compacton_shape(2.0, 1.0, 0.0), 4.0 / 3.0);
    // cos^2(pi/8) * 4/3 at xi = pi/2
    EXPECT_NEAR(compacton_shape(2.0, 1.0, kPi / 2.0), 4.0 / 3.0 * std::pow(std::cos(kPi / 8.0), 2), 1e-15);
    EXPECT_NEAR(compacton_shape(2.0, 1.0, 2.0 * kPi - 1e-9), 0.0, 1e-15);
    EXPECT_EQ(compacton_shape(2.0, 1.0, 2.0 * kPi), 0.0);
    EXPECT_EQ(compacton_shape(2.0, 1.0, -7.0), 0.0);
}

TEST(CompactonProfile, CubicAmplitude) {
    // (2*3*c/4)^{1/2}
    EXPECT_NEAR(peak_amplitude(3.0, 2.0), std::sqrt(3.0), 1e-15);
}

TEST(CompactonProfile, VelocityFromAmplitudeInverts) {
    for (double n : kExponents) {
        for (double c : {0.1, 0.5, 1.0, 2.5}) {
            EXPECT_NEAR(velocity_from_amplitude(n, peak_amplitude(n, c)), c, 1e-13 * c);
        }
    }
}

TEST(CompactonProfile, RejectsBadArguments) {
    EXPECT_THROW(support_halfwidth(1.0), InvalidArgument);
    EXPECT_THROW(support_halfwidth(3.5), InvalidArgument);
    EXPECT_THROW(peak_amplitude(2.0, 0.0), InvalidArgument);
    EXPECT_THROW(validate(CompactonSpec{2.0, -1.0, 0.0}), InvalidArgument);
}

TEST(CompactonProfile, TravelsWithRelativeVelocity) {
    const CompactonSpec spec{2.0, 1.0, 10.0};
    EXPECT_DOUBLE_EQ(compacton_profile(spec, 10.0 + 0.5 * 4.0, 4.0, 0.5), 4.0 / 3.0);
    EXPECT_EQ(compacton_profile(spec, 10.0, 40.0, 0.5), 0.0);
}

TEST(CompactonProfile, SampleWrapsPeriodically) {
    const PeriodicGrid grid(200, 0.1);
    const CompactonSpec spec{2.0, 1.0, 1.0};
    const Field u = sample_compacton(spec, grid, 0.0, 0.0);
    EXPECT_DOUBLE_EQ(u[10], 4.0 / 3.0);
    // x = 19.5 sits 1.5 to the left of the centre through the periodic seam.
    EXPECT_NEAR(u[195], compacton_shape(2.0, 1.0, -1.5), 1e-14);
    EXPECT_EQ(u[100], 0.0);
    EXPECT_DOUBLE_EQ(compacton_center(spec, grid, 40.0, 0.5), 1.0);
    EXPECT_THROW(sample_compacton({2.0, 1.0, 1.0}, PeriodicGrid(100, 0.1), 0.0, 0.0), InvalidArgument);
}

TEST(CompactonProfile, MassMatchesQuadrature) {
    for (double n : kExponents) {
        const double h = support_halfwidth(n);
        // Composite Simpson on the closed form, written out here.
        const int panels = 200000;
        const double step = 2.0 * h / panels;
        auto f = [&](double xi) {
            const double cs = std::cos((n - 1.0) / (2.0 * n) * xi);
            return std::pow(std::max(0.0, 2.0 * n / (n + 1.0) * cs * cs), 1.0 / (n - 1.0));
        };
        double acc = f(-h) + f(h);
        for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(-h + i * step);
        const double exact = acc * step / 3.0;

        double prev_err = 0.0;
        for (double dx : {0.2, 0.1}) {
            const PeriodicGrid grid = PeriodicGrid::covering(4.0 * h + 10.0, dx);
            const CompactonSpec spec{n, 1.0, std::round(2.0 * h / dx) * dx};
            const double mass = invariants(sample_compacton(spec, grid, 0.0, 0.0), grid, n).I1;
            const double err = std::abs(mass - exact);
            EXPECT_LT(err, 5.0 * dx * dx) << "n=" << n;
            if (prev_err > 1e-12) {
                EXPECT_LT(err, prev_err) << "n=" << n;
            }
            prev_err = err;
        }
    }
}

TEST(AdiabaticTheory, QuadraticRates) {
    EXPECT_DOUBLE_EQ(alpha2_rate(2.0), 0.1);
    EXPECT_DOUBLE_EQ(alpha4_rate(2.0), 1.0 / 40.0);
    EXPECT_NEAR(velocity_ode_rhs(1.0, 2.0, 0.0, 1e-3), -2.5e-5, 1e-20);
}

TEST(AdiabaticTheory, SingularExponents) {
    EXPECT_THROW(alpha4_rate(5.0), SingularParameter);
    EXPECT_THROW(alpha4_rate(0.0), SingularParameter);
    EXPECT_THROW(alpha2_rate(-3.0), SingularParameter);
    EXPECT_THROW(alpha2_star(1.0, 1e-3), SingularParameter);
}

TEST(AdiabaticTheory, DecayMatchesRungeKutta) {
    for (double n : kExponents) {
        for (double a2 : {0.0, 1e-4}) {
            const AdiabaticModel model{n, a2, 1e-3, 1.0};
            EXPECT_NEAR(velocity_decay(model, 2000.0), rk4(1.0, n, a2, 1e-3, 2000.0, 4000), 1e-8) << "n=" << n;
        }
    }
}

TEST(AdiabaticTheory, QuadraticDecayOverTableRun) {
    EXPECT_NEAR(velocity_decay({2.0, 0.0, 1e-3, 1.0}, 2000.0), std::exp(-0.05), 1e-15);
}

TEST(AdiabaticTheory, CancellationRatios) {
    EXPECT_NEAR(alpha2_star(2.0, 1e-3), -0.25e-3, 1e-18);
    EXPECT_NEAR(alpha2_star(3.0, 1e-3) / 1e-3, -1.0 / 9.0, 1e-15);
}

TEST(AdiabaticTheory, CancellationIdentity) {
    for (double n : kExponents) {
        for (double a4 : {1e-2, 1e-3, 1e-4, 1e-5}) {
            const double a2 = alpha2_star(n, a4);
            const double scale = alpha4_rate(n) * a4;
            EXPECT_LE(std::abs(velocity_ode_rhs(1.0, n, a2, a4)), 4e-16 * std::abs(scale)) << "n=" << n;
            EXPECT_DOUBLE_EQ(velocity_decay({n, a2, a4, 1.0}, 2000.0), 1.0);
        }
    }
}

TEST(AdiabaticTheory, Homogeneity) {
    for (double n : kExponents) {
        for (double lambda : {0.1, 3.0, 1e3}) {
            EXPECT_NEAR(alpha2_star(n, lambda * 1e-3), lambda * alpha2_star(n, 1e-3),
                        1e-15 * std::abs(lambda * alpha2_star(n, 1e-3)));
        }
        EXPECT_EQ(alpha2_star(n, 0.0), 0.0);
    }
}

TEST(AdiabaticTheory, DissipationSlowsAndSignIsAntiDiffusive) {
    for (double n : kExponents) {
        EXPECT_GT(alpha2_rate(n), 0.0);
        EXPECT_GT(alpha4_rate(n), 0.0);
        EXPECT_LT(alpha2_star(n, 1e-3), 0.0);
        double prev = 1.0;
        for (double t : {500.0, 1000.0, 2000.0}) {
            const double c = velocity_decay({n, 0.0, 1e-3, 1.0}, t);
            EXPECT_LT(c, prev);
            prev = c;
        }
    }
}
