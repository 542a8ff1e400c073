#pragma once

#include <cmath>
#include <numbers>

#include "compacton/errors.hpp"
#include "compacton/grid.hpp"

namespace compacton {

struct CompactonSpec {
    double n = 2.0;
    double c = 1.0;
    double x_center = 0.0;
};

inline void validate_exponent(double n) {
    if (!(n > 1.0 && n <= 3.0)) {
        throw InvalidArgument("compacton exponent n must satisfy 1 < n <= 3, got " + std::to_string(n));
    }
}

inline void validate(const CompactonSpec& spec) {
    validate_exponent(spec.n);
    if (!(spec.c > 0.0)) throw InvalidArgument("compacton velocity c must be positive");
}

/// Half of the support length, n*pi/(n-1).
inline double support_halfwidth(double n) {
    validate_exponent(n);
    return n * std::numbers::pi / (n - 1.0);
}

inline double support_width(double n) { return 2.0 * support_halfwidth(n); }

/// (2nc/(n+1))^{1/(n-1)}
inline double peak_amplitude(double n, double c) {
    validate_exponent(n);
    if (!(c > 0.0)) throw InvalidArgument("peak_amplitude: c must be positive");
    return std::pow(2.0 * n * c / (n + 1.0), 1.0 / (n - 1.0));
}

/// Inverse of peak_amplitude in c.
inline double velocity_from_amplitude(double n, double amplitude) {
    validate_exponent(n);
    return (n + 1.0) / (2.0 * n) * std::pow(amplitude, n - 1.0);
}

/// Profile at offset xi from the compacton centre; exactly zero off the support.
inline double compacton_shape(double n, double c, double xi) {
    const double h = support_halfwidth(n);
    if (!(std::abs(xi) < h)) return 0.0;
    const double cs = std::cos((n - 1.0) / (2.0 * n) * xi);
    return std::pow(2.0 * n * c / (n + 1.0) * cs * cs, 1.0 / (n - 1.0));
}

/// Compacton on the unbounded line, seen from a frame moving with frame_velocity.
inline double compacton_profile(const CompactonSpec& spec, double x, double t, double frame_velocity) {
    const double centre = spec.x_center + (spec.c - frame_velocity) * t;
    return compacton_shape(spec.n, spec.c, x - centre);
}

/// Centre of the travelling compacton at time t, reduced into the grid's period.
inline double compacton_center(const CompactonSpec& spec, const PeriodicGrid& grid, double t, double frame_velocity) {
    return grid.reduce(spec.x_center + (spec.c - frame_velocity) * t);
}

/// Samples the compacton on a periodic grid; offsets are measured periodically.
inline Field sample_compacton(const CompactonSpec& spec, const PeriodicGrid& grid, double t, double frame_velocity) {
    validate(spec);
    if (support_width(spec.n) >= grid.length()) {
        throw InvalidArgument("sample_compacton: support does not fit in the periodic domain");
    }
    const double centre = spec.x_center + (spec.c - frame_velocity) * t;
    Field u(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        u[j] = compacton_shape(spec.n, spec.c, grid.displacement(centre, grid.x(j)));
    }
    return u;
}

// Decay rates of c under the perturbation alpha2 u_xx - alpha4 u_xxxx:
//   dc/dt = -(alpha2_rate(n) alpha2 + alpha4_rate(n) alpha4) c

inline double alpha2_rate(double n) {
    if (n == 0.0 || n == -3.0) throw SingularParameter("alpha2_rate: singular at n = 0 or n = -3");
    return (n - 1.0) * (n - 1.0) / (n * (n + 3.0));
}

inline double alpha4_rate(double n) {
    if (n == 5.0 || n == 0.0 || n == -3.0) {
        throw SingularParameter("alpha4_rate: singular at n = 5 (also n = 0, -3)");
    }
    const double nm1 = n - 1.0;
    return nm1 * nm1 * nm1 * ((n - 3.0) * n - 1.0) / ((n - 5.0) * n * n * n * (n + 3.0));
}

inline double velocity_ode_rhs(double c, double n, double alpha2, double alpha4) {
    return -(alpha2_rate(n) * alpha2 + alpha4_rate(n) * alpha4) * c;
}

struct AdiabaticModel {
    double n = 2.0;
    double alpha2 = 0.0;
    double alpha4 = 0.0;
    double c_initial = 1.0;
};

/// Exact flow of velocity_ode_rhs; the slow time is identified with t.
inline double velocity_decay(const AdiabaticModel& model, double tau) {
    const double rate = alpha2_rate(model.n) * model.alpha2 + alpha4_rate(model.n) * model.alpha4;
    return model.c_initial * std::exp(-rate * tau);
}

/// The alpha2 that zeroes the velocity drift for the given alpha4. Solved
/// directly from alpha2_rate*alpha2 + alpha4_rate*alpha4 = 0, so the sign is
/// whatever cancellation requires: negative (anti-diffusive) for alpha4 > 0
/// across 1 < n <= 3.
inline double alpha2_star(double n, double alpha4) {
    const double r2 = alpha2_rate(n);
    if (r2 == 0.0) throw SingularParameter("alpha2_star: no alpha2 contribution at n = 1");
    return -alpha4_rate(n) / r2 * alpha4;
}

} // namespace compacton
