#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "compacton/cyclic_penta.hpp"
#include "compacton/errors.hpp"
#include "compacton/fp_env.hpp"
#include "compacton/grid.hpp"
#include "compacton/pade_operators.hpp"

namespace compacton {

/// Coefficients of the moving-frame, artificially dissipated K(n,n) equation
///   u_t - c0 u_x + (u^n)_x + (u^n)_xxx - alpha2 u_xx + alpha4 u_xxxx = 0.
struct ModelParams {
    double n = 2.0;
    double c0 = 0.0;
    double alpha2 = 0.0;
    double alpha4 = 0.0;

    void validate() const {
        if (!(n > 1.0 && n <= 3.0)) throw InvalidArgument("ModelParams: n must satisfy 1 < n <= 3");
        if (!(alpha4 >= 0.0)) throw InvalidArgument("ModelParams: alpha4 must be non-negative");
        if (!std::isfinite(c0) || !std::isfinite(alpha2)) {
            throw InvalidArgument("ModelParams: c0 and alpha2 must be finite");
        }
    }
};

struct TimeStepper {
    double dt = 0.1;
    double newton_tol = 1e-12;
    int newton_max = 25;
    double blowup_factor = 10.0;

    void validate() const {
        if (!(dt > 0.0)) throw InvalidArgument("TimeStepper: dt must be positive");
        if (!(newton_tol > 0.0)) throw InvalidArgument("TimeStepper: newton_tol must be positive");
        if (newton_max < 1) throw InvalidArgument("TimeStepper: newton_max must be at least 1");
        if (!(blowup_factor > 1.0)) throw InvalidArgument("TimeStepper: blowup_factor must exceed 1");
    }
};

enum class StepStatus { ok, newton_diverged, blowup };

inline const char* to_string(StepStatus s) {
    switch (s) {
    case StepStatus::ok: return "ok";
    case StepStatus::newton_diverged: return "newton-diverged";
    case StepStatus::blowup: return "blowup";
    }
    return "unknown";
}

struct StepReport {
    int newton_iters = 0;
    double final_residual = 0.0;
    /// Tolerance the residual was held to: newton_tol, or the round-off floor
    /// of the residual evaluation when that is larger.
    double tolerance = 0.0;
    StepStatus status = StepStatus::ok;
    std::vector<double> residual_history;
};

/// Odd extension sign(u)|u|^n.
inline double pow_n(double u, double n) {
    if (u == 0.0) return 0.0;
    if (n == 2.0) return u * std::abs(u);
    if (n == 3.0) return u * u * u;
    const double p = std::pow(std::abs(u), n);
    return u < 0.0 ? -p : p;
}

/// d/du pow_n(u, n) = n |u|^{n-1}.
inline double pow_n_derivative(double u, double n) {
    if (u == 0.0) return 0.0;
    if (n == 2.0) return 2.0 * std::abs(u);
    if (n == 3.0) return 3.0 * u * u;
    return n * std::pow(std::abs(u), n - 1.0);
}

/// Implicit-midpoint discretization of the Padé semi-discrete system:
///
///   A (U+ - U)/dt - (c0 B + alpha2 S - alpha4 D) (U+ + U)/2 + (B + C) pow_n((U+ + U)/2) = 0
///
/// Holds the workspace for residual and Jacobian evaluation so that a
/// time loop allocates nothing per step. Not thread-safe; use one per run.
class MidpointSystem {
public:
    MidpointSystem(const PeriodicGrid& grid, const ModelParams& params, const OperatorSet& ops, double dt)
        : grid_(grid), params_(params), ops_(ops), dt_(dt), jacobian_(grid.size()) {
        params_.validate();
        if (!(dt > 0.0)) throw InvalidArgument("MidpointSystem: dt must be positive");
        const std::size_t m = grid.size();
        mid_.resize(m);
        flux_.resize(m);
        delta_.resize(m);
        dflux_.resize(m);
        for (std::size_t s = 0; s < 5; ++s) {
            linear_[s] = params_.c0 * ops_.B.scale * ops_.B.coeffs[s] + params_.alpha2 * ops_.S.scale * ops_.S.coeffs[s] -
                         params_.alpha4 * ops_.D.scale * ops_.D.coeffs[s];
            nonlinear_[s] = ops_.B.scale * ops_.B.coeffs[s] + ops_.C.scale * ops_.C.coeffs[s];
        }
        linear_norm_ = 0.0;
        nonlinear_norm_ = 0.0;
        for (std::size_t s = 0; s < 5; ++s) {
            linear_norm_ += std::abs(linear_[s]);
            nonlinear_norm_ += std::abs(nonlinear_[s]);
        }
    }

    const PeriodicGrid& grid() const noexcept { return grid_; }
    const ModelParams& params() const noexcept { return params_; }
    const OperatorSet& ops() const noexcept { return ops_; }
    double dt() const noexcept { return dt_; }

    /// Fills `out` with the midpoint residual and returns its max norm.
    double residual(std::span<const double> prev, std::span<const double> next, std::span<double> out) {
        const std::size_t m = grid_.size();
        grid_.require_conforming(prev, "midpoint_residual");
        grid_.require_conforming(next, "midpoint_residual");
        grid_.require_conforming(out, "midpoint_residual");
        const double n = params_.n;
        for (std::size_t j = 0; j < m; ++j) {
            mid_[j] = 0.5 * (next[j] + prev[j]);
            flux_[j] = pow_n(mid_[j], n);
            delta_[j] = next[j] - prev[j];
        }
        // Stencils are evaluated as symmetric sums and antisymmetric
        // differences of the exact integer weights, so every spatial term
        // telescopes over the periodic grid up to rounding.
        const double a_scale = ops_.A.scale / dt_;
        const double lin_b = params_.c0 * ops_.B.scale;
        const double lin_s = params_.alpha2 * ops_.S.scale;
        const double lin_d = params_.alpha4 * ops_.D.scale;
        const double nl_b = ops_.B.scale;
        const double nl_c = ops_.C.scale;
        const double* du = delta_.data();
        const double* um = mid_.data();
        const double* w = flux_.data();
        double norm = 0.0;
        auto row = [&](std::size_t j, std::size_t jm2, std::size_t jm1, std::size_t jp1, std::size_t jp2) {
            const double a_int = (du[jm2] + du[jp2]) + 26.0 * (du[jm1] + du[jp1]) + 66.0 * du[j];
            const double u_odd2 = um[jp2] - um[jm2];
            const double u_odd1 = um[jp1] - um[jm1];
            const double u_even2 = um[jp2] + um[jm2];
            const double u_even1 = um[jp1] + um[jm1];
            const double b_int = u_odd2 + 10.0 * u_odd1;
            const double s_int = u_even2 + 2.0 * u_even1 - 6.0 * um[j];
            const double d_int = u_even2 - 4.0 * u_even1 + 6.0 * um[j];
            const double w_odd2 = w[jp2] - w[jm2];
            const double w_odd1 = w[jp1] - w[jm1];
            const double r = a_scale * a_int - (lin_b * b_int + lin_s * s_int - lin_d * d_int) +
                             (nl_b * (w_odd2 + 10.0 * w_odd1) + nl_c * (w_odd2 - 2.0 * w_odd1));
            out[j] = r;
            norm = std::max(norm, std::abs(r));
        };
        for_each_row(row);
        if (!std::isfinite(norm)) return std::numeric_limits<double>::infinity();
        return norm;
    }

    /// Jacobian of the residual with respect to U+, evaluated at midpoint `mid`:
    ///   A/dt - (c0 B + alpha2 S - alpha4 D)/2 + (B + C) diag(n |mid|^{n-1}) / 2
    const CyclicPentaMatrix& jacobian(std::span<const double> mid) {
        const std::size_t m = grid_.size();
        grid_.require_conforming(mid, "newton_step_matrix");
        for (std::size_t j = 0; j < m; ++j) dflux_[j] = 0.5 * pow_n_derivative(mid[j], params_.n);
        return assemble_jacobian();
    }

    /// Jacobian at the state of the most recent residual() call. Reuses the
    /// cached flux: n |u|^{n-1} = n pow_n(u) / u.
    const CyclicPentaMatrix& jacobian_after_residual() {
        const double half_n = 0.5 * params_.n;
        for (std::size_t j = 0; j < grid_.size(); ++j) {
            dflux_[j] = mid_[j] != 0.0 ? half_n * (flux_[j] / mid_[j]) : 0.0;
        }
        return assemble_jacobian();
    }

    /// Jacobian at the midpoint of (prev, next).
    const CyclicPentaMatrix& jacobian_at(std::span<const double> prev, std::span<const double> next) {
        for (std::size_t j = 0; j < grid_.size(); ++j) mid_[j] = 0.5 * (next[j] + prev[j]);
        return jacobian(mid_);
    }

private:
    const CyclicPentaMatrix& assemble_jacobian() {
        std::array<double, 5> constant{};
        for (std::size_t s = 0; s < 5; ++s) {
            constant[s] = ops_.A.scale * ops_.A.coeffs[s] / dt_ - 0.5 * linear_[s];
        }
        auto row = [&](std::size_t j, std::size_t jm2, std::size_t jm1, std::size_t jp1, std::size_t jp2) {
            auto& r = jacobian_.row(j);
            r[0] = constant[0] + nonlinear_[0] * dflux_[jm2];
            r[1] = constant[1] + nonlinear_[1] * dflux_[jm1];
            r[2] = constant[2] + nonlinear_[2] * dflux_[j];
            r[3] = constant[3] + nonlinear_[3] * dflux_[jp1];
            r[4] = constant[4] + nonlinear_[4] * dflux_[jp2];
        };
        for_each_row(row);
        return jacobian_;
    }

public:
    /// Size of the rounding error in a residual evaluation at states of
    /// magnitude `amp`. Below this no Newton iterate can be told apart.
    double residual_roundoff(double amp) const noexcept {
        constexpr double eps = std::numeric_limits<double>::epsilon();
        const double a_norm = ops_.A.abs_row_sum() / dt_;
        const double flux = pow_n(amp, params_.n);
        return 4.0 * eps * (2.0 * a_norm * amp + linear_norm_ * amp + nonlinear_norm_ * flux);
    }

private:
    template <class RowFn>
    void for_each_row(RowFn&& fn) const {
        const std::size_t m = grid_.size();
        auto w = [m](std::size_t j, int s) {
            const auto k = static_cast<std::ptrdiff_t>(j) + s;
            const auto mm = static_cast<std::ptrdiff_t>(m);
            return static_cast<std::size_t>(k < 0 ? k + mm : (k >= mm ? k - mm : k));
        };
        for (std::size_t j : {std::size_t{0}, std::size_t{1}}) fn(j, w(j, -2), w(j, -1), w(j, 1), w(j, 2));
        for (std::size_t j = 2; j + 2 < m; ++j) fn(j, j - 2, j - 1, j + 1, j + 2);
        for (std::size_t j : {m - 2, m - 1}) fn(j, w(j, -2), w(j, -1), w(j, 1), w(j, 2));
    }

    PeriodicGrid grid_;
    ModelParams params_;
    OperatorSet ops_;
    double dt_;
    std::array<double, 5> linear_{};
    std::array<double, 5> nonlinear_{};
    double linear_norm_ = 0.0;
    double nonlinear_norm_ = 0.0;
    Field mid_;
    Field flux_;
    Field delta_;
    Field dflux_;
    CyclicPentaMatrix jacobian_;
};

inline Field midpoint_residual(std::span<const double> prev, std::span<const double> next, const PeriodicGrid& grid,
                               const ModelParams& params, const OperatorSet& ops, double dt) {
    MidpointSystem sys(grid, params, ops, dt);
    Field out(grid.size());
    sys.residual(prev, next, out);
    return out;
}

inline CyclicPentaMatrix newton_step_matrix(std::span<const double> mid, const PeriodicGrid& grid,
                                            const ModelParams& params, const OperatorSet& ops, double dt) {
    MidpointSystem sys(grid, params, ops, dt);
    return sys.jacobian(mid);
}

inline double max_abs(std::span<const double> u) {
    double m = 0.0;
    for (double v : u) m = std::max(m, std::abs(v));
    return m;
}

/// Newton solver for one implicit-midpoint step. Keeps its buffers between steps.
class MidpointStepper {
public:
    MidpointStepper(const PeriodicGrid& grid, const ModelParams& params, const OperatorSet& ops,
                    const TimeStepper& stepper)
        : system_(grid, params, ops, stepper.dt), stepper_(stepper) {
        stepper_.validate();
        residual_.resize(grid.size());
    }

    const TimeStepper& settings() const noexcept { return stepper_; }
    MidpointSystem& system() noexcept { return system_; }

    /// Advances `prev` into `next`, starting Newton from `prev`. Blow-up is
    /// judged against `reference_amplitude` (the initial max |U| of a run).
    StepReport step(std::span<const double> prev, std::span<double> next, double reference_amplitude) {
        const ScopedFlushDenormals ftz;
        StepReport report;
        std::copy(prev.begin(), prev.end(), next.begin());
        const double amp = std::max(max_abs(prev), reference_amplitude);
        report.tolerance = std::max(stepper_.newton_tol, system_.residual_roundoff(amp));

        double res = system_.residual(prev, next, residual_);
        report.residual_history.push_back(res);
        int iters = 0;
        while (!(res <= report.tolerance)) {
            if (iters >= stepper_.newton_max || !std::isfinite(res)) {
                report.status = StepStatus::newton_diverged;
                break;
            }
            try {
                lu_.factor(system_.jacobian_after_residual());
            } catch (const NumericalFailure&) {
                report.status = StepStatus::newton_diverged;
                break;
            }
            lu_.solve_in_place(residual_);
            for (std::size_t j = 0; j < next.size(); ++j) next[j] -= residual_[j];
            ++iters;
            res = system_.residual(prev, next, residual_);
            report.residual_history.push_back(res);
        }
        report.newton_iters = iters;
        report.final_residual = res;
        if (report.status == StepStatus::ok && max_abs(next) > stepper_.blowup_factor * reference_amplitude) {
            report.status = StepStatus::blowup;
        }
        return report;
    }

private:
    MidpointSystem system_;
    TimeStepper stepper_;
    CyclicPentaFactorization lu_;
    Field residual_;
};

/// One step from U_prev; the blow-up reference defaults to max |U_prev|.
inline std::pair<Field, StepReport> step(std::span<const double> prev, const PeriodicGrid& grid,
                                         const ModelParams& params, const OperatorSet& ops,
                                         const TimeStepper& stepper, std::optional<double> reference_amplitude = {}) {
    grid.require_conforming(prev, "step");
    MidpointStepper s(grid, params, ops, stepper);
    Field next(prev.size());
    auto report = s.step(prev, next, reference_amplitude.value_or(max_abs(prev)));
    return {std::move(next), std::move(report)};
}

struct Observer {
    std::size_t stride = 1;
    std::function<void(std::size_t step, double t, std::span<const double> u)> callback;
};

struct TrajectorySummary {
    std::size_t steps_requested = 0;
    std::size_t steps_taken = 0;
    double final_time = 0.0;
    StepStatus status = StepStatus::ok;
    std::optional<double> failure_time;
    std::size_t newton_iterations = 0;
    int max_newton_iterations = 0;
    double max_residual = 0.0;
    double reference_amplitude = 0.0;
    Field final_state;
};

inline std::size_t step_count(double final_time, double dt) {
    const double ratio = final_time / dt;
    return static_cast<std::size_t>(std::ceil(ratio - 1e-9 * std::max(1.0, ratio)));
}

/// Integrates to `final_time` in ceil(T/dt) steps. Observers fire at step 0
/// and then every `stride` steps, and once more at the last step taken.
/// Stops at the first failed step, recording the time it would have reached.
inline TrajectorySummary integrate(std::span<const double> u0, double final_time, const PeriodicGrid& grid,
                                   const ModelParams& params, const OperatorSet& ops, const TimeStepper& stepper,
                                   const std::vector<Observer>& observers = {}) {
    grid.require_conforming(u0, "integrate");
    if (!(final_time >= 0.0)) throw InvalidArgument("integrate: final time must be non-negative");
    for (const auto& o : observers) {
        if (o.stride == 0) throw InvalidArgument("integrate: observer stride must be positive");
    }
    MidpointStepper stepper_impl(grid, params, ops, stepper);

    TrajectorySummary summary;
    summary.steps_requested = final_time > 0.0 ? step_count(final_time, stepper.dt) : 0;
    summary.reference_amplitude = max_abs(u0);
    if (summary.reference_amplitude == 0.0) summary.reference_amplitude = std::numeric_limits<double>::min();

    Field current(u0.begin(), u0.end());
    Field next(u0.size());
    auto notify = [&](std::size_t i, double t, bool last) {
        for (const auto& o : observers) {
            if (i % o.stride == 0 || last) o.callback(i, t, current);
        }
    };
    notify(0, 0.0, false);

    for (std::size_t i = 1; i <= summary.steps_requested; ++i) {
        const double t = static_cast<double>(i) * stepper.dt;
        const StepReport rep = stepper_impl.step(current, next, summary.reference_amplitude);
        summary.newton_iterations += static_cast<std::size_t>(rep.newton_iters);
        summary.max_newton_iterations = std::max(summary.max_newton_iterations, rep.newton_iters);
        if (std::isfinite(rep.final_residual)) summary.max_residual = std::max(summary.max_residual, rep.final_residual);
        if (rep.status != StepStatus::ok) {
            summary.status = rep.status;
            summary.failure_time = t;
            break;
        }
        current.swap(next);
        summary.steps_taken = i;
        summary.final_time = t;
        notify(i, t, i == summary.steps_requested);
    }
    summary.final_state = std::move(current);
    return summary;
}

} // namespace compacton
