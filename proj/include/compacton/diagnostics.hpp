#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "compacton/compacton_theory.hpp"
#include "compacton/errors.hpp"
#include "compacton/grid.hpp"
#include "compacton/knn_dynamics.hpp"

namespace compacton {

/// Raised when a measurement window has no room on the grid.
class WindowEmpty : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

struct DiagnosticsRecord {
    double t = 0.0;
    double I1 = 0.0;
    double I2 = 0.0;
    double peak_x = 0.0;
    double peak_amp = 0.0;
    double tail_plateau = std::numeric_limits<double>::quiet_NaN();
    std::map<std::string, double> extras;
};

struct Invariants {
    double I1 = 0.0;
    double I2 = 0.0;
};

/// Rectangle-rule mass and second invariant, with the odd power extension.
inline Invariants invariants(std::span<const double> u, const PeriodicGrid& grid, double n) {
    grid.require_conforming(u, "invariants");
    double s1 = 0.0;
    double s2 = 0.0;
    for (double v : u) {
        s1 += v;
        s2 += pow_n(v, n + 1.0);
    }
    return {grid.dx() * s1, grid.dx() * s2 / (n + 1.0)};
}

struct Peak {
    std::size_t index = 0;
    double x = 0.0;
    double amplitude = 0.0;
};

/// Grid argmax; the first (smallest-index) maximum wins.
inline Peak locate_peak(std::span<const double> u, const PeriodicGrid& grid) {
    grid.require_conforming(u, "locate_peak");
    std::size_t best = 0;
    for (std::size_t j = 1; j < u.size(); ++j) {
        if (u[j] > u[best]) best = j;
    }
    return {best, grid.x(best), u[best]};
}

/// Analytic peak position (reduced into the period) minus the grid argmax.
/// Positive when the numerical compacton lags behind the analytic one.
inline double peak_delay(std::span<const double> u, const PeriodicGrid& grid, const CompactonSpec& spec, double t,
                         double frame_velocity) {
    return compacton_center(spec, grid, t, frame_velocity) - locate_peak(u, grid).x;
}

/// Nodes whose coordinate lies in [lo, hi], walking right from lo with wrap-around.
inline std::vector<std::size_t> window_nodes(const PeriodicGrid& grid, double lo, double hi) {
    std::vector<std::size_t> nodes;
    if (hi < lo) return nodes;
    const double span = std::min(hi - lo, grid.length() - 0.5 * grid.dx());
    const double start = grid.reduce(lo);
    const auto first = static_cast<std::ptrdiff_t>(std::ceil((start - grid.x0()) / grid.dx() - 1e-9));
    const auto count = static_cast<std::ptrdiff_t>(std::floor(span / grid.dx() + 1e-9)) + 1;
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const std::size_t j = grid.wrap(first + i);
        const double offset = grid.x0() + static_cast<double>(first + i) * grid.dx() - start;
        if (offset <= span + 1e-9 * grid.dx()) nodes.push_back(j);
    }
    return nodes;
}

/// Mean |U| over the plateau between a travelling compacton and the spot it
/// started from. The window runs from one support width ahead of the initial
/// position to one half-width behind the compacton's trailing edge. The
/// trailing edge comes from the analytic centre, or from the grid peak when
/// that peak has fallen behind the analytic centre (damped compactons lag).
inline double tail_plateau_amplitude(std::span<const double> u, const PeriodicGrid& grid, const CompactonSpec& spec,
                                     double t, double frame_velocity) {
    grid.require_conforming(u, "tail_plateau_amplitude");
    const double h = support_halfwidth(spec.n);
    const double width = 2.0 * h;
    const double rel = spec.c - frame_velocity;
    const double travelled = std::abs(rel) * t;
    if (rel == 0.0 || travelled - h < 4.0 * width || travelled + h > grid.length() - width) {
        throw WindowEmpty("tail_plateau_amplitude: compacton support must be at least four support widths "
                          "from its initial position (and not lapping the domain)");
    }
    const double dir = rel > 0.0 ? 1.0 : -1.0;
    // Distances measured from the initial centre along the direction of travel.
    const double begin = width;
    double end = travelled - 2.0 * h;

    const Peak peak = locate_peak(u, grid);
    const double peak_offset = dir * grid.displacement(spec.x_center, peak.x);
    if (peak_offset > begin && peak_offset < travelled) end = std::min(end, peak_offset - 2.0 * h);
    if (!(end > begin)) {
        throw WindowEmpty("tail_plateau_amplitude: plateau window is empty");
    }

    const double lo = dir > 0.0 ? spec.x_center + begin : spec.x_center - end;
    const double hi = dir > 0.0 ? spec.x_center + end : spec.x_center - begin;
    const auto nodes = window_nodes(grid, lo, hi);
    if (nodes.empty()) throw WindowEmpty("tail_plateau_amplitude: plateau window holds no grid nodes");
    double acc = 0.0;
    for (std::size_t j : nodes) acc += std::abs(u[j]);
    return acc / static_cast<double>(nodes.size());
}

/// max |U| over the coordinate window [lo, hi] (periodic).
inline double ripple_amplitude(std::span<const double> u, const PeriodicGrid& grid, double lo, double hi) {
    grid.require_conforming(u, "ripple_amplitude");
    if (!(hi >= lo) || hi - lo > grid.length()) {
        throw InvalidArgument("ripple_amplitude: window must satisfy lo <= hi <= lo + L");
    }
    double m = 0.0;
    for (std::size_t j : window_nodes(grid, lo, hi)) m = std::max(m, std::abs(u[j]));
    return m;
}

/// The `count` largest local maxima of U, each at least `separation` away
/// from every larger one. Sorted by decreasing amplitude.
inline std::vector<Peak> top_peaks(std::span<const double> u, const PeriodicGrid& grid, std::size_t count,
                                   double separation) {
    grid.require_conforming(u, "top_peaks");
    std::vector<Peak> candidates;
    const std::size_t m = u.size();
    for (std::size_t j = 0; j < m; ++j) {
        const double left = u[grid.wrap(static_cast<std::ptrdiff_t>(j) - 1)];
        const double right = u[grid.wrap(static_cast<std::ptrdiff_t>(j) + 1)];
        if (u[j] > left && u[j] >= right) candidates.push_back({j, grid.x(j), u[j]});
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Peak& a, const Peak& b) { return a.amplitude > b.amplitude; });
    std::vector<Peak> chosen;
    for (const auto& p : candidates) {
        if (chosen.size() == count) break;
        const bool clear = std::all_of(chosen.begin(), chosen.end(), [&](const Peak& q) {
            return std::abs(grid.displacement(q.x, p.x)) >= separation;
        });
        if (clear) chosen.push_back(p);
    }
    return chosen;
}

/// Full record for one snapshot; the plateau is NaN when its window does not exist yet.
inline DiagnosticsRecord diagnose(std::span<const double> u, const PeriodicGrid& grid, double n, double t,
                                  const CompactonSpec* tracked, double frame_velocity) {
    DiagnosticsRecord rec;
    rec.t = t;
    const auto inv = invariants(u, grid, n);
    rec.I1 = inv.I1;
    rec.I2 = inv.I2;
    const auto peak = locate_peak(u, grid);
    rec.peak_x = peak.x;
    rec.peak_amp = peak.amplitude;
    if (tracked != nullptr) {
        try {
            rec.tail_plateau = tail_plateau_amplitude(u, grid, *tracked, t, frame_velocity);
        } catch (const WindowEmpty&) {
        }
    }
    return rec;
}

} // namespace compacton
