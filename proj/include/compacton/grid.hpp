#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "compacton/errors.hpp"

namespace compacton {

using Field = std::vector<double>;

/// Uniform periodic mesh on [x0, x0 + M*dx). Node j sits at x0 + j*dx and
/// all index arithmetic is taken modulo M.
class PeriodicGrid {
public:
    static constexpr std::size_t kMinNodes = 5;

    PeriodicGrid(std::size_t nodes, double dx, double x0 = 0.0) : nodes_(nodes), dx_(dx), x0_(x0) {
        if (nodes < kMinNodes) {
            throw InvalidArgument("PeriodicGrid: need at least 5 nodes for pentadiagonal stencils");
        }
        if (!(dx > 0.0) || !std::isfinite(dx)) {
            throw InvalidArgument("PeriodicGrid: spacing must be positive and finite");
        }
    }

    /// Grid with spacing as close to `dx` as possible that tiles `length` exactly
    /// with an integer node count. The spacing is kept and the length rounded.
    static PeriodicGrid covering(double length, double dx, double x0 = 0.0) {
        if (!(dx > 0.0) || !(length > 0.0)) {
            throw InvalidArgument("PeriodicGrid::covering: length and spacing must be positive");
        }
        const auto nodes = static_cast<std::size_t>(std::llround(length / dx));
        return PeriodicGrid(nodes, dx, x0);
    }

    std::size_t size() const noexcept { return nodes_; }
    double dx() const noexcept { return dx_; }
    double x0() const noexcept { return x0_; }
    double length() const noexcept { return static_cast<double>(nodes_) * dx_; }

    double x(std::size_t j) const noexcept { return x0_ + static_cast<double>(j) * dx_; }

    std::size_t wrap(std::ptrdiff_t j) const noexcept {
        const auto m = static_cast<std::ptrdiff_t>(nodes_);
        const std::ptrdiff_t r = j % m;
        return static_cast<std::size_t>(r < 0 ? r + m : r);
    }

    /// Maps a coordinate into [x0, x0 + L).
    double reduce(double x) const noexcept {
        const double len = length();
        double r = std::fmod(x - x0_, len);
        if (r < 0.0) r += len;
        if (r >= len) r -= len;
        return x0_ + r;
    }

    /// Signed periodic displacement from `from` to `to`, in [-L/2, L/2).
    double displacement(double from, double to) const noexcept {
        const double len = length();
        double d = std::fmod(to - from, len);
        if (d < -0.5 * len) d += len;
        if (d >= 0.5 * len) d -= len;
        return d;
    }

    Field coordinates() const {
        Field xs(nodes_);
        for (std::size_t j = 0; j < nodes_; ++j) xs[j] = x(j);
        return xs;
    }

    void require_conforming(std::span<const double> u, const char* who) const {
        if (u.size() != nodes_) {
            throw InvalidArgument(std::string(who) + ": field length " + std::to_string(u.size()) +
                                  " does not match grid size " + std::to_string(nodes_));
        }
    }

private:
    std::size_t nodes_;
    double dx_;
    double x0_;
};

} // namespace compacton
