#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "compacton/compacton_theory.hpp"
#include "compacton/config.hpp"
#include "compacton/content_hash.hpp"
#include "compacton/diagnostics.hpp"
#include "compacton/knn_dynamics.hpp"
#include "compacton/pade_operators.hpp"

namespace compacton {

namespace csv {

/// Round-trip exact (17 significant digits); NaN is written as "nan".
inline std::string number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string series(const std::vector<DiagnosticsRecord>& rows) {
    std::string out = "t,I1,I2,peak_x,peak_amp,tail_plateau\n";
    for (const auto& r : rows) {
        out += number(r.t) + ',' + number(r.I1) + ',' + number(r.I2) + ',' + number(r.peak_x) + ',' +
               number(r.peak_amp) + ',' + number(r.tail_plateau) + '\n';
    }
    return out;
}

inline std::string snapshot(const PeriodicGrid& grid, std::span<const double> u) {
    std::string out = "x,u\n";
    out.reserve(out.size() + u.size() * 40);
    for (std::size_t j = 0; j < u.size(); ++j) out += number(grid.x(j)) + ',' + number(u[j]) + '\n';
    return out;
}

} // namespace csv

inline std::string snapshot_file_name(double t) { return "snapshot_t" + format_number(t) + ".csv"; }

struct RunOptions {
    /// When false nothing touches the filesystem; results stay in memory.
    bool write_files = true;
    /// Called in addition to the built-in diagnostics.
    std::vector<Observer> observers;
};

struct RunResult {
    nlohmann::json manifest;
    std::vector<DiagnosticsRecord> series;
    /// Fields at the requested snapshot times, keyed by the requested time.
    std::map<double, Field> snapshots;
    TrajectorySummary summary;
    PeriodicGrid grid{PeriodicGrid::kMinNodes, 1.0};
    Field initial;
    double alpha2 = 0.0;
};

inline nlohmann::json config_json(const ExperimentConfig& cfg, const PeriodicGrid& grid, double alpha2) {
    nlohmann::json compactons = nlohmann::json::array();
    for (const auto& c : cfg.compactons) {
        compactons.push_back({{"c", c.c},
                              {"x_center", c.x_center},
                              {"peak_amplitude", peak_amplitude(cfg.n, c.c)},
                              {"support_halfwidth", support_halfwidth(cfg.n)}});
    }
    return {{"scenario", to_string(cfg.scenario)},
            {"n", cfg.n},
            {"n_text", cfg.n_text},
            {"compactons", compactons},
            {"c0", cfg.c0},
            {"alpha4", cfg.alpha4},
            {"alpha2_mode", to_string(cfg.alpha2_mode)},
            {"alpha2", alpha2},
            {"L_requested", cfg.L},
            {"L", grid.length()},
            {"M", grid.size()},
            {"dx", cfg.dx},
            {"dt", cfg.dt},
            {"T", cfg.T},
            {"steps", step_count(cfg.T, cfg.dt)},
            {"snapshot_times", cfg.snapshot_times},
            {"diagnostics_stride", cfg.diagnostics_stride},
            {"newton_tol", cfg.newton_tol},
            {"newton_max", cfg.newton_max},
            {"blowup_factor", cfg.blowup_factor}};
}

/// Builds the initial field, integrates, records diagnostics and snapshots,
/// and (optionally) writes series.csv, snapshot_t<time>.csv and manifest.json
/// under cfg.output_dir. Failed integrations keep whatever was produced.
inline RunResult run(const ExperimentConfig& cfg, const RunOptions& options = {}) {
    validate(cfg);
    const auto wall_start = std::chrono::steady_clock::now();

    RunResult result;
    result.alpha2 = cfg.resolved_alpha2();
    result.grid = PeriodicGrid::covering(cfg.L, cfg.dx);
    const PeriodicGrid& grid = result.grid;
    const OperatorSet ops = build_operator_set(cfg.dx);
    const ModelParams model{cfg.n, cfg.c0, result.alpha2, cfg.alpha4};

    Field u0(grid.size(), 0.0);
    for (const auto& spec : cfg.compactons) {
        const Field part = sample_compacton(spec, grid, 0.0, cfg.c0);
        for (std::size_t j = 0; j < u0.size(); ++j) u0[j] += part[j];
    }
    result.initial = u0;

    std::map<std::size_t, std::vector<double>> snapshot_steps;
    for (double t : cfg.snapshot_times) {
        snapshot_steps[static_cast<std::size_t>(std::llround(t / cfg.dt))].push_back(t);
    }
    const std::size_t total_steps = step_count(cfg.T, cfg.dt);
    const CompactonSpec* tracked = &cfg.compactons.front();
    const double width = support_width(cfg.n);
    const std::size_t peak_count = cfg.compactons.size();

    Observer builtin;
    builtin.stride = 1;
    builtin.callback = [&](std::size_t i, double t, std::span<const double> u) {
        if (i % cfg.diagnostics_stride == 0 || i == total_steps) {
            DiagnosticsRecord rec = diagnose(u, grid, cfg.n, t, tracked, cfg.c0);
            if (peak_count > 1) {
                const auto peaks = top_peaks(u, grid, peak_count, width);
                for (std::size_t k = 0; k < peaks.size(); ++k) {
                    rec.extras["peak" + std::to_string(k) + "_amp"] = peaks[k].amplitude;
                    rec.extras["peak" + std::to_string(k) + "_x"] = peaks[k].x;
                }
            }
            result.series.push_back(std::move(rec));
        }
        if (const auto it = snapshot_steps.find(i); it != snapshot_steps.end()) {
            for (double t_req : it->second) result.snapshots[t_req] = Field(u.begin(), u.end());
        }
    };
    std::vector<Observer> observers{builtin};
    observers.insert(observers.end(), options.observers.begin(), options.observers.end());

    result.summary = integrate(u0, cfg.T, grid, model, ops, cfg.stepper(), observers);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();

    const auto mass0 = invariants(u0, grid, cfg.n).I1;
    const auto mass1 = invariants(result.summary.final_state, grid, cfg.n).I1;

    auto& m = result.manifest;
    m["config"] = config_json(cfg, grid, result.alpha2);
    m["status"] = to_string(result.summary.status);
    m["steps_taken"] = result.summary.steps_taken;
    m["final_time"] = result.summary.final_time;
    m["failure_time"] = result.summary.failure_time ? nlohmann::json(*result.summary.failure_time) : nlohmann::json();
    m["blowup_time"] = result.summary.status == StepStatus::blowup && result.summary.failure_time
                           ? nlohmann::json(*result.summary.failure_time)
                           : nlohmann::json();
    m["newton"] = {{"iterations", result.summary.newton_iterations},
                   {"max_iterations_per_step", result.summary.max_newton_iterations},
                   {"max_final_residual", result.summary.max_residual}};
    m["mass"] = {{"initial", mass0},
                 {"final", mass1},
                 {"relative_drift", mass0 != 0.0 ? (mass1 - mass0) / std::abs(mass0) : mass1 - mass0}};
    m["wall_time_s"] = wall;
    m["files"] = nlohmann::json::array();

    if (options.write_files && !cfg.output_dir.empty()) {
        std::filesystem::create_directories(cfg.output_dir);
        auto emit = [&](const std::string& name, const std::string& bytes) {
            std::ofstream out(cfg.output_dir / name, std::ios::binary);
            out << bytes;
            if (!out) throw std::runtime_error("failed to write " + (cfg.output_dir / name).string());
            m["files"].push_back({{"name", name}, {"bytes", bytes.size()}, {"git_blob_sha1", git_blob_sha1(bytes)}});
        };
        emit("series.csv", csv::series(result.series));
        for (const auto& [t, field] : result.snapshots) emit(snapshot_file_name(t), csv::snapshot(grid, field));
        std::ofstream out(cfg.output_dir / "manifest.json");
        out << m.dump(2) << '\n';
    }
    return result;
}

} // namespace compacton
