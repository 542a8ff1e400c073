#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "compacton/config.hpp"
#include "compacton/content_hash.hpp"
#include "compacton/diagnostics.hpp"
#include "compacton/experiment.hpp"

namespace compacton {

namespace table1 {

struct Row {
    const char* n_text;
    double n;
    /// Published delays, columns ordered (1e-2, zero), (1e-2, auto), (1e-3, zero), ...
    std::array<double, 6> reference;
};

inline constexpr std::array<double, 3> kAlpha4{1e-2, 1e-3, 1e-4};

inline const std::array<Row, 8>& rows() {
    static const std::array<Row, 8> table{{
        {"3", 3.0, {505.50, 108.50, 53.20, 5.50, 5.80, 0.90}},
        {"2", 2.0, {404.90, 0.90, 47.80, 0.60, 5.40, 0.60}},
        {"5/3", 5.0 / 3.0, {223.10, 0.70, 25.20, 0.60, 3.10, 0.60}},
        {"3/2", 1.5, {129.80, 0.60, 14.40, 0.60, 2.00, 0.60}},
        {"7/5", 1.4, {80.80, 0.60, 9.00, 0.60, 1.40, 0.60}},
        {"4/3", 4.0 / 3.0, {53.20, 0.60, 6.00, 0.60, 1.10, 0.60}},
        {"9/7", 9.0 / 7.0, {36.70, 0.60, 4.20, 0.60, 0.90, 0.60}},
        {"5/4", 1.25, {26.30, 0.60, 3.20, 0.60, 0.80, 0.60}},
    }};
    return table;
}

inline int column(double alpha4, bool automatic) {
    for (int a = 0; a < 3; ++a) {
        if (std::abs(alpha4 - kAlpha4[a]) <= 1e-12 * kAlpha4[a]) return 2 * a + (automatic ? 1 : 0);
    }
    return -1;
}

/// Published value for a cell, if the cell is part of the table.
inline std::optional<double> reference(double n, double alpha4, bool automatic) {
    const int col = column(alpha4, automatic);
    if (col < 0) return std::nullopt;
    for (const auto& r : rows()) {
        if (std::abs(r.n - n) < 1e-12) return r.reference[static_cast<std::size_t>(col)];
    }
    return std::nullopt;
}

} // namespace table1

/// One-compacton setup used throughout the delay table: c = 1, c0 = 0.5,
/// dx = dt = 0.1, compacton on a grid node three support widths in.
inline ExperimentConfig table1_config(double n, double alpha4, bool automatic, double final_time = 2000.0,
                                      std::string n_text = {}) {
    ExperimentConfig cfg;
    cfg.scenario = Scenario::one_compacton;
    cfg.n = n;
    cfg.n_text = n_text.empty() ? format_number(n) : std::move(n_text);
    cfg.c0 = 0.5;
    cfg.alpha4 = alpha4;
    cfg.alpha2_mode = automatic ? Alpha2Mode::automatic : Alpha2Mode::zero;
    cfg.dx = 0.1;
    cfg.dt = 0.1;
    cfg.T = final_time;
    cfg.diagnostics_stride = 1000;
    cfg.compactons = {CompactonSpec{n, 1.0, default_center(cfg)}};
    cfg.L = default_domain_length(cfg);
    cfg.output_dir.clear();
    return cfg;
}

struct Table1Cell {
    std::string n_text;
    double n = 0.0;
    double alpha4 = 0.0;
    bool automatic = false;
    double alpha2 = 0.0;
    double delay = std::numeric_limits<double>::quiet_NaN();
    std::string status;
    std::optional<double> reference;
    double wall_time_s = 0.0;
};

inline Table1Cell run_table1_cell(const ExperimentConfig& cfg) {
    Table1Cell cell;
    cell.n_text = cfg.n_text;
    cell.n = cfg.n;
    cell.alpha4 = cfg.alpha4;
    cell.automatic = cfg.alpha2_mode == Alpha2Mode::automatic;
    cell.reference = table1::reference(cfg.n, cfg.alpha4, cell.automatic);
    try {
        RunOptions opts;
        opts.write_files = false;
        const RunResult r = run(cfg, opts);
        cell.alpha2 = r.alpha2;
        cell.status = to_string(r.summary.status);
        cell.wall_time_s = r.manifest.at("wall_time_s").get<double>();
        if (r.summary.status == StepStatus::ok) {
            cell.delay = peak_delay(r.summary.final_state, r.grid, cfg.compactons.front(), r.summary.final_time, cfg.c0);
        }
    } catch (const std::exception& e) {
        cell.status = std::string("error: ") + e.what();
    }
    return cell;
}

struct Table1Options {
    std::filesystem::path output_dir = "table1";
    unsigned threads = 0; ///< 0 picks the hardware concurrency
    double final_time = 2000.0;
    /// Optional filters; empty means every value.
    std::vector<double> n_values;
    std::vector<double> alpha4_values;
    std::function<void(const Table1Cell&)> on_cell;
};

namespace detail {

inline bool selected(const std::vector<double>& filter, double v) {
    if (filter.empty()) return true;
    for (double f : filter) {
        if (std::abs(f - v) <= 1e-9 * std::max(1.0, std::abs(v))) return true;
    }
    return false;
}

} // namespace detail

/// Runs the selected cells of the n x alpha4 x {zero, auto} table on a small
/// thread pool and writes table1.csv (wide, one row per n), table1_cells.csv
/// (long form with status and published value) and manifest.json.
inline std::vector<Table1Cell> table1_harness(const Table1Options& options = {}) {
    std::vector<ExperimentConfig> configs;
    for (const auto& row : table1::rows()) {
        if (!detail::selected(options.n_values, row.n)) continue;
        for (double a4 : table1::kAlpha4) {
            if (!detail::selected(options.alpha4_values, a4)) continue;
            for (bool automatic : {false, true}) {
                configs.push_back(table1_config(row.n, a4, automatic, options.final_time, row.n_text));
            }
        }
    }

    std::vector<Table1Cell> cells(configs.size());
    std::atomic<std::size_t> next{0};
    std::mutex report;
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            cells[i] = run_table1_cell(configs[i]);
            if (options.on_cell) {
                std::lock_guard lock(report);
                options.on_cell(cells[i]);
            }
        }
    };
    unsigned threads = options.threads != 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(configs.size(), 1)));
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    pool.clear();

    if (options.output_dir.empty()) return cells;
    std::filesystem::create_directories(options.output_dir);

    std::string wide = "n,a4_1e-2_zero,a4_1e-2_auto,a4_1e-3_zero,a4_1e-3_auto,a4_1e-4_zero,a4_1e-4_auto\n";
    for (const auto& row : table1::rows()) {
        std::array<double, 6> values;
        values.fill(std::numeric_limits<double>::quiet_NaN());
        bool any = false;
        for (const auto& c : cells) {
            if (c.n_text != row.n_text) continue;
            values[static_cast<std::size_t>(table1::column(c.alpha4, c.automatic))] = c.delay;
            any = true;
        }
        if (!any) continue;
        wide += row.n_text;
        for (double v : values) wide += ',' + csv::number(v);
        wide += '\n';
    }

    std::string tall = "n,n_value,alpha4,alpha2_mode,alpha2,delay,reference,status,wall_time_s\n";
    for (const auto& c : cells) {
        tall += c.n_text + ',' + csv::number(c.n) + ',' + csv::number(c.alpha4) + ',' + (c.automatic ? "auto" : "zero") +
                ',' + csv::number(c.alpha2) + ',' + csv::number(c.delay) + ',' +
                csv::number(c.reference.value_or(std::numeric_limits<double>::quiet_NaN())) + ',' + c.status + ',' +
                csv::number(c.wall_time_s) + '\n';
    }

    nlohmann::json manifest{{"final_time", options.final_time},
                            {"c", 1.0},
                            {"c0", 0.5},
                            {"dx", 0.1},
                            {"dt", 0.1},
                            {"cells", cells.size()},
                            {"files", nlohmann::json::array()}};
    for (const auto& [name, bytes] : {std::pair<std::string, const std::string&>{"table1.csv", wide},
                                      std::pair<std::string, const std::string&>{"table1_cells.csv", tall}}) {
        std::ofstream out(options.output_dir / name, std::ios::binary);
        out << bytes;
        if (!out) throw std::runtime_error("failed to write " + (options.output_dir / name).string());
        manifest["files"].push_back({{"name", name}, {"bytes", bytes.size()}, {"git_blob_sha1", git_blob_sha1(bytes)}});
    }
    std::ofstream(options.output_dir / "manifest.json") << manifest.dump(2) << '\n';
    return cells;
}

} // namespace compacton
