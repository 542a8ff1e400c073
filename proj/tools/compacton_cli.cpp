// Command-line front end: run a config document, or sweep the delay table.
//
//   compacton run configs/one_compacton.toml
//   compacton table1 --out table1 --threads 4 --n 2 --alpha4 1e-3
//
// Exit codes: 0 success, 2 bad input, 3 numerical failure.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "compacton/compacton.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kBadInput = 2;
constexpr int kNumerical = 3;

int run_command(const std::string& path, const std::optional<std::string>& out_override) {
    compacton::ExperimentConfig cfg = compacton::parse_config(compacton::read_file(path));
    if (out_override) cfg.output_dir = *out_override;
    const compacton::RunResult r = compacton::run(cfg);
    const auto& m = r.manifest;
    std::printf("status      %s\n", m["status"].get<std::string>().c_str());
    std::printf("final time  %g (%zu steps)\n", r.summary.final_time, r.summary.steps_taken);
    std::printf("alpha2      %.17g\n", r.alpha2);
    std::printf("mass drift  %.3e\n", m["mass"]["relative_drift"].get<double>());
    std::printf("newton      %zu iterations, max %d per step\n", r.summary.newton_iterations,
                r.summary.max_newton_iterations);
    std::printf("wall time   %.1f s\n", m["wall_time_s"].get<double>());
    if (!cfg.output_dir.empty()) std::printf("outputs     %s\n", cfg.output_dir.string().c_str());
    return r.summary.status == compacton::StepStatus::ok ? kOk : kNumerical;
}

int table1_command(const compacton::Table1Options& base) {
    compacton::Table1Options opts = base;
    opts.on_cell = [](const compacton::Table1Cell& c) {
        std::printf("n=%-4s alpha4=%-6g %-4s delay=%9.2f  published=%9.2f  %s  (%.0f s)\n", c.n_text.c_str(),
                    c.alpha4, c.automatic ? "auto" : "zero", c.delay,
                    c.reference.value_or(std::numeric_limits<double>::quiet_NaN()), c.status.c_str(), c.wall_time_s);
        std::fflush(stdout);
    };
    const auto cells = compacton::table1_harness(opts);
    bool all_ok = true;
    for (const auto& c : cells) all_ok = all_ok && c.status == "ok";
    return all_ok ? kOk : kNumerical;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"K(n,n) compacton simulations with Pade differences and tail removal"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "integrate the scenario described by a config document");
    std::string config_path;
    std::optional<std::string> out_override;
    run->add_option("config", config_path, "config document (key = value)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_override, "override output_dir");

    auto* table = app.add_subcommand("table1", "peak delays at t = 2000 for every n, alpha4 and alpha2 choice");
    compacton::Table1Options topts;
    std::string out_dir = "table1";
    table->add_option("--out", out_dir, "output directory")->capture_default_str();
    table->add_option("--threads", topts.threads, "worker threads (0 = all cores)")->capture_default_str();
    table->add_option("--final-time", topts.final_time, "integration time")->capture_default_str();
    table->add_option("--n", topts.n_values, "restrict to these exponents");
    table->add_option("--alpha4", topts.alpha4_values, "restrict to these alpha4 values");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kBadInput;
    }

    try {
        if (*run) return run_command(config_path, out_override);
        topts.output_dir = out_dir;
        return table1_command(topts);
    } catch (const compacton::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadInput;
    } catch (const compacton::SingularParameter& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadInput;
    } catch (const compacton::NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadInput;
    }
}
