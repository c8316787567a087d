// Command-line driver for the experiment harness.
//
//   advgauss mean-exp  [--config FILE] [--d D] [--s S] [--q Q] [--out CSV] ...
//   advgauss cov-exp   ...
//   advgauss pipeline  ...
//   advgauss plot-data CSV [--out SERIES_CSV]
//   advgauss --mode mean-exp|cov-exp|pipeline ...
//
// Exit status: 0 success, 1 argument error, 2 runtime or convergence error.

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "advgauss/errors.hpp"
#include "advgauss/experiment.hpp"
#include "advgauss/linalg.hpp"
#include "advgauss/results.hpp"

namespace {

using advgauss::ExperimentConfig;
using advgauss::ExperimentMode;

struct RunFlags {
    std::optional<std::string> config_file;
    std::map<std::string, std::optional<std::string>> values;
    bool holdout = false;
};

void add_run_flags(CLI::App& app, RunFlags& flags) {
    app.add_option("--config", flags.config_file, "key = value config file");
    const std::pair<const char*, const char*> keys[] = {
        {"d", "dimension"},
        {"s", "sparsity of the advice gap"},
        {"q", "l1 norm of the advice gap"},
        {"n_min", "smallest sample size on the grid"},
        {"n_max", "largest sample size on the grid"},
        {"n_step", "grid step"},
        {"repeats", "independent runs"},
        {"seed", "base RNG seed"},
        {"eps", "target accuracy (pipeline)"},
        {"delta", "failure probability (pipeline)"},
        {"eta", "block-size exponent (pipeline)"},
        {"c_emp", "empirical-fallback constant"},
        {"out", "output CSV path"},
    };
    for (const auto& [key, help] : keys) {
        std::string name = std::string("--") + key;
        if (name.find('_') != std::string::npos) {
            std::string dashed = name;
            std::replace(dashed.begin() + 2, dashed.end(), '_', '-');
            name = dashed + "," + name;
        }
        app.add_option(name, flags.values[key], help);
    }
    app.add_flag("--holdout", flags.holdout, "choose the radius on an 80/20 split (mean-exp)");
}

ExperimentConfig resolve_config(ExperimentMode mode, const RunFlags& flags) {
    ExperimentConfig cfg;
    cfg.mode = mode;
    if (mode == ExperimentMode::CovExp) {
        // Dykstra runs an eigendecomposition per iteration; keep the default desk-sized
        cfg.d = 20;
        cfg.s = 5;
    }
    if (flags.config_file) {
        std::ifstream in(*flags.config_file);
        if (!in) throw advgauss::ArgumentError("cannot open config file " + *flags.config_file);
        advgauss::apply_config_text(in, cfg);
        cfg.mode = mode;
    }
    for (const auto& [key, value] : flags.values) {
        if (!value) continue;
        advgauss::apply_config_entry(key == "out" ? "output" : key, *value, cfg);
    }
    if (flags.holdout) cfg.holdout = true;
    if (cfg.output_path.empty()) {
        char q[32];
        const auto end = std::to_chars(q, q + sizeof q, cfg.q).ptr;
        std::ostringstream name;
        name << to_string(cfg.mode) << "_d" << cfg.d << "_sparsity" << cfg.s << "_L1norm"
             << std::string_view(q, static_cast<std::size_t>(end - q)) << "_Nmax=" << cfg.n_max << "_runs=" << cfg.repeats << ".csv";
        cfg.output_path = name.str();
    }
    cfg.validate();
    return cfg;
}

int run(ExperimentMode mode, const RunFlags& flags) {
    const ExperimentConfig cfg = resolve_config(mode, flags);
    std::cerr << "advgauss: " << to_string(cfg.mode) << " d=" << cfg.d << " s=" << cfg.s
              << " q=" << advgauss::format_double(cfg.q) << " repeats=" << cfg.repeats << '\n';
    const auto rows = advgauss::run_experiment(cfg);
    advgauss::write_results(cfg.output_path, rows, cfg);
    std::cerr << "advgauss: wrote " << rows.size() << " rows to " << cfg.output_path << '\n';
    return 0;
}

int plot_data(const std::string& input, const std::optional<std::string>& output) {
    const auto points = advgauss::aggregate(advgauss::read_csv(input));
    if (output) {
        std::ofstream out(*output, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + *output);
        advgauss::write_series_csv(out, points);
    } else {
        advgauss::write_series_csv(std::cout, points);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian learning with advice: experiment harness"};
    app.set_version_flag("--version", std::string(advgauss::kVersion));

    std::optional<std::string> top_mode;
    RunFlags top_flags;
    app.add_option("--mode", top_mode, "mean-exp, cov-exp or pipeline");
    add_run_flags(app, top_flags);

    RunFlags mean_flags, cov_flags, pipeline_flags;
    CLI::App* mean_cmd = app.add_subcommand("mean-exp", "constrained vs empirical mean over a sample-size grid");
    add_run_flags(*mean_cmd, mean_flags);
    CLI::App* cov_cmd = app.add_subcommand("cov-exp", "constrained vs empirical covariance over a sample-size grid");
    add_run_flags(*cov_cmd, cov_flags);
    CLI::App* pipeline_cmd = app.add_subcommand("pipeline", "full test-and-optimize mean learner per repeat");
    add_run_flags(*pipeline_cmd, pipeline_flags);

    std::string plot_input;
    std::optional<std::string> plot_output;
    CLI::App* plot_cmd = app.add_subcommand("plot-data", "per-(estimator, n) mean and std of a result CSV");
    plot_cmd->add_option("csv,--in", plot_input, "result CSV")->required();
    plot_cmd->add_option("--out", plot_output, "series CSV (stdout if omitted)");

    app.require_subcommand(0, 1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*mean_cmd) return run(ExperimentMode::MeanExp, mean_flags);
        if (*cov_cmd) return run(ExperimentMode::CovExp, cov_flags);
        if (*pipeline_cmd) return run(ExperimentMode::Pipeline, pipeline_flags);
        if (*plot_cmd) return plot_data(plot_input, plot_output);
        if (top_mode) return run(advgauss::parse_mode(*top_mode), top_flags);
        std::cerr << app.help();
        return 1;
    } catch (const advgauss::ArgumentError& e) {
        std::cerr << "advgauss: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "advgauss: " << e.what() << '\n';
        return 2;
    }
}
