#include "advgauss/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "advgauss/estimators.hpp"

namespace advgauss {

const char* to_string(ExperimentMode mode) {
    switch (mode) {
        case ExperimentMode::MeanExp: return "mean-exp";
        case ExperimentMode::CovExp: return "cov-exp";
        case ExperimentMode::Pipeline: return "pipeline";
    }
    return "?";
}

ExperimentMode parse_mode(const std::string& text) {
    if (text == "mean-exp") return ExperimentMode::MeanExp;
    if (text == "cov-exp") return ExperimentMode::CovExp;
    if (text == "pipeline") return ExperimentMode::Pipeline;
    throw ArgumentError("unknown mode '" + text + "'");
}

void ExperimentConfig::validate() const {
    if (d < 1) throw ArgumentError("config: d must be at least 1");
    if (s < 0 || s > d) throw ArgumentError("config: need 0 <= s <= d");
    if (!(q >= 0.0) || !std::isfinite(q)) throw ArgumentError("config: q must be a finite nonnegative number");
    if (n_min < 1 || n_min > n_max) throw ArgumentError("config: need 1 <= n_min <= n_max");
    if (n_step < 1) throw ArgumentError("config: n_step must be positive");
    if (repeats < 1) throw ArgumentError("config: repeats must be at least 1");
    if (mode == ExperimentMode::CovExp) {
        if (d < 2) throw ArgumentError("config: cov-exp needs d >= 2");
        for (std::int64_t n : grid()) {
            if (n % 2 != 0) throw ArgumentError("config: cov-exp grid values must be even (draws are paired)");
        }
    }
    if (mode == ExperimentMode::Pipeline) {
        if (!(eps > 0.0 && eps < 1.0)) throw ArgumentError("config: eps must lie in (0, 1)");
        if (!(delta > 0.0 && delta < 1.0)) throw ArgumentError("config: delta must lie in (0, 1)");
        if (!(eta >= 0.0 && eta <= 0.25)) throw ArgumentError("config: eta must lie in [0, 1/4]");
    }
}

std::vector<std::int64_t> ExperimentConfig::grid() const {
    std::vector<std::int64_t> values;
    for (std::int64_t n = n_min; n <= n_max; n += n_step) values.push_back(n);
    return values;
}

namespace {

std::string trim(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = text.find_last_not_of(" \t\r");
    return text.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || end != value.data() + value.size()) {
        throw ArgumentError("config: bad value '" + value + "' for " + key);
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ArgumentError("config: bad boolean '" + value + "' for " + key);
}

}  // namespace

void apply_config_entry(const std::string& key, const std::string& value, ExperimentConfig& cfg) {
    if (key == "mode") cfg.mode = parse_mode(value);
    else if (key == "d") cfg.d = parse_number<Eigen::Index>(key, value);
    else if (key == "s") cfg.s = parse_number<Eigen::Index>(key, value);
    else if (key == "q") cfg.q = parse_number<double>(key, value);
    else if (key == "n_min") cfg.n_min = parse_number<std::int64_t>(key, value);
    else if (key == "n_max") cfg.n_max = parse_number<std::int64_t>(key, value);
    else if (key == "n_step") cfg.n_step = parse_number<std::int64_t>(key, value);
    else if (key == "repeats") cfg.repeats = parse_number<std::int64_t>(key, value);
    else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "eps") cfg.eps = parse_number<double>(key, value);
    else if (key == "delta") cfg.delta = parse_number<double>(key, value);
    else if (key == "eta") cfg.eta = parse_number<double>(key, value);
    else if (key == "c_emp") cfg.c_emp = parse_number<double>(key, value);
    else if (key == "holdout") cfg.holdout = parse_bool(key, value);
    else if (key == "output") cfg.output_path = value;
    else throw ArgumentError("config: unknown key '" + key + "'");
}

void apply_config_text(std::istream& in, ExperimentConfig& cfg) {
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ArgumentError("config: line " + std::to_string(line_no) + " is not 'key = value'");
        }
        apply_config_entry(trim(line.substr(0, eq)), trim(line.substr(eq + 1)), cfg);
    }
}

void write_config_text(std::ostream& out, const ExperimentConfig& cfg) {
    out << "# advgauss " << kVersion << '\n'
        << "version = " << kVersion << '\n'
        << "mode = " << to_string(cfg.mode) << '\n'
        << "d = " << cfg.d << '\n'
        << "s = " << cfg.s << '\n'
        << "q = " << format_double(cfg.q) << '\n'
        << "n_min = " << cfg.n_min << '\n'
        << "n_max = " << cfg.n_max << '\n'
        << "n_step = " << cfg.n_step << '\n'
        << "repeats = " << cfg.repeats << '\n'
        << "seed = " << cfg.seed << '\n'
        << "eps = " << format_double(cfg.eps) << '\n'
        << "delta = " << format_double(cfg.delta) << '\n'
        << "eta = " << format_double(cfg.eta) << '\n'
        << "c_emp = " << format_double(cfg.c_emp) << '\n'
        << "holdout = " << (cfg.holdout ? "true" : "false") << '\n'
        << "output = " << cfg.output_path << '\n';
}

Vec build_ground_truth(Eigen::Index d, Eigen::Index s, double q, Rng& rng) {
    if (s < 0 || s > d) throw ArgumentError("build_ground_truth: need 0 <= s <= d");
    if (!(q >= 0.0)) throw ArgumentError("build_ground_truth: q must be nonnegative");
    Vec gap = Vec::Zero(d);
    for (Eigen::Index i = 0; i < s; ++i) gap[i] = q / static_cast<double>(s) * rng.sign();
    return gap;
}

namespace {

constexpr std::uint64_t kTruthPhase = 0;
constexpr std::uint64_t kSamplePhase = 1;
constexpr std::uint64_t kPipelinePhase = 2;
constexpr std::uint64_t kBaselinePhase = 3;

// Few-pair prefixes can sit near a corner of the feasible set where Dykstra crawls.
constexpr DykstraOptions kExperimentDykstra{1e-8, 1'000'000};

Vec project_origin(const Vec& v, double r) {
    return project_l1_ball(v, Vec::Zero(v.size()), r);
}

// Radius from a geometric grid below ||train mean||_1, scored on the holdout mean.
double holdout_radius(const Batch& prefix) {
    const Eigen::Index n = prefix.cols();
    const Eigen::Index train = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(0.8 * static_cast<double>(n)), 1, n - 1);
    const Vec train_mean = empirical_mean(prefix.leftCols(train));
    const Vec hold_mean = empirical_mean(prefix.rightCols(n - train));
    const double top = train_mean.lpNorm<1>();
    double best_r = top;
    double best_loss = (train_mean - hold_mean).squaredNorm();
    for (int j = 1; j <= 24; ++j) {
        const double r = std::ldexp(top, -j);
        const double loss = (project_origin(train_mean, r) - hold_mean).squaredNorm();
        if (loss < best_loss) {
            best_loss = loss;
            best_r = r;
        }
    }
    if ((Vec::Zero(train_mean.size()) - hold_mean).squaredNorm() < best_loss) best_r = 0.0;
    return best_r;
}

Rng truth_rng(const ExperimentConfig& cfg) {
    return Rng(cfg.seed, 0, kTruthPhase);
}

}  // namespace

std::vector<ResultRow> run_mean_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    Rng truth = truth_rng(cfg);
    const Vec mu = build_ground_truth(cfg.d, cfg.s, cfg.q, truth);
    const std::vector<std::int64_t> grid = cfg.grid();

    std::vector<ResultRow> rows;
    for (std::int64_t run = 0; run < cfg.repeats; ++run) {
        SampleStream stream(GaussianModel::isotropic(mu), Rng(cfg.seed, static_cast<std::uint64_t>(run) + 1, kSamplePhase));
        const Batch samples = stream.draw(cfg.n_max);
        for (std::int64_t n : grid) {
            const auto prefix = samples.leftCols(n);
            const Vec emp = empirical_mean(prefix);
            const bool use_holdout = cfg.holdout && n >= 2;
            const double r = use_holdout ? holdout_radius(prefix) : cfg.q;
            const Vec opt = project_origin(emp, r);
            rows.push_back({run, n, "constrained", (opt - mu).norm(), n, use_holdout ? "holdout" : "oracle"});
            rows.push_back({run, n, "empirical", (emp - mu).norm(), n, "empirical"});
        }
    }
    sort_rows(rows);
    return rows;
}

std::vector<ResultRow> run_cov_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    Rng truth = truth_rng(cfg);
    const Vec gap = build_ground_truth(cfg.d, cfg.s, cfg.q, truth).cwiseAbs();
    const SymMat sigma = SymMat::Identity(cfg.d, cfg.d) + SymMat(gap.asDiagonal());
    const std::vector<std::int64_t> grid = cfg.grid();

    std::vector<ResultRow> rows;
    for (std::int64_t run = 0; run < cfg.repeats; ++run) {
        SampleStream stream(GaussianModel::with_covariance(Vec::Zero(cfg.d), sigma),
                            Rng(cfg.seed, static_cast<std::uint64_t>(run) + 1, kSamplePhase));
        const Batch paired = pair_to_zero_mean(stream.draw(cfg.n_max - cfg.n_max % 2));
        for (std::int64_t n : grid) {
            const auto prefix = paired.leftCols(n / 2);
            const SymMat emp = second_moment(prefix);
            const SymMat opt = covariance_program(prefix, cfg.q, kExperimentDykstra);
            rows.push_back({run, n, "constrained", (opt - sigma).norm(), n, "oracle"});
            rows.push_back({run, n, "empirical", (emp - sigma).norm(), n, "empirical"});
        }
    }
    sort_rows(rows);
    return rows;
}

std::vector<ResultRow> run_pipeline_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    Rng truth = truth_rng(cfg);
    const Vec mu = build_ground_truth(cfg.d, cfg.s, cfg.q, truth);
    const Vec advice = Vec::Zero(cfg.d);
    EstimatorOptions opts;
    opts.c_emp = cfg.c_emp;

    std::vector<ResultRow> rows;
    for (std::int64_t run = 0; run < cfg.repeats; ++run) {
        const auto trial = static_cast<std::uint64_t>(run) + 1;
        SampleStream stream(GaussianModel::isotropic(mu), Rng(cfg.seed, trial, kPipelinePhase));
        const EstimatorReport report = test_and_optimize_mean(cfg.eps, cfg.delta, cfg.eta, advice, stream, opts);
        const auto total = static_cast<std::int64_t>(report.total_samples());
        rows.push_back({run, total, "pipeline", (report.mean_estimate - mu).norm(), total, to_string(report.branch)});

        SampleStream baseline(GaussianModel::isotropic(mu), Rng(cfg.seed, trial, kBaselinePhase));
        const Vec emp = empirical_mean(baseline.draw(total));
        rows.push_back({run, total, "empirical", (emp - mu).norm(), total, "empirical"});
    }
    sort_rows(rows);
    return rows;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
    switch (cfg.mode) {
        case ExperimentMode::MeanExp: return run_mean_experiment(cfg);
        case ExperimentMode::CovExp: return run_cov_experiment(cfg);
        case ExperimentMode::Pipeline: return run_pipeline_experiment(cfg);
    }
    throw ArgumentError("run_experiment: unknown mode");
}

void write_results(const std::filesystem::path& path, const std::vector<ResultRow>& rows,
                   const ExperimentConfig& cfg) {
    write_csv(path, rows);
    std::filesystem::path sidecar = path;
    sidecar += ".config";
    std::ofstream out(sidecar, std::ios::binary);
    if (!out) throw std::runtime_error("write_results: cannot open " + sidecar.string());
    write_config_text(out, cfg);
}

}  // namespace advgauss
