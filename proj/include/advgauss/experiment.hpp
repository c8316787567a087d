#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "advgauss/gauss.hpp"
#include "advgauss/results.hpp"

namespace advgauss {

inline constexpr const char* kVersion = "0.1.0";

enum class ExperimentMode { MeanExp, CovExp, Pipeline };

const char* to_string(ExperimentMode mode);
ExperimentMode parse_mode(const std::string& text);

struct ExperimentConfig {
    ExperimentMode mode = ExperimentMode::MeanExp;
    Eigen::Index d = 500;
    Eigen::Index s = 100;
    double q = 0.1;
    std::int64_t n_min = 10;
    std::int64_t n_max = 300;
    std::int64_t n_step = 10;
    std::int64_t repeats = 10;
    std::uint64_t seed = 314159;
    double eps = 0.25;
    double delta = 0.1;
    double eta = 0.25;
    double c_emp = 8.0;
    /// Pick the constraint radius on an 80/20 split instead of using r = q.
    bool holdout = false;
    std::string output_path;

    /// Throws ArgumentError when an invariant is violated.
    void validate() const;
    std::vector<std::int64_t> grid() const;
};

/// Applies `key = value` lines (blank lines and '#' comments ignored) on top of `cfg`.
void apply_config_text(std::istream& in, ExperimentConfig& cfg);
void apply_config_entry(const std::string& key, const std::string& value, ExperimentConfig& cfg);
/// The config in the same `key = value` format, plus the artifact version.
void write_config_text(std::ostream& out, const ExperimentConfig& cfg);

/// Sparse gap vector: s leading entries of ±q/s with uniform signs, zeros after.
Vec build_ground_truth(Eigen::Index d, Eigen::Index s, double q, Rng& rng);

/// Constrained (r = q, or holdout-selected) vs empirical mean on prefixes
/// of one batch of n_max draws per repeat. Error: l2 distance to the truth.
std::vector<ResultRow> run_mean_experiment(const ExperimentConfig& cfg);

/// Covariance analog: truth Σ = I + diag(gap), advice I. Grid values count
/// raw draws, paired into n/2 zero-mean samples. Error: Frobenius distance.
std::vector<ResultRow> run_cov_experiment(const ExperimentConfig& cfg);

/// One full test_and_optimize_mean run per repeat, plus the empirical mean
/// on the same number of fresh draws.
std::vector<ResultRow> run_pipeline_experiment(const ExperimentConfig& cfg);

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

/// Writes the CSV and its `<path>.config` sidecar.
void write_results(const std::filesystem::path& path, const std::vector<ResultRow>& rows,
                   const ExperimentConfig& cfg);

}  // namespace advgauss
