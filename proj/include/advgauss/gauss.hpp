#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include <boost/random/normal_distribution.hpp>

#include "advgauss/linalg.hpp"

namespace advgauss {

/// Seeded generator for one substream. Streams keyed by (seed, trial, phase)
/// are statistically independent and fully reproducible.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t trial = 0, std::uint64_t phase = 0);

    double normal() { return normal_(engine_); }
    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);
    /// +1 or -1 with equal probability.
    double sign() { return below(2) == 0 ? 1.0 : -1.0; }

    std::mt19937_64& engine() { return engine_; }

    /// Derives the seed of substream (trial, phase) under `seed`.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t trial, std::uint64_t phase);

private:
    std::mt19937_64 engine_;
    boost::random::normal_distribution<double> normal_;
};

/// N(mean, covariance). An empty covariance means the identity, which
/// skips the factorization and the matrix product when sampling.
class GaussianModel {
public:
    static GaussianModel isotropic(Vec mean);
    static GaussianModel with_covariance(Vec mean, SymMat covariance);

    Eigen::Index dim() const { return mean_.size(); }
    const Vec& mean() const { return mean_; }
    bool identity_covariance() const { return !covariance_.has_value(); }
    SymMat covariance() const;
    /// Factor F with F Fᵀ = covariance (eigenvalues below 1e-12·||Σ||₂ dropped).
    const Eigen::MatrixXd& factor() const { return factor_; }

private:
    GaussianModel(Vec mean, std::optional<SymMat> covariance);

    Vec mean_;
    std::optional<SymMat> covariance_;
    Eigen::MatrixXd factor_;
};

/// Budget-accounting source of i.i.d. draws. Single owner; not thread-safe.
class SampleStream {
public:
    SampleStream(GaussianModel model, Rng rng) : model_(std::move(model)), rng_(std::move(rng)) {}
    SampleStream(GaussianModel model, std::uint64_t seed) : SampleStream(std::move(model), Rng(seed)) {}

    /// n draws as the columns of a dim() x n matrix.
    Batch draw(Eigen::Index n);

    std::uint64_t drawn_count() const { return drawn_; }
    const GaussianModel& model() const { return model_; }
    Eigen::Index dim() const { return model_.dim(); }

private:
    GaussianModel model_;
    Rng rng_;
    std::uint64_t drawn_ = 0;
};

/// Column i of the result is (x_{2i+1} - x_{2i}) / sqrt(2), which is
/// N(0, Σ) whatever the mean. Throws ArgumentError on an odd column count.
Batch pair_to_zero_mean(const Batch& batch);

Vec empirical_mean(const Batch& batch);

/// (1/2n) Σ d_i d_iᵀ with d_i the within-pair differences; unbiased for Σ.
SymMat empirical_cov_paired(const Batch& batch);

/// (1/n) Σ y_i y_iᵀ for zero-mean samples.
SymMat second_moment(const Batch& batch);

/// Closed-form KL(P || Q). Throws NumericError when Σ_Q is singular.
double kl_gaussians(const GaussianModel& p, const GaussianModel& q);

/// min(1, sqrt(kl / 2)).
double tv_upper_via_pinsker(double kl);

struct DistanceReport {
    double kl = 0.0;
    double tv_upper = 0.0;
};

DistanceReport distance(const GaussianModel& p, const GaussianModel& q);

}  // namespace advgauss
