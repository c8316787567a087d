#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "advgauss/approxl1.hpp"
#include "advgauss/gauss.hpp"
#include "advgauss/linalg.hpp"

namespace advgauss {

enum class Branch { AdviceExact, Optimized, EmpiricalFallback, EarlyTermination };

const char* to_string(Branch b);

struct EstimatorReport {
    Vec mean_estimate;
    std::optional<SymMat> cov_estimate;
    Branch branch = Branch::EmpiricalFallback;
    /// Raw draws taken from the stream, keyed by phase name, in draw order
    /// of the phases ("precondition", "approx_l1", "optimize", "empirical", "mean").
    std::map<std::string, std::uint64_t> samples_by_phase;
    std::optional<double> lambda;
    std::vector<std::string> warnings;
    L1Outcome outcome;

    std::uint64_t total_samples() const;
};

struct EstimatorOptions {
    /// Constant in front of the empirical-fallback sample counts.
    double c_emp = 8.0;
    /// Absolute constant of the preconditioner's eigenvalue-ratio bound.
    double c0 = 1.0;
    bool use_preconditioner = false;
    /// Seed for the random pair scheme of the covariance path.
    std::uint64_t scheme_seed = 0;
    ApproxL1Options approx;
    DykstraOptions dykstra;
};

/// argmin_{||b||_1 <= r} Σ ||y_i - b||², i.e. the l1-ball projection of the sample mean.
Vec constrained_mean_lasso(const Batch& batch, double r);

/// argmin over {A >= I, ||vec(A - I)||_1 <= r} of Σ ||A - y_i y_iᵀ||_F².
/// The objective is n ||A - S||_F² + const with S = (1/n) Σ y_i y_iᵀ, so
/// this is the Frobenius projection of S, computed by Dykstra's method.
SymMat covariance_program(const Batch& batch, double r, const DykstraOptions& opts = {});

/// A = sqrt(k) Π_small + Π_big built from d zero-mean samples, where
/// Π_small spans the empirical eigenvectors with eigenvalue below 1 and
/// k = (1 + c0 sqrt((d + ln(1/δ)) / d)) / λ̂_min.
struct Preconditioner {
    SymMat matrix;
    double k_scale = 1.0;
    std::vector<Eigen::Index> small_indices;
    Vec empirical_eigenvalues;

    /// A^{-1}; A is positive definite by construction.
    SymMat inverse() const;
};

Preconditioner precondition(const Batch& batch, double delta, double c0 = 1.0);

/// Spectral norms ||(A S̃ A)^{-1/2} A S A (A S̃ A)^{-1/2} - I|| and
/// ||S̃^{-1/2} S S̃^{-1/2} - I||, which agree for any invertible A.
struct ConjugationNorms {
    double preconditioned = 0.0;
    double original = 0.0;
};

ConjugationNorms conjugation_norms(const SymMat& a, const SymMat& sigma, const SymMat& advice);

/// Symmetric M^{p} for p = ±1/2 on a positive definite matrix.
SymMat matrix_power_half(const SymMat& m, bool inverse);

/// Mean learner for N(mu, I_d) with advice mu~. 0 <= eta <= 1/4.
EstimatorReport test_and_optimize_mean(double eps, double delta, double eta, const Vec& advice,
                                       SampleStream& stream, const EstimatorOptions& opts = {});

/// Covariance learner for N(mu, Σ) with positive definite advice Σ~.
/// 0 <= eta <= 1. Also returns the empirical mean.
EstimatorReport test_and_optimize_covariance(double eps, double delta, double eta, const SymMat& advice,
                                             SampleStream& stream, const EstimatorOptions& opts = {});

/// Sample counts of the individual phases, exposed for budget comparisons.
std::int64_t mean_fallback_samples(Eigen::Index d, double eps, double delta, double c_emp);
std::int64_t cov_fallback_pairs(Eigen::Index d, double eps, double delta, double c_emp);
std::int64_t lasso_samples(Eigen::Index d, double lambda, double eps, double delta);
std::int64_t cov_program_pairs(Eigen::Index d, double lambda, double eps, double delta);

/// Parameters the learners derive from (d, eps, eta).
struct MeanPlan {
    Eigen::Index k = 1;
    double alpha = 0.0;
    double zeta = 0.0;
    double delta_prime = 0.0;
    std::int64_t test_samples = 0;
};

MeanPlan plan_mean(Eigen::Index d, double eps, double delta, double eta);

}  // namespace advgauss
