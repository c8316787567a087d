#pragma once

#include <cstdint>

#include "advgauss/linalg.hpp"

namespace advgauss {

enum class Verdict { Accept, Reject, Fail };

const char* to_string(Verdict v);

/// Parameters of one tolerant test, with the derived batch size n,
/// odd round count r and acceptance threshold tau.
struct TesterConfig {
    double eps1 = 0.0;
    double eps2 = 0.0;
    double delta = 0.0;
    Eigen::Index dim = 0;
    std::int64_t n = 0;
    std::int64_t rounds = 0;
    double tau = 0.0;

    std::int64_t required_samples() const { return n * rounds; }
};

struct TestResult {
    Verdict verdict = Verdict::Fail;
    /// Set when the dimension precondition behind the tester's guarantee
    /// does not hold; the verdict is still computed.
    bool guarantee_void = false;
};

/// 1 + ceil(ln(12/delta)). The count formulas accept 0 < delta < 12;
/// tester configurations require 0 < delta < 1.
std::int64_t r_delta(double delta);
/// ceil(ln(12/delta)), bumped to the next odd integer when even.
std::int64_t majority_rounds(double delta);

/// m(d, eps, delta) = ceil(16 sqrt(d) / (3 eps^2)) * r_delta.
std::int64_t mean_batch_size(Eigen::Index d, double eps);
std::int64_t mean_sample_count(Eigen::Index d, double eps, double delta);
/// m'(d, eps, delta) = ceil(3200 d max{1/eps^2, 1/eps, 1}) * r_delta.
std::int64_t cov_batch_size(Eigen::Index d, double eps);
std::int64_t cov_sample_count(Eigen::Index d, double eps, double delta);

TesterConfig mean_tester_config(Eigen::Index d, double eps1, double eps2, double delta);
TesterConfig cov_tester_config(Eigen::Index d, double eps1, double eps2, double delta);

/// y_n = || n^{-1/2} Σ x_i ||².
double mean_stat(const Batch& batch);

/// T_n = 2/(n(n-1)) Σ_{i<j} h(x_i, x_j) with
/// h(x, y) = (xᵀy)² - (xᵀx + yᵀy) + d, evaluated in O(n d²) through the
/// Gram matrix instead of the O(n² d) pair loop.
double cov_stat(const Batch& batch);

/// T_n from precomputed sums: `gram` = Σ x xᵀ, `fourth` = Σ ||x||⁴,
/// `sq_norms` = Σ ||x||².
double cov_stat_from_moments(const SymMat& gram, double fourth, double sq_norms, std::int64_t n);

/// Majority over `rounds` disjoint prefixes of size n. Fail when the batch is short.
TestResult tolerant_mean_test(const TesterConfig& cfg, const Batch& batch);
TestResult tolerant_cov_test(const TesterConfig& cfg, const Batch& batch);

/// Guarantee preconditions: d >= (16 eps2² / (eps2² - eps1²))² for the mean
/// tester and d >= eps2² for the covariance tester.
bool mean_guarantee_holds(Eigen::Index d, double eps1, double eps2);
bool cov_guarantee_holds(Eigen::Index d, double eps2);

/// exp(-d t² / (4 (d + 2λ)(d + 2λ + t))) bounds P(y > d + λ + t); needs t > 0.
double chisq_upper_tail_bound(double d, double lambda, double t);
/// exp(-d t² / (4 (d + 2λ)²)) bounds P(y < d + λ - t); needs 0 < t < d + λ.
double chisq_lower_tail_bound(double d, double lambda, double t);

struct ChiSquareTails {
    double upper = 1.0;
    double lower = 1.0;
};

/// Both tails at once; t must lie in (0, d + λ). Throws ArgumentError otherwise.
ChiSquareTails chisq_tail_bounds(double d, double lambda, double t);

}  // namespace advgauss
