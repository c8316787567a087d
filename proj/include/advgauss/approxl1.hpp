#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "advgauss/partition.hpp"

namespace advgauss {

/// Result of the block-wise exponential search.
///   Fail   - some block rejected every level
///   OK     - per-block levels small enough to certify the advice (mean only)
///   Lambda - `lambda` = 2 Σ_j sqrt(|B_j|) o_j bounds the l1 norm of the gap
struct L1Outcome {
    enum class Kind { Fail, OK, Lambda };

    Kind kind = Kind::Fail;
    double lambda = 0.0;
    /// o_j per block: the first accepted level, empty if none accepted.
    std::vector<std::optional<double>> block_levels;
    PartitionScheme scheme;
    double delta_prime = 0.0;
    std::int64_t samples_required = 0;

    /// Σ_j o_j² over blocks that accepted.
    double sum_squared_levels() const;
};

const char* to_string(L1Outcome::Kind kind);

struct ApproxL1Options {
    /// OK is returned when 4 Σ o_j² <= (ok_scale * alpha)². The default of
    /// 1 is the literal rule, which can never fire because every o_j >= alpha;
    /// ok_scale > 2 sqrt(w) makes OK reachable.
    double ok_scale = 1.0;
};

/// l_i = 2^{i-1} alpha for i = 1 .. ceil(log2(zeta / alpha)). Requires zeta > 2 alpha > 0.
std::vector<double> level_schedule(double alpha, double zeta);

/// delta' = delta / (w * ceil(log2(zeta / alpha))).
double split_delta(double delta, std::size_t blocks, double alpha, double zeta);

/// Mean variant over the contiguous blocks of size k. Samples come from
/// N(mu, I_d); throws ArgumentError when the batch holds fewer than
/// m(k, alpha, delta') columns.
L1Outcome approx_l1_mean(double delta, Eigen::Index k, double alpha, double zeta, const Batch& batch,
                         const ApproxL1Options& opts = {});

/// Covariance variant over a verified q = 2 scheme. Samples must be
/// zero-mean; requires m'(k, alpha, delta') columns.
L1Outcome vectorized_approx_l1(double delta, double alpha, double zeta, const Batch& batch,
                               const PartitionScheme& scheme);

/// 4 b Σ o_j² <= eps², with b the scheme's coverage ceiling. False unless
/// the outcome is Lambda.
bool early_termination_check(const L1Outcome& outcome, double eps);

}  // namespace advgauss
