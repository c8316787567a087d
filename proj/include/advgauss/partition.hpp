#pragma once

#include <iosfwd>
#include <vector>

#include "advgauss/gauss.hpp"
#include "advgauss/linalg.hpp"

namespace advgauss {

using Block = std::vector<Eigen::Index>;  // sorted, 0-based coordinates

/// Family of index blocks over [d]. For q = 1 every coordinate, and for
/// q = 2 every cell (i, j) of a d x d matrix, must be covered by between
/// `a` and `b` blocks; block B covers (i, j) iff both i and j lie in B.
struct PartitionScheme {
    std::vector<Block> blocks;
    int q = 1;
    Eigen::Index d = 0;
    Eigen::Index k = 0;
    int a = 1;
    int b = 1;

    std::size_t size() const { return blocks.size(); }
};

struct CoverageReport {
    bool ok = false;
    int min_cover = 0;
    int max_cover = 0;
};

/// Exact coverage counts of every coordinate (q = 1) or cell (q = 2).
CoverageReport verify_scheme(const PartitionScheme& scheme);

/// [0, k), [k, 2k), ...; the last block may be shorter.
PartitionScheme contiguous_blocks(Eigen::Index d, Eigen::Index k);

struct PairSchemeResult {
    PartitionScheme scheme;
    int retries = 0;  // redraws before a passing scheme was found
};

/// Number of random k-subsets drawn by `random_pair_scheme`.
std::size_t pair_scheme_block_count(Eigen::Index d, Eigen::Index k);
/// Coverage ceiling ceil(30 (d - 1) ln d / (k - 1)) the random construction is checked against.
int pair_scheme_cover_bound(Eigen::Index d, Eigen::Index k);

/// Draws uniform k-subsets until the family is a (q=2, a=1, b) scheme with
/// b = pair_scheme_cover_bound(d, k). The returned `b` is the measured
/// maximum coverage. Throws NumericError after `retry_limit` failed draws.
PairSchemeResult random_pair_scheme(Eigen::Index d, Eigen::Index k, Rng& rng, int retry_limit = 50);

/// Rows of `batch` listed in `block`, sample order preserved.
Batch project_batch(const Batch& batch, const Block& block);

/// One block per line, space-separated 1-based indices.
void write_scheme(std::ostream& out, const PartitionScheme& scheme);
/// Inverse of write_scheme. k, a = 1 and b are taken from the loaded blocks.
PartitionScheme read_scheme(std::istream& in, int q, Eigen::Index d);

}  // namespace advgauss
