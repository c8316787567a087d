#include "advgauss/partition.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "advgauss/numeric.hpp"

namespace advgauss {

CoverageReport verify_scheme(const PartitionScheme& scheme) {
    CoverageReport report;
    const Eigen::Index d = scheme.d;
    if (d < 1 || (scheme.q != 1 && scheme.q != 2)) return report;

    bool sizes_ok = true;
    Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(d, scheme.q == 1 ? 1 : d);
    for (const Block& block : scheme.blocks) {
        if (static_cast<Eigen::Index>(block.size()) > scheme.k || block.empty()) sizes_ok = false;
        for (Eigen::Index i : block) {
            if (i < 0 || i >= d) return report;
        }
        if (scheme.q == 1) {
            for (Eigen::Index i : block) ++counts(i, 0);
        } else {
            for (Eigen::Index i : block) {
                for (Eigen::Index j : block) ++counts(i, j);
            }
        }
    }
    report.min_cover = counts.minCoeff();
    report.max_cover = counts.maxCoeff();
    report.ok = sizes_ok && report.min_cover >= scheme.a && report.max_cover <= scheme.b;
    return report;
}

PartitionScheme contiguous_blocks(Eigen::Index d, Eigen::Index k) {
    if (!(k >= 1 && k <= d)) throw ArgumentError("contiguous_blocks: need 1 <= k <= d");
    PartitionScheme scheme;
    scheme.q = 1;
    scheme.d = d;
    scheme.k = k;
    for (Eigen::Index start = 0; start < d; start += k) {
        Block block(static_cast<std::size_t>(std::min(k, d - start)));
        std::iota(block.begin(), block.end(), start);
        scheme.blocks.push_back(std::move(block));
    }
    return scheme;
}

std::size_t pair_scheme_block_count(Eigen::Index d, Eigen::Index k) {
    const auto dd = static_cast<double>(d);
    const auto kk = static_cast<double>(k);
    const std::int64_t nominal = ceil_to_int(10.0 * dd * (dd - 1.0) * std::log(dd) / (kk * (kk - 1.0)));
    // at tiny d the logarithm makes the nominal w too small to cover every cell
    const std::int64_t floor = 3 * ((d + k - 1) / k);
    return static_cast<std::size_t>(std::max(nominal, floor));
}

int pair_scheme_cover_bound(Eigen::Index d, Eigen::Index k) {
    const auto dd = static_cast<double>(d);
    return static_cast<int>(ceil_to_int(30.0 * (dd - 1.0) * std::log(dd) / (static_cast<double>(k) - 1.0)));
}

PairSchemeResult random_pair_scheme(Eigen::Index d, Eigen::Index k, Rng& rng, int retry_limit) {
    if (d < 2 || k < 2 || k > d) throw ArgumentError("random_pair_scheme: need 2 <= k <= d");
    const std::size_t w = pair_scheme_block_count(d, k);

    PartitionScheme scheme;
    scheme.q = 2;
    scheme.d = d;
    scheme.k = k;
    scheme.a = 1;

    std::vector<Eigen::Index> pool(static_cast<std::size_t>(d));
    for (int attempt = 0; attempt <= retry_limit; ++attempt) {
        scheme.b = pair_scheme_cover_bound(d, k);
        scheme.blocks.clear();
        scheme.blocks.reserve(w);
        for (std::size_t j = 0; j < w; ++j) {
            std::iota(pool.begin(), pool.end(), Eigen::Index{0});
            // partial Fisher-Yates: the first k slots become a uniform k-subset
            for (Eigen::Index i = 0; i < k; ++i) {
                const auto pick = i + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(d - i)));
                std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick)]);
            }
            Block block(pool.begin(), pool.begin() + k);
            std::sort(block.begin(), block.end());
            scheme.blocks.push_back(std::move(block));
        }
        const CoverageReport report = verify_scheme(scheme);
        if (report.ok) {
            scheme.b = report.max_cover;
            return {std::move(scheme), attempt};
        }
    }
    throw NumericError("random_pair_scheme: no valid scheme within the retry limit");
}

Batch project_batch(const Batch& batch, const Block& block) {
    for (Eigen::Index i : block) {
        if (i < 0 || i >= batch.rows()) throw ArgumentError("project_batch: index out of range");
    }
    return batch(block, Eigen::all);
}

void write_scheme(std::ostream& out, const PartitionScheme& scheme) {
    for (const Block& block : scheme.blocks) {
        for (std::size_t i = 0; i < block.size(); ++i) {
            if (i > 0) out << ' ';
            out << block[i] + 1;
        }
        out << '\n';
    }
}

PartitionScheme read_scheme(std::istream& in, int q, Eigen::Index d) {
    PartitionScheme scheme;
    scheme.q = q;
    scheme.d = d;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream fields(line);
        Block block;
        long long index = 0;
        while (fields >> index) {
            if (index < 1 || index > d) throw ArgumentError("read_scheme: index out of range");
            block.push_back(static_cast<Eigen::Index>(index - 1));
        }
        if (!fields.eof()) throw ArgumentError("read_scheme: malformed line '" + line + "'");
        std::sort(block.begin(), block.end());
        scheme.k = std::max(scheme.k, static_cast<Eigen::Index>(block.size()));
        scheme.blocks.push_back(std::move(block));
    }
    scheme.a = 1;
    scheme.b = std::numeric_limits<int>::max();
    scheme.b = verify_scheme(scheme).max_cover;
    return scheme;
}

}  // namespace advgauss
