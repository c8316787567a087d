#include "advgauss/approxl1.hpp"

#include <cmath>
#include <map>
#include <string>

#include "advgauss/numeric.hpp"
#include "advgauss/testers.hpp"

namespace advgauss {

double L1Outcome::sum_squared_levels() const {
    double total = 0.0;
    for (const auto& level : block_levels) {
        if (level) total += *level * *level;
    }
    return total;
}

const char* to_string(L1Outcome::Kind kind) {
    switch (kind) {
        case L1Outcome::Kind::Fail: return "Fail";
        case L1Outcome::Kind::OK: return "OK";
        case L1Outcome::Kind::Lambda: return "Lambda";
    }
    return "?";
}

namespace {

std::int64_t level_count(double alpha, double zeta) {
    if (!(alpha > 0.0 && zeta > 2.0 * alpha)) throw ArgumentError("level schedule: need zeta > 2 alpha > 0");
    return ceil_to_int(std::log2(zeta / alpha));
}

// Per-round statistics shared by all blocks. Rounds of a tester with batch
// size n cover columns [r n, (r + 1) n), so the full-dimensional sums for a
// given n serve every block; a block's statistic is then a cheap slice.
class MeanRoundSums {
public:
    explicit MeanRoundSums(const Batch& batch) : batch_(batch) {}

    const std::vector<Vec>& get(std::int64_t n, std::int64_t rounds) {
        auto& sums = cache_[n];
        while (static_cast<std::int64_t>(sums.size()) < rounds) {
            const auto r = static_cast<Eigen::Index>(sums.size());
            sums.push_back(batch_.middleCols(r * n, n).rowwise().sum());
        }
        return sums;
    }

private:
    const Batch& batch_;
    std::map<std::int64_t, std::vector<Vec>> cache_;
};

struct RoundMoments {
    SymMat gram;     // Σ x xᵀ
    SymMat squares;  // Σ (x∘x)(x∘x)ᵀ, so Σ ||x_B||⁴ is a block sum
};

class CovRoundMoments {
public:
    explicit CovRoundMoments(const Batch& batch) : batch_(batch) {}

    const std::vector<RoundMoments>& get(std::int64_t n, std::int64_t rounds) {
        auto& moments = cache_[n];
        const Eigen::Index d = batch_.rows();
        while (static_cast<std::int64_t>(moments.size()) < rounds) {
            const auto r = static_cast<Eigen::Index>(moments.size());
            const auto cols = batch_.middleCols(r * n, n);
            RoundMoments m{SymMat::Zero(d, d), SymMat::Zero(d, d)};
            m.gram.selfadjointView<Eigen::Lower>().rankUpdate(cols);
            m.gram = m.gram.selfadjointView<Eigen::Lower>();
            const Eigen::MatrixXd sq = cols.array().square().matrix();
            m.squares.selfadjointView<Eigen::Lower>().rankUpdate(sq);
            m.squares = m.squares.selfadjointView<Eigen::Lower>();
            moments.push_back(std::move(m));
        }
        return moments;
    }

private:
    const Batch& batch_;
    std::map<std::int64_t, std::vector<RoundMoments>> cache_;
};

Verdict majority(std::int64_t accepts, std::int64_t rounds) {
    return 2 * accepts > rounds ? Verdict::Accept : Verdict::Reject;
}

L1Outcome finish(L1Outcome out, double alpha, std::optional<double> ok_scale) {
    for (const auto& level : out.block_levels) {
        if (!level) {
            out.kind = L1Outcome::Kind::Fail;
            return out;
        }
    }
    if (ok_scale) {
        const double limit = *ok_scale * alpha;
        if (4.0 * out.sum_squared_levels() <= limit * limit) {
            out.kind = L1Outcome::Kind::OK;
            return out;
        }
    }
    double lambda = 0.0;
    for (std::size_t j = 0; j < out.block_levels.size(); ++j) {
        lambda += std::sqrt(static_cast<double>(out.scheme.blocks[j].size())) * *out.block_levels[j];
    }
    out.kind = L1Outcome::Kind::Lambda;
    out.lambda = 2.0 * lambda;
    return out;
}

}  // namespace

std::vector<double> level_schedule(double alpha, double zeta) {
    const std::int64_t count = level_count(alpha, zeta);
    std::vector<double> levels;
    levels.reserve(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) levels.push_back(std::ldexp(alpha, static_cast<int>(i)));
    return levels;
}

double split_delta(double delta, std::size_t blocks, double alpha, double zeta) {
    return delta / (static_cast<double>(blocks) * static_cast<double>(level_count(alpha, zeta)));
}

L1Outcome approx_l1_mean(double delta, Eigen::Index k, double alpha, double zeta, const Batch& batch,
                         const ApproxL1Options& opts) {
    const Eigen::Index d = batch.rows();
    L1Outcome out;
    out.scheme = contiguous_blocks(d, k);
    const std::vector<double> levels = level_schedule(alpha, zeta);
    out.delta_prime = split_delta(delta, out.scheme.size(), alpha, zeta);
    out.samples_required = mean_sample_count(k, alpha, out.delta_prime);
    if (batch.cols() < out.samples_required) {
        throw ArgumentError("approx_l1_mean: batch has " + std::to_string(batch.cols()) +
                            " samples, m(k, alpha, delta') = " + std::to_string(out.samples_required));
    }

    MeanRoundSums sums(batch);
    out.block_levels.assign(out.scheme.size(), std::nullopt);
    for (std::size_t j = 0; j < out.scheme.size(); ++j) {
        const Block& block = out.scheme.blocks[j];
        const auto width = static_cast<Eigen::Index>(block.size());
        for (double level : levels) {
            const TesterConfig cfg = mean_tester_config(width, level, 2.0 * level, out.delta_prime);
            if (batch.cols() < cfg.required_samples()) continue;  // Fail verdict: not an accept
            const auto& round_sums = sums.get(cfg.n, cfg.rounds);
            std::int64_t accepts = 0;
            for (std::int64_t r = 0; r < cfg.rounds; ++r) {
                const double stat = round_sums[static_cast<std::size_t>(r)](block).squaredNorm() /
                                    static_cast<double>(cfg.n);
                if (stat <= cfg.tau) ++accepts;
            }
            if (majority(accepts, cfg.rounds) == Verdict::Accept) {
                out.block_levels[j] = level;
                break;
            }
        }
    }
    return finish(std::move(out), alpha, opts.ok_scale);
}

L1Outcome vectorized_approx_l1(double delta, double alpha, double zeta, const Batch& batch,
                               const PartitionScheme& scheme) {
    if (scheme.q != 2 || scheme.d != batch.rows()) {
        throw ArgumentError("vectorized_approx_l1: scheme does not match the batch dimension");
    }
    if (!verify_scheme(scheme).ok) throw ArgumentError("vectorized_approx_l1: scheme fails verification");

    L1Outcome out;
    out.scheme = scheme;
    const std::vector<double> levels = level_schedule(alpha, zeta);
    out.delta_prime = split_delta(delta, scheme.size(), alpha, zeta);
    out.samples_required = cov_sample_count(scheme.k, alpha, out.delta_prime);
    if (batch.cols() < out.samples_required) {
        throw ArgumentError("vectorized_approx_l1: batch has " + std::to_string(batch.cols()) +
                            " samples, m'(k, alpha, delta') = " + std::to_string(out.samples_required));
    }

    CovRoundMoments moments(batch);
    out.block_levels.assign(scheme.size(), std::nullopt);
    for (std::size_t j = 0; j < scheme.size(); ++j) {
        const Block& block = scheme.blocks[j];
        const auto width = static_cast<Eigen::Index>(block.size());
        for (double level : levels) {
            const TesterConfig cfg = cov_tester_config(width, level, 2.0 * level, out.delta_prime);
            if (batch.cols() < cfg.required_samples()) continue;
            const auto& rounds = moments.get(cfg.n, cfg.rounds);
            std::int64_t accepts = 0;
            for (std::int64_t r = 0; r < cfg.rounds; ++r) {
                const RoundMoments& m = rounds[static_cast<std::size_t>(r)];
                const SymMat gram = m.gram(block, block);
                const double stat = cov_stat_from_moments(gram, m.squares(block, block).sum(),
                                                          gram.trace(), cfg.n);
                if (stat <= cfg.tau) ++accepts;
            }
            if (majority(accepts, cfg.rounds) == Verdict::Accept) {
                out.block_levels[j] = level;
                break;
            }
        }
    }
    return finish(std::move(out), alpha, std::nullopt);
}

bool early_termination_check(const L1Outcome& outcome, double eps) {
    if (outcome.kind != L1Outcome::Kind::Lambda) return false;
    return 4.0 * static_cast<double>(outcome.scheme.b) * outcome.sum_squared_levels() <= eps * eps;
}

}  // namespace advgauss
