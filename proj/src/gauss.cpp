#include "advgauss/gauss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace advgauss {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t Rng::derive(std::uint64_t seed, std::uint64_t trial, std::uint64_t phase) {
    return splitmix64(splitmix64(splitmix64(seed) ^ trial) ^ (phase * 0xd1b54a32d192ed03ULL));
}

Rng::Rng(std::uint64_t seed, std::uint64_t trial, std::uint64_t phase) {
    const std::uint64_t key = derive(seed, trial, phase);
    std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(phase)};
    engine_.seed(seq);
}

std::uint64_t Rng::below(std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
}

GaussianModel::GaussianModel(Vec mean, std::optional<SymMat> covariance)
    : mean_(std::move(mean)), covariance_(std::move(covariance)) {
    if (mean_.size() < 1) throw ArgumentError("GaussianModel: dimension must be at least 1");
    if (!mean_.allFinite()) throw ArgumentError("GaussianModel: non-finite mean");
    if (!covariance_) return;

    const SymMat& cov = *covariance_;
    if (cov.rows() != mean_.size() || cov.cols() != mean_.size()) {
        throw ArgumentError("GaussianModel: covariance dimension mismatch");
    }
    const EigenPair eig = symmetric_eigen(cov);
    const double scale = std::max(std::abs(eig.values[0]), std::abs(eig.values[eig.values.size() - 1]));
    if (eig.values[0] < -1e-10 * scale) {
        throw NumericError("GaussianModel: covariance is not positive semidefinite");
    }
    Vec root = eig.values;
    for (Eigen::Index i = 0; i < root.size(); ++i) {
        root[i] = root[i] < 1e-12 * scale ? 0.0 : std::sqrt(root[i]);
    }
    factor_ = eig.vectors * root.asDiagonal();
}

GaussianModel GaussianModel::isotropic(Vec mean) {
    return GaussianModel(std::move(mean), std::nullopt);
}

GaussianModel GaussianModel::with_covariance(Vec mean, SymMat covariance) {
    return GaussianModel(std::move(mean), std::move(covariance));
}

SymMat GaussianModel::covariance() const {
    if (covariance_) return *covariance_;
    return SymMat::Identity(dim(), dim());
}

Batch SampleStream::draw(Eigen::Index n) {
    if (n < 1) throw ArgumentError("SampleStream::draw: n must be at least 1");
    const Eigen::Index d = dim();
    Batch z(d, n);
    double* data = z.data();
    for (Eigen::Index i = 0; i < d * n; ++i) data[i] = rng_.normal();
    drawn_ += static_cast<std::uint64_t>(n);
    if (model_.identity_covariance()) {
        z.colwise() += model_.mean();
        return z;
    }
    Batch x = model_.factor() * z;
    x.colwise() += model_.mean();
    return x;
}

Batch pair_to_zero_mean(const Batch& batch) {
    if (batch.cols() % 2 != 0) throw ArgumentError("pair_to_zero_mean: odd number of samples");
    const Eigen::Index pairs = batch.cols() / 2;
    Batch out(batch.rows(), pairs);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (Eigen::Index i = 0; i < pairs; ++i) {
        out.col(i) = (batch.col(2 * i + 1) - batch.col(2 * i)) * inv_sqrt2;
    }
    return out;
}

Vec empirical_mean(const Batch& batch) {
    if (batch.cols() < 1) throw ArgumentError("empirical_mean: empty batch");
    return batch.rowwise().sum() / static_cast<double>(batch.cols());
}

SymMat second_moment(const Batch& batch) {
    if (batch.cols() < 1) throw ArgumentError("second_moment: empty batch");
    // Plain sample-order accumulation, so the result on a coordinate subset
    // is bit-identical to the matching principal submatrix.
    const Eigen::Index d = batch.rows();
    SymMat s = SymMat::Zero(d, d);
    for (Eigen::Index t = 0; t < batch.cols(); ++t) {
        const double* x = batch.col(t).data();
        for (Eigen::Index j = 0; j < d; ++j) {
            const double xj = x[j];
            for (Eigen::Index i = j; i < d; ++i) s(i, j) += x[i] * xj;
        }
    }
    s /= static_cast<double>(batch.cols());
    return s.selfadjointView<Eigen::Lower>();
}

SymMat empirical_cov_paired(const Batch& batch) {
    if (batch.cols() < 2 || batch.cols() % 2 != 0) {
        throw ArgumentError("empirical_cov_paired: need an even, nonzero number of samples");
    }
    // (1/2n) Σ d dᵀ equals (1/n) Σ y yᵀ with y = d / sqrt(2)
    return second_moment(pair_to_zero_mean(batch));
}

double kl_gaussians(const GaussianModel& p, const GaussianModel& q) {
    if (p.dim() != q.dim()) throw ArgumentError("kl_gaussians: dimension mismatch");
    const auto d = static_cast<double>(p.dim());
    const Vec delta = q.mean() - p.mean();

    if (p.identity_covariance() && q.identity_covariance()) return 0.5 * delta.squaredNorm();

    const SymMat sp = p.covariance();
    const SymMat sq = q.covariance();
    if (delta.isZero(0.0) && sp == sq) return 0.0;

    Eigen::LLT<Eigen::MatrixXd> llt_q(sq);
    if (llt_q.info() != Eigen::Success) throw NumericError("kl_gaussians: singular covariance for Q");
    Eigen::LLT<Eigen::MatrixXd> llt_p(sp);
    if (llt_p.info() != Eigen::Success) return std::numeric_limits<double>::infinity();

    const double trace = llt_q.solve(sp).trace();
    const double quad = delta.dot(llt_q.solve(delta));
    const double logdet_q = 2.0 * llt_q.matrixLLT().diagonal().array().log().sum();
    const double logdet_p = 2.0 * llt_p.matrixLLT().diagonal().array().log().sum();
    return std::max(0.0, 0.5 * (trace - d + quad + logdet_q - logdet_p));
}

double tv_upper_via_pinsker(double kl) {
    if (!(kl >= 0.0)) throw ArgumentError("tv_upper_via_pinsker: kl must be nonnegative");
    return std::min(1.0, std::sqrt(kl / 2.0));
}

DistanceReport distance(const GaussianModel& p, const GaussianModel& q) {
    const double kl = kl_gaussians(p, q);
    return {kl, tv_upper_via_pinsker(kl)};
}

}  // namespace advgauss
