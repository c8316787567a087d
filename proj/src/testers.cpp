#include "advgauss/testers.hpp"

#include <algorithm>
#include <cmath>

#include "advgauss/numeric.hpp"

namespace advgauss {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Accept: return "Accept";
        case Verdict::Reject: return "Reject";
        case Verdict::Fail: return "Fail";
    }
    return "?";
}

namespace {

void check_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw ArgumentError("delta must lie in (0, 1)");
}

// The round-count formulas only need ln(12 / delta) > 0.
void check_count_delta(double delta) {
    if (!(delta > 0.0 && delta < 12.0)) throw ArgumentError("delta must lie in (0, 12)");
}

void check_eps_pair(double eps1, double eps2) {
    if (!(eps1 > 0.0 && eps2 > eps1)) throw ArgumentError("need eps2 > eps1 > 0");
}

}  // namespace

std::int64_t r_delta(double delta) {
    check_count_delta(delta);
    return 1 + ceil_to_int(std::log(12.0 / delta));
}

std::int64_t majority_rounds(double delta) {
    check_count_delta(delta);
    const std::int64_t base = ceil_to_int(std::log(12.0 / delta));
    return base % 2 == 1 ? base : base + 1;
}

std::int64_t mean_batch_size(Eigen::Index d, double eps) {
    if (d < 1 || !(eps > 0.0)) throw ArgumentError("mean_batch_size: need d >= 1 and eps > 0");
    return std::max<std::int64_t>(1, ceil_to_int(16.0 * std::sqrt(static_cast<double>(d)) / (3.0 * eps * eps)));
}

std::int64_t mean_sample_count(Eigen::Index d, double eps, double delta) {
    return mean_batch_size(d, eps) * r_delta(delta);
}

std::int64_t cov_batch_size(Eigen::Index d, double eps) {
    if (d < 1 || !(eps > 0.0)) throw ArgumentError("cov_batch_size: need d >= 1 and eps > 0");
    const double worst = std::max({1.0 / (eps * eps), 1.0 / eps, 1.0});
    return ceil_to_int(3200.0 * static_cast<double>(d) * worst);
}

std::int64_t cov_sample_count(Eigen::Index d, double eps, double delta) {
    return cov_batch_size(d, eps) * r_delta(delta);
}

TesterConfig mean_tester_config(Eigen::Index d, double eps1, double eps2, double delta) {
    if (d < 1) throw ArgumentError("mean_tester_config: d must be at least 1");
    check_eps_pair(eps1, eps2);
    TesterConfig cfg;
    check_delta(delta);
    cfg.eps1 = eps1;
    cfg.eps2 = eps2;
    cfg.delta = delta;
    cfg.dim = d;
    const double gap = eps2 * eps2 - eps1 * eps1;
    cfg.n = std::max<std::int64_t>(1, ceil_to_int(16.0 * std::sqrt(static_cast<double>(d)) / gap));
    cfg.rounds = majority_rounds(delta);
    cfg.tau = static_cast<double>(d) + static_cast<double>(cfg.n) * (eps1 * eps1 + eps2 * eps2) / 2.0;
    return cfg;
}

TesterConfig cov_tester_config(Eigen::Index d, double eps1, double eps2, double delta) {
    if (d < 1) throw ArgumentError("cov_tester_config: d must be at least 1");
    check_eps_pair(eps1, eps2);
    TesterConfig cfg;
    check_delta(delta);
    cfg.eps1 = eps1;
    cfg.eps2 = eps2;
    cfg.delta = delta;
    cfg.dim = d;
    const double e1 = eps1 * eps1;
    const double e2 = eps2 * eps2;
    const double gap = e2 - e1;
    const double worst = std::max({1.0 / e1, (e1 / gap) * (e1 / gap), 2.0 * (eps2 / gap) * (eps2 / gap)});
    cfg.n = std::max<std::int64_t>(2, ceil_to_int(3200.0 * static_cast<double>(d) * worst));
    cfg.rounds = majority_rounds(delta);
    cfg.tau = (e2 + e1) / 2.0;
    return cfg;
}

double mean_stat(const Batch& batch) {
    if (batch.cols() < 1) throw ArgumentError("mean_stat: empty batch");
    const Vec sum = batch.rowwise().sum();
    return sum.squaredNorm() / static_cast<double>(batch.cols());
}

double cov_stat_from_moments(const SymMat& gram, double fourth, double sq_norms, std::int64_t n) {
    if (n < 2) throw ArgumentError("cov_stat: need at least two samples");
    const auto nn = static_cast<double>(n);
    const auto d = static_cast<double>(gram.rows());
    const double cross = 0.5 * (gram.squaredNorm() - fourth);
    const double pairs = nn * (nn - 1.0) / 2.0;
    const double total = cross - (nn - 1.0) * sq_norms + d * pairs;
    return total / pairs;
}

double cov_stat(const Batch& batch) {
    if (batch.cols() < 2) throw ArgumentError("cov_stat: need at least two samples");
    SymMat gram = SymMat::Zero(batch.rows(), batch.rows());
    gram.selfadjointView<Eigen::Lower>().rankUpdate(batch);
    gram = gram.selfadjointView<Eigen::Lower>();
    const Eigen::ArrayXd norms_sq = batch.colwise().squaredNorm().transpose().array();
    return cov_stat_from_moments(gram, norms_sq.square().sum(), norms_sq.sum(), batch.cols());
}

namespace {

template <typename Stat>
TestResult run_rounds(const TesterConfig& cfg, const Batch& batch, Stat&& stat) {
    if (batch.rows() != cfg.dim) throw ArgumentError("tolerant test: dimension mismatch");
    TestResult out;
    if (batch.cols() < cfg.required_samples()) {
        out.verdict = Verdict::Fail;
        return out;
    }
    std::int64_t accepts = 0;
    for (std::int64_t round = 0; round < cfg.rounds; ++round) {
        const double value = stat(batch.middleCols(round * cfg.n, cfg.n));
        if (value <= cfg.tau) ++accepts;
    }
    out.verdict = 2 * accepts > cfg.rounds ? Verdict::Accept : Verdict::Reject;
    return out;
}

}  // namespace

bool mean_guarantee_holds(Eigen::Index d, double eps1, double eps2) {
    const double ratio = 16.0 * eps2 * eps2 / (eps2 * eps2 - eps1 * eps1);
    return static_cast<double>(d) >= ratio * ratio;
}

bool cov_guarantee_holds(Eigen::Index d, double eps2) {
    return static_cast<double>(d) >= eps2 * eps2;
}

TestResult tolerant_mean_test(const TesterConfig& cfg, const Batch& batch) {
    TestResult out = run_rounds(cfg, batch, [](const auto& b) { return mean_stat(b); });
    out.guarantee_void = !mean_guarantee_holds(cfg.dim, cfg.eps1, cfg.eps2);
    return out;
}

TestResult tolerant_cov_test(const TesterConfig& cfg, const Batch& batch) {
    TestResult out = run_rounds(cfg, batch, [](const auto& b) { return cov_stat(b); });
    out.guarantee_void = !cov_guarantee_holds(cfg.dim, cfg.eps2);
    return out;
}

double chisq_upper_tail_bound(double d, double lambda, double t) {
    if (!(t > 0.0)) throw ArgumentError("chisq_upper_tail_bound: need t > 0");
    const double s = d + 2.0 * lambda;
    return std::exp(-d * t * t / (4.0 * s * (s + t)));
}

double chisq_lower_tail_bound(double d, double lambda, double t) {
    if (!(t > 0.0 && t < d + lambda)) throw ArgumentError("chisq_lower_tail_bound: need 0 < t < d + lambda");
    const double s = d + 2.0 * lambda;
    return std::exp(-d * t * t / (4.0 * s * s));
}

ChiSquareTails chisq_tail_bounds(double d, double lambda, double t) {
    return {chisq_upper_tail_bound(d, lambda, t), chisq_lower_tail_bound(d, lambda, t)};
}

}  // namespace advgauss
