#include "advgauss/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "advgauss/numeric.hpp"
#include "advgauss/partition.hpp"
#include "advgauss/testers.hpp"

namespace advgauss {

const char* to_string(Branch b) {
    switch (b) {
        case Branch::AdviceExact: return "AdviceExact";
        case Branch::Optimized: return "Optimized";
        case Branch::EmpiricalFallback: return "EmpiricalFallback";
        case Branch::EarlyTermination: return "EarlyTermination";
    }
    return "?";
}

std::uint64_t EstimatorReport::total_samples() const {
    std::uint64_t total = 0;
    for (const auto& [phase, count] : samples_by_phase) total += count;
    return total;
}

Vec constrained_mean_lasso(const Batch& batch, double r) {
    const Vec mean = empirical_mean(batch);
    return project_l1_ball(mean, Vec::Zero(mean.size()), r);
}

SymMat covariance_program(const Batch& batch, double r, const DykstraOptions& opts) {
    const SymMat s = second_moment(batch);
    const Eigen::Index d = s.rows();
    return dykstra_project(s, SymMat::Identity(d, d), r, 1.0, opts).point;
}

SymMat Preconditioner::inverse() const {
    return spectral_map(matrix, [](double v) { return 1.0 / v; });
}

Preconditioner precondition(const Batch& batch, double delta, double c0) {
    const Eigen::Index d = batch.rows();
    if (batch.cols() != d) throw ArgumentError("precondition: needs exactly d samples");
    if (!(delta > 0.0 && delta < 1.0)) throw ArgumentError("precondition: delta must lie in (0, 1)");

    const EigenPair eig = symmetric_eigen(second_moment(batch));
    const double smallest = eig.values[0];
    if (!(smallest > 1e-12 * std::max(1.0, eig.values[d - 1]))) {
        throw NumericError("precondition: empirical covariance is rank deficient");
    }

    Preconditioner out;
    out.empirical_eigenvalues = eig.values;
    const auto dd = static_cast<double>(d);
    out.k_scale = (1.0 + c0 * std::sqrt((dd + std::log(1.0 / delta)) / dd)) / smallest;
    const double root = std::sqrt(out.k_scale);
    Vec scale = Vec::Ones(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        if (eig.values[i] < 1.0) {
            out.small_indices.push_back(i);
            scale[i] = root;
        }
    }
    out.matrix = out.small_indices.empty()
                     ? SymMat(SymMat::Identity(d, d))
                     : symmetrize(eig.vectors * scale.asDiagonal() * eig.vectors.transpose());
    return out;
}

SymMat matrix_power_half(const SymMat& m, bool inverse) {
    const EigenPair eig = symmetric_eigen(m);
    const double top = std::abs(eig.values[eig.values.size() - 1]);
    if (!(eig.values[0] > 1e-12 * top)) throw ArgumentError("matrix_power_half: matrix is not positive definite");
    Vec mapped = eig.values.cwiseSqrt();
    if (inverse) mapped = mapped.cwiseInverse();
    return symmetrize(eig.vectors * mapped.asDiagonal() * eig.vectors.transpose());
}

namespace {

double spectral_norm_of_shift(const SymMat& m) {
    const SymMat shifted = m - SymMat::Identity(m.rows(), m.cols());
    return norms(symmetrize(shifted)).spectral;
}

}  // namespace

ConjugationNorms conjugation_norms(const SymMat& a, const SymMat& sigma, const SymMat& advice) {
    const SymMat inner = matrix_power_half(symmetrize(a * advice * a), true);
    const SymMat advice_inv_half = matrix_power_half(advice, true);
    return {spectral_norm_of_shift(inner * a * sigma * a * inner),
            spectral_norm_of_shift(advice_inv_half * sigma * advice_inv_half)};
}

std::int64_t mean_fallback_samples(Eigen::Index d, double eps, double delta, double c_emp) {
    const auto dd = static_cast<double>(d);
    return std::max<std::int64_t>(1, ceil_to_int(c_emp * (dd + std::sqrt(dd * std::log(1.0 / delta))) / (eps * eps)));
}

std::int64_t cov_fallback_pairs(Eigen::Index d, double eps, double delta, double c_emp) {
    const auto dd = static_cast<double>(d);
    return std::max<std::int64_t>(1, ceil_to_int(c_emp * (dd * dd + dd * std::log(1.0 / delta)) / (eps * eps)));
}

std::int64_t lasso_samples(Eigen::Index d, double lambda, double eps, double delta) {
    const auto dd = static_cast<double>(d);
    return std::max<std::int64_t>(1, ceil_to_int(2.0 * lambda * lambda * std::log(2.0 * dd / delta) / std::pow(eps, 4)));
}

std::int64_t cov_program_pairs(Eigen::Index d, double lambda, double eps, double delta) {
    const auto dd = static_cast<double>(d);
    return std::max<std::int64_t>(1, ceil_to_int(2.0 * lambda * lambda * std::log(2.0 * dd * dd / delta) / std::pow(eps, 4)));
}

MeanPlan plan_mean(Eigen::Index d, double eps, double delta, double eta) {
    if (d < 1) throw ArgumentError("plan_mean: d must be at least 1");
    if (!(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0)) {
        throw ArgumentError("test_and_optimize_mean: eps and delta must lie in (0, 1)");
    }
    if (!(eta >= 0.0 && eta <= 0.25)) throw ArgumentError("test_and_optimize_mean: eta must lie in [0, 1/4]");
    const auto dd = static_cast<double>(d);
    MeanPlan plan;
    plan.k = std::clamp<Eigen::Index>(ceil_to_int(std::pow(dd, 4.0 * eta)), 1, d);
    plan.alpha = eps * std::pow(dd, -(1.0 - 3.0 * eta) / 2.0);
    plan.zeta = 4.0 * eps * std::sqrt(dd);
    const std::size_t w = static_cast<std::size_t>((d + plan.k - 1) / plan.k);
    plan.delta_prime = split_delta(delta, w, plan.alpha, plan.zeta);
    plan.test_samples = mean_sample_count(plan.k, plan.alpha, plan.delta_prime);
    return plan;
}

EstimatorReport test_and_optimize_mean(double eps, double delta, double eta, const Vec& advice,
                                       SampleStream& stream, const EstimatorOptions& opts) {
    const Eigen::Index d = stream.dim();
    if (advice.size() != d) throw ArgumentError("test_and_optimize_mean: advice dimension mismatch");
    const MeanPlan plan = plan_mean(d, eps, delta, eta);

    EstimatorReport report;
    if (!mean_guarantee_holds(plan.k, plan.alpha, 2.0 * plan.alpha)) {
        report.warnings.emplace_back("block size below the mean tester's dimension requirement; guarantee void");
    }

    Batch test_batch = stream.draw(plan.test_samples);
    report.samples_by_phase["approx_l1"] = static_cast<std::uint64_t>(plan.test_samples);
    test_batch.colwise() -= advice;
    report.outcome = approx_l1_mean(delta, plan.k, plan.alpha, plan.zeta, test_batch, opts.approx);
    test_batch.resize(0, 0);

    const double gate = eps * std::sqrt(static_cast<double>(d));
    if (report.outcome.kind == L1Outcome::Kind::OK) {
        report.branch = Branch::AdviceExact;
        report.mean_estimate = advice;
        return report;
    }
    if (report.outcome.kind == L1Outcome::Kind::Lambda) report.lambda = report.outcome.lambda;

    if (report.outcome.kind == L1Outcome::Kind::Lambda && report.outcome.lambda < gate) {
        const std::int64_t n = lasso_samples(d, report.outcome.lambda, eps, delta);
        Batch batch = stream.draw(n);
        report.samples_by_phase["optimize"] = static_cast<std::uint64_t>(n);
        batch.colwise() -= advice;
        report.mean_estimate = advice + constrained_mean_lasso(batch, report.outcome.lambda);
        report.branch = Branch::Optimized;
        return report;
    }

    const std::int64_t n = mean_fallback_samples(d, eps, delta, opts.c_emp);
    Batch batch = stream.draw(n);
    report.samples_by_phase["empirical"] = static_cast<std::uint64_t>(n);
    batch.colwise() -= advice;
    report.mean_estimate = advice + empirical_mean(batch);
    report.branch = Branch::EmpiricalFallback;
    return report;
}

EstimatorReport test_and_optimize_covariance(double eps, double delta, double eta, const SymMat& advice,
                                             SampleStream& stream, const EstimatorOptions& opts) {
    const Eigen::Index d = stream.dim();
    if (d < 2) throw ArgumentError("test_and_optimize_covariance: needs d >= 2");
    if (advice.rows() != d || advice.cols() != d) {
        throw ArgumentError("test_and_optimize_covariance: advice dimension mismatch");
    }
    if (!(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0)) {
        throw ArgumentError("test_and_optimize_covariance: eps and delta must lie in (0, 1)");
    }
    if (!(eta >= 0.0 && eta <= 1.0)) throw ArgumentError("test_and_optimize_covariance: eta must lie in [0, 1]");

    const SymMat whiten = matrix_power_half(symmetrize(advice), true);
    const SymMat unwhiten = matrix_power_half(symmetrize(advice), false);

    EstimatorReport report;
    // raw draws -> whitened, zero-mean samples (two draws per output column)
    auto paired = [&](std::int64_t pairs, const char* phase) {
        const Batch raw = stream.draw(2 * pairs);
        report.samples_by_phase[phase] += static_cast<std::uint64_t>(2 * pairs);
        return Batch(whiten * pair_to_zero_mean(raw));
    };

    std::optional<Preconditioner> pre;
    if (opts.use_preconditioner) {
        pre = precondition(paired(d, "precondition"), delta, opts.c0);
    }
    auto conditioned = [&](Batch b) {
        if (pre) b = pre->matrix * b;
        return b;
    };

    const auto dd = static_cast<double>(d);
    const Eigen::Index k = std::clamp<Eigen::Index>(ceil_to_int(std::pow(dd, eta)), 2, d);
    const double alpha = eps * std::pow(dd, -(2.0 - eta) / 2.0);
    const double zeta = 4.0 * eps * dd;
    Rng scheme_rng(opts.scheme_seed, 0, 1);
    const PartitionScheme scheme = random_pair_scheme(d, k, scheme_rng).scheme;
    const double delta_prime = split_delta(delta, scheme.size(), alpha, zeta);
    if (!cov_guarantee_holds(k, 2.0 * alpha)) {
        report.warnings.emplace_back("block size below the covariance tester's dimension requirement; guarantee void");
    }

    const std::int64_t test_pairs = cov_sample_count(k, alpha, delta_prime);
    report.outcome = vectorized_approx_l1(delta, alpha, zeta, conditioned(paired(test_pairs, "approx_l1")), scheme);

    SymMat estimate;  // in whitened (and preconditioned, if enabled) coordinates
    if (report.outcome.kind == L1Outcome::Kind::Lambda) report.lambda = report.outcome.lambda;
    if (early_termination_check(report.outcome, eps)) {
        report.branch = Branch::EarlyTermination;
        estimate = SymMat::Identity(d, d);
    } else if (report.outcome.kind == L1Outcome::Kind::Lambda && report.outcome.lambda < eps * dd) {
        const std::int64_t pairs = cov_program_pairs(d, report.outcome.lambda, eps, delta);
        estimate = covariance_program(conditioned(paired(pairs, "optimize")), report.outcome.lambda, opts.dykstra);
        report.branch = Branch::Optimized;
    } else {
        const std::int64_t pairs = cov_fallback_pairs(d, eps, delta, opts.c_emp);
        estimate = second_moment(paired(pairs, "empirical"));
        report.branch = Branch::EmpiricalFallback;
        pre.reset();  // fallback samples were never preconditioned
    }

    if (pre) {
        const SymMat inv = pre->inverse();
        estimate = symmetrize(inv * estimate * inv);
    }
    report.cov_estimate = symmetrize(unwhiten * estimate * unwhiten);

    const std::int64_t mean_n = mean_fallback_samples(d, eps, delta, opts.c_emp);
    report.mean_estimate = empirical_mean(stream.draw(mean_n));
    report.samples_by_phase["mean"] = static_cast<std::uint64_t>(mean_n);
    return report;
}

}  // namespace advgauss
