#include <cmath>

#include <doctest.h>

#include "advgauss/estimators.hpp"
#include "advgauss/testers.hpp"

using namespace advgauss;

namespace {

SymMat random_pd(Rng& rng, Eigen::Index d, double ridge) {
    Eigen::MatrixXd a(d, d);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();
    return symmetrize(a * a.transpose() / static_cast<double>(d) + ridge * SymMat::Identity(d, d));
}

double mean_tv(const Vec& truth, const Vec& estimate) { return (truth - estimate).norm() / 2.0; }

void check_accounting(const EstimatorReport& r, const SampleStream& stream, std::uint64_t before) {
    CHECK(r.total_samples() == stream.drawn_count() - before);
}

}  // namespace

TEST_CASE("constrained lasso examples") {
    const Batch inside{{0.2, 0.4}, {0.1, -0.1}};
    CHECK(constrained_mean_lasso(inside, 1.0).isApprox(Vec{{0.3, 0.0}}));
    const Batch far{{3.0}, {1.0}};
    CHECK(constrained_mean_lasso(far, 2.0).isApprox(Vec{{2.0, 0.0}}));
    CHECK(constrained_mean_lasso(far, 0.0).isZero(0.0));
}

TEST_CASE("covariance program examples") {
    const double s = std::sqrt(2.0);
    const Batch feasible{{s * std::sqrt(1.1), 0.0}, {0.0, s}};
    CHECK((covariance_program(feasible, 1.0) - SymMat{{1.1, 0.0}, {0.0, 1.0}}).norm() < 1e-9);

    const Batch outside{{1.0, 0.0}, {0.0, std::sqrt(6.0)}};
    CHECK((covariance_program(outside, 1.0) - SymMat{{1.0, 0.0}, {0.0, 2.0}}).norm() < 1e-4);
}

TEST_CASE("covariance program beats any feasible matrix on its own objective") {
    Rng rng(70);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index d = 4;
        SymMat truth = SymMat::Identity(d, d);
        truth(0, 0) += 0.3;
        truth(1, 2) = truth(2, 1) = 0.1;
        const double r = (truth - SymMat::Identity(d, d)).cwiseAbs().sum() + 0.2;
        SampleStream stream(GaussianModel::with_covariance(Vec::Zero(d), truth), Rng(71, trial));
        const Batch y = stream.draw(30);
        const SymMat est = covariance_program(y, r, {1e-8, 2'000'000});

        double fit_est = 0.0, fit_truth = 0.0;
        for (Eigen::Index i = 0; i < y.cols(); ++i) {
            const SymMat outer = y.col(i) * y.col(i).transpose();
            fit_est += (est - outer).squaredNorm();
            fit_truth += (truth - outer).squaredNorm();
        }
        CHECK(fit_est <= fit_truth + 1e-6);
        CHECK((est - SymMat::Identity(d, d)).cwiseAbs().sum() <= r + 1e-6);
        CHECK(min_eigenvalue(est) >= 1.0 - 1e-6);
    }
}

TEST_CASE("preconditioner examples") {
    const Batch big{{2.0, 0.0}, {0.0, 3.0}};
    const Preconditioner id = precondition(big, 0.1);
    CHECK(id.small_indices.empty());
    CHECK(id.matrix == SymMat::Identity(2, 2));

    const Batch split{{std::sqrt(0.5), 0.0}, {0.0, std::sqrt(8.0)}};
    const Preconditioner p = precondition(split, 0.5, 1.0);
    const double k = (1.0 + std::sqrt((2.0 + std::log(2.0)) / 2.0)) * 4.0;
    CHECK(p.k_scale == doctest::Approx(k));
    CHECK(p.small_indices.size() == 1);
    CHECK((p.matrix - SymMat{{std::sqrt(k), 0.0}, {0.0, 1.0}}).norm() < 1e-12);
    CHECK((p.inverse() * p.matrix - SymMat::Identity(2, 2)).norm() < 1e-12);

    CHECK_THROWS_AS(precondition(Batch::Ones(2, 3), 0.1), ArgumentError);
    CHECK_THROWS_AS(precondition(Batch::Ones(2, 2), 0.1), NumericError);
    CHECK_THROWS_AS(precondition(split, 1.0), ArgumentError);
}

TEST_CASE("preconditioner structure on random data") {
    Rng rng(72);
    for (int trial = 0; trial < 20; ++trial) {
        SampleStream stream(GaussianModel::with_covariance(Vec::Zero(6), random_pd(rng, 6, 0.05)), Rng(73, trial));
        const Preconditioner p = precondition(stream.draw(6), 0.1);
        CHECK(p.matrix == p.matrix.transpose());
        CHECK(min_eigenvalue(p.matrix) > 0.0);
        CHECK(p.k_scale >= 1.0);
        // A - I vanishes on the big eigenspace and equals (sqrt(k) - 1) on the small one
        const Vec ev = symmetric_eigen(p.matrix).values;
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            const bool one = std::abs(ev[i] - 1.0) < 1e-9;
            const bool root = std::abs(ev[i] - std::sqrt(p.k_scale)) < 1e-9;
            CHECK((one || root));
        }
    }
}

TEST_CASE("conjugation invariance") {
    Rng rng(74);
    for (int trial = 0; trial < 50; ++trial) {
        const SymMat sigma = random_pd(rng, 5, 0.1);
        const SymMat advice = random_pd(rng, 5, 0.1);
        const SymMat a = random_pd(rng, 5, 0.5);
        const ConjugationNorms n = conjugation_norms(a, sigma, advice);
        CHECK(n.preconditioned == doctest::Approx(n.original).epsilon(1e-8));
    }
}

TEST_CASE("matrix square roots") {
    Rng rng(75);
    for (int trial = 0; trial < 20; ++trial) {
        const SymMat m = random_pd(rng, 4, 0.2);
        const SymMat root = matrix_power_half(m, false);
        const SymMat inv_root = matrix_power_half(m, true);
        CHECK((root * root - m).norm() < 1e-10);
        CHECK((root * inv_root - SymMat::Identity(4, 4)).norm() < 1e-10);
        // whitening round trip
        const SymMat sigma = random_pd(rng, 4, 0.2);
        CHECK((root * (inv_root * sigma * inv_root) * root - sigma).norm() < 1e-8);
    }
    CHECK_THROWS_AS(matrix_power_half(SymMat{{1.0, 0.0}, {0.0, 0.0}}, true), ArgumentError);
    CHECK_THROWS_AS(matrix_power_half(SymMat{{1.0, 0.0}, {0.0, -1.0}}, false), ArgumentError);
}

TEST_CASE("budget formulas") {
    CHECK(mean_fallback_samples(256, 0.25, 0.1, 8.0) ==
          static_cast<std::int64_t>(std::ceil(8.0 * (256.0 + std::sqrt(256.0 * std::log(10.0))) / 0.0625)));
    CHECK(cov_fallback_pairs(8, 0.5, 0.1, 8.0) ==
          static_cast<std::int64_t>(std::ceil(8.0 * (64.0 + 8.0 * std::log(10.0)) / 0.25)));
    CHECK(lasso_samples(64, 2.0, 0.5, 0.1) ==
          static_cast<std::int64_t>(std::ceil(2.0 * 4.0 * std::log(1280.0) / 0.0625)));
    CHECK(cov_program_pairs(8, 2.0, 0.5, 0.1) ==
          static_cast<std::int64_t>(std::ceil(2.0 * 4.0 * std::log(1280.0) / 0.0625)));
}

TEST_CASE("mean plan") {
    const MeanPlan p = plan_mean(256, 0.25, 0.1, 0.25);
    CHECK(p.k == 256);
    CHECK(p.alpha == doctest::Approx(0.125));
    CHECK(p.zeta == doctest::Approx(16.0));
    CHECK(p.delta_prime == doctest::Approx(0.1 / 7.0));
    CHECK(p.test_samples == 43'696);
    CHECK(plan_mean(64, 0.5, 0.1, 0.0).k == 1);
    CHECK_THROWS_AS(plan_mean(64, 0.5, 0.1, 0.3), ArgumentError);
    CHECK_THROWS_AS(plan_mean(64, 1.0, 0.1, 0.1), ArgumentError);
}

TEST_CASE("perfect mean advice at d = 256 lands exactly on the gate and falls back") {
    // every block settles at alpha, so lambda = 2 sqrt(256) 0.125 = 4 = eps sqrt(d)
    const Vec mu = Vec::LinSpaced(256, -1.0, 1.0);
    int ties = 0, good = 0;
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        SampleStream stream(GaussianModel::isotropic(mu), Rng(76, trial));
        const EstimatorReport r = test_and_optimize_mean(0.25, 0.1, 0.25, mu, stream);
        check_accounting(r, stream, 0);
        CHECK(r.samples_by_phase.count("optimize") == 0);
        if (r.lambda && *r.lambda == 4.0) {
            ++ties;
            CHECK(r.branch == Branch::EmpiricalFallback);
        }
        good += mean_tv(mu, r.mean_estimate) <= 0.25;
    }
    CHECK(ties >= 18);
    CHECK(good >= 18);
}

TEST_CASE("mean path takes the optimized branch once d^eta > 4") {
    const Eigen::Index d = 512;
    const double eps = 0.9;
    Vec mu = Vec::Zero(d);
    mu[3] = 0.05;
    for (std::uint64_t trial = 0; trial < 5; ++trial) {
        SampleStream stream(GaussianModel::isotropic(mu), Rng(77, trial));
        const EstimatorReport r = test_and_optimize_mean(eps, 0.1, 0.25, Vec::Zero(d), stream);
        check_accounting(r, stream, 0);
        REQUIRE(r.branch == Branch::Optimized);
        REQUIRE(r.lambda.has_value());
        CHECK(*r.lambda < eps * std::sqrt(double(d)));
        CHECK(r.mean_estimate.lpNorm<1>() <= *r.lambda + 1e-9);
        CHECK(r.samples_by_phase.at("optimize") == static_cast<std::uint64_t>(lasso_samples(d, *r.lambda, eps, 0.1)));
        CHECK(mean_tv(mu, r.mean_estimate) <= eps);
    }
}

TEST_CASE("mean path returns the advice on an OK verdict") {
    const Vec mu = Vec::Constant(64, 0.3);
    EstimatorOptions opts;
    opts.approx.ok_scale = 3.0;  // one block, so 2 sqrt(w) = 2
    SampleStream stream(GaussianModel::isotropic(mu), 78);
    const EstimatorReport r = test_and_optimize_mean(0.5, 0.1, 0.25, mu, stream, opts);
    CHECK(r.branch == Branch::AdviceExact);
    CHECK(r.mean_estimate == mu);
    CHECK(r.samples_by_phase.size() == 1);
    check_accounting(r, stream, 0);
}

TEST_CASE("garbage mean advice falls back") {
    const Eigen::Index d = 64;
    const double eps = 0.25;
    const Vec mu = Vec::Zero(d);
    const Vec advice = Vec::Constant(d, 10.0 * eps * std::sqrt(double(d)) / double(d));
    int fallbacks = 0;
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
        SampleStream stream(GaussianModel::isotropic(mu), Rng(79, trial));
        const EstimatorReport r = test_and_optimize_mean(eps, 0.1, 0.25, advice, stream);
        check_accounting(r, stream, 0);
        fallbacks += r.branch == Branch::EmpiricalFallback;
        if (r.branch == Branch::EmpiricalFallback) {
            CHECK(r.samples_by_phase.at("empirical") ==
                  static_cast<std::uint64_t>(mean_fallback_samples(d, eps, 0.1, 8.0)));
        }
    }
    CHECK(fallbacks >= 45);
}

TEST_CASE("mean path is shift-equivariant") {
    const Eigen::Index d = 64;
    Vec mu = Vec::Zero(d), advice = Vec::Zero(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        mu[i] = 0.01 * static_cast<double>(i % 7);
        advice[i] = 0.25 - 0.005 * static_cast<double>(i % 5);
    }
    for (std::uint64_t trial = 0; trial < 5; ++trial) {
        SampleStream shifted(GaussianModel::isotropic(mu), Rng(80, trial));
        SampleStream centred(GaussianModel::isotropic(mu - advice), Rng(80, trial));
        const EstimatorReport a = test_and_optimize_mean(0.5, 0.1, 0.2, advice, shifted);
        const EstimatorReport b = test_and_optimize_mean(0.5, 0.1, 0.2, Vec::Zero(d), centred);
        CHECK(a.branch == b.branch);
        CHECK(a.samples_by_phase == b.samples_by_phase);
        // the shift is exact in distribution; floating round-off leaves ~1e-15 per coordinate
        CHECK(((a.mean_estimate - advice) - b.mean_estimate).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("mean path errors") {
    SampleStream stream(GaussianModel::isotropic(Vec::Zero(8)), 81);
    CHECK_THROWS_AS(test_and_optimize_mean(0.5, 0.1, 0.25, Vec::Zero(7), stream), ArgumentError);
    CHECK_THROWS_AS(test_and_optimize_mean(0.5, 0.1, 0.5, Vec::Zero(8), stream), ArgumentError);
    CHECK_THROWS_AS(test_and_optimize_mean(0.0, 0.1, 0.1, Vec::Zero(8), stream), ArgumentError);
    CHECK(stream.drawn_count() == 0u);
}

TEST_CASE("covariance path with exact advice at d = 4") {
    Rng rng(82);
    const SymMat advice = random_pd(rng, 4, 0.5);
    const auto truth = GaussianModel::with_covariance(Vec{{1.0, -1.0, 0.0, 2.0}}, advice);
    for (std::uint64_t trial = 0; trial < 5; ++trial) {
        SampleStream stream(truth, Rng(83, trial));
        const EstimatorReport r = test_and_optimize_covariance(0.9, 0.1, 1.0, advice, stream);
        check_accounting(r, stream, 0);
        REQUIRE(r.cov_estimate.has_value());
        CHECK(r.samples_by_phase.at("mean") == static_cast<std::uint64_t>(mean_fallback_samples(4, 0.9, 0.1, 8.0)));
        const auto est = GaussianModel::with_covariance(r.mean_estimate, *r.cov_estimate);
        CHECK(distance(truth, est).tv_upper <= 0.9);
    }
}

TEST_CASE("covariance path with exact advice at d = 8, eta = 1") {
    // k = d gives 21 full-width blocks each graded at least alpha = eps / sqrt(8),
    // so lambda >= 2 * 21 * eps = 21 > eps d = 4 and neither the early exit
    // nor the program is reachable; the learner must fall back.
    const SymMat advice = SymMat::Identity(8, 8);
    const auto truth = GaussianModel::with_covariance(Vec::Zero(8), advice);
    int good = 0;
    for (std::uint64_t trial = 0; trial < 3; ++trial) {
        SampleStream stream(truth, Rng(84, trial));
        const EstimatorReport r = test_and_optimize_covariance(0.5, 0.1, 1.0, advice, stream);
        check_accounting(r, stream, 0);
        CHECK(r.branch == Branch::EmpiricalFallback);
        if (r.lambda) CHECK(*r.lambda >= 21.0 - 1e-9);
        const auto est = GaussianModel::with_covariance(r.mean_estimate, *r.cov_estimate);
        good += distance(truth, est).tv_upper <= 0.5;
    }
    CHECK(good == 3);
}

TEST_CASE("wildly wrong covariance advice falls back") {
    const SymMat advice = SymMat::Identity(4, 4);
    for (std::uint64_t trial = 0; trial < 5; ++trial) {
        SampleStream stream(GaussianModel::with_covariance(Vec::Zero(4), 5.0 * advice), Rng(85, trial));
        const EstimatorReport r = test_and_optimize_covariance(0.9, 0.1, 1.0, advice, stream);
        CHECK(r.branch == Branch::EmpiricalFallback);
        CHECK(r.samples_by_phase.at("empirical") == 2u * static_cast<std::uint64_t>(cov_fallback_pairs(4, 0.9, 0.1, 8.0)));
        check_accounting(r, stream, 0);
    }
}

TEST_CASE("covariance path with the preconditioner") {
    const SymMat advice = SymMat::Identity(4, 4);
    SampleStream stream(GaussianModel::with_covariance(Vec::Zero(4), advice), 86);
    EstimatorOptions opts;
    opts.use_preconditioner = true;
    const EstimatorReport r = test_and_optimize_covariance(0.9, 0.1, 1.0, advice, stream, opts);
    CHECK(r.samples_by_phase.at("precondition") == 8u);
    check_accounting(r, stream, 0);
}

TEST_CASE("covariance path errors") {
    SampleStream stream(GaussianModel::isotropic(Vec::Zero(3)), 87);
    CHECK_THROWS_AS(test_and_optimize_covariance(0.5, 0.1, 1.0, SymMat::Identity(2, 2), stream), ArgumentError);
    CHECK_THROWS_AS(test_and_optimize_covariance(0.5, 0.1, 1.5, SymMat::Identity(3, 3), stream), ArgumentError);
    CHECK_THROWS_AS(test_and_optimize_covariance(0.5, 0.1, 1.0, SymMat(Vec{{1.0, 1.0, 0.0}}.asDiagonal()), stream),
                    ArgumentError);
    CHECK(stream.drawn_count() == 0u);
}

TEST_CASE("branch names") {
    CHECK(std::string(to_string(Branch::EarlyTermination)) == "EarlyTermination");
    CHECK(std::string(to_string(Branch::AdviceExact)) == "AdviceExact");
}
