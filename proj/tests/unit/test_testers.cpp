#include <cmath>
#include <vector>

#include <doctest.h>

#include "advgauss/gauss.hpp"
#include "advgauss/testers.hpp"
#include "oracles.hpp"

using namespace advgauss;

TEST_CASE("round counts") {
    CHECK(r_delta(12.0 / std::exp(2.0)) == 3);
    CHECK(r_delta(0.1) == 1 + 5);
    CHECK(majority_rounds(0.1) == 5);
    CHECK(majority_rounds(0.05) == 7);  // ceil(ln 240) = 6, bumped to odd
    for (double delta : {0.5, 0.2, 0.1, 0.01, 1e-4}) CHECK(majority_rounds(delta) % 2 == 1);
    CHECK_THROWS_AS(r_delta(0.0), ArgumentError);
    CHECK_THROWS_AS(r_delta(12.0), ArgumentError);
    CHECK_THROWS_AS(mean_tester_config(4, 0.5, 1.0, 1.0), ArgumentError);
}

TEST_CASE("mean sample count") {
    CHECK(mean_batch_size(100, 1.0) == 54);
    CHECK(mean_sample_count(100, 1.0, 0.1) == 54 * r_delta(0.1));
    CHECK(mean_batch_size(4, 1e6) == 1);
}

TEST_CASE("covariance sample count") {
    CHECK(cov_batch_size(2, 1.0) == 6400);
    CHECK(cov_batch_size(1, 2.0) == 3200);
    CHECK(cov_batch_size(3, 0.5) == 3200 * 3 * 4);
    CHECK(cov_sample_count(2, 1.0, 0.3) / cov_batch_size(2, 1.0) == r_delta(0.3));
    CHECK(cov_sample_count(2, 1.0, 0.3) / 6400 == mean_sample_count(2, 1.0, 0.3) / mean_batch_size(2, 1.0));
}

TEST_CASE("tester configurations") {
    const TesterConfig m = mean_tester_config(512, 0.5, 1.0, 0.05);
    CHECK(m.n == static_cast<std::int64_t>(std::ceil(16.0 * std::sqrt(512.0) / 0.75)));
    CHECK(m.rounds == 7);
    CHECK(m.tau == doctest::Approx(512.0 + m.n * 1.25 / 2.0));
    CHECK(m.required_samples() == m.n * m.rounds);

    // eps2 = 2 eps1 reduces the tester batch to the m(d, eps, delta) batch
    CHECK(mean_tester_config(100, 1.0, 2.0, 0.1).n == mean_batch_size(100, 1.0));

    const TesterConfig c = cov_tester_config(8, 0.5, 0.5 * std::sqrt(2.0), 0.1);
    // max{1/eps1², (eps1²/gap)², 2 (eps2/gap)²} = max{4, 1, 16}
    CHECK(c.n == 3200 * 8 * 16);
    CHECK(c.tau == doctest::Approx(0.375));
    CHECK(c.rounds == 5);

    CHECK_THROWS_AS(mean_tester_config(4, 1.0, 1.0, 0.1), ArgumentError);
    CHECK_THROWS_AS(cov_tester_config(4, 0.0, 1.0, 0.1), ArgumentError);
    CHECK_THROWS_AS(mean_tester_config(0, 1.0, 2.0, 0.1), ArgumentError);
}

TEST_CASE("configuration monotonicity") {
    std::int64_t last_n = mean_tester_config(64, 0.5, 0.6, 0.1).n;
    std::int64_t last_c = cov_tester_config(4, 0.5, 0.6, 0.1).n;
    for (double e2 : {0.7, 0.9, 1.2, 2.0, 4.0}) {
        const std::int64_t n = mean_tester_config(64, 0.5, e2, 0.1).n;
        const std::int64_t c = cov_tester_config(4, 0.5, e2, 0.1).n;
        CHECK(n <= last_n);
        CHECK(c <= last_c);
        last_n = n;
        last_c = c;
    }
    std::int64_t last_r = 0;
    for (double delta : {0.9, 0.5, 0.1, 0.01, 1e-3, 1e-6}) {
        const std::int64_t r = mean_tester_config(64, 0.5, 1.0, delta).rounds;
        CHECK(r >= last_r);
        last_r = r;
    }
}

TEST_CASE("mean statistic examples") {
    CHECK(mean_stat(Batch::Ones(1, 4)) == doctest::Approx(4.0));
    CHECK(mean_stat(Batch::Zero(3, 7)) == 0.0);
    CHECK_THROWS_AS(mean_stat(Batch(3, 0)), ArgumentError);
}

TEST_CASE("mean statistic expectation is d + n |mu|^2") {
    const Vec mu{{0.5, 0.0, 0.0, 0.0}};
    SampleStream stream(GaussianModel::isotropic(mu), 31);
    const int trials = 100'000, n = 5;
    double sum = 0.0;
    for (int t = 0; t < trials; ++t) sum += mean_stat(stream.draw(n));
    CHECK(sum / trials == doctest::Approx(4.0 + n * 0.25).epsilon(0.01));
}

TEST_CASE("covariance statistic examples") {
    CHECK(cov_stat(Batch{{1.0, 2.0}}) == doctest::Approx(0.0));
    CHECK(cov_stat(Batch{{1.0, 1.0}, {0.0, 0.0}}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(cov_stat(Batch::Ones(2, 1)), ArgumentError);
}

TEST_CASE("Gram identity equals the pair loop") {
    Rng rng(32);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.below(6));
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.below(49));
        Batch b(d, n);
        for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = 1.5 * rng.normal();
        const double fast = cov_stat(b), slow = oracle::naive_cov_stat(b);
        CHECK(std::abs(fast - slow) <= 1e-10 * std::max(1.0, std::abs(slow)));
    }
}

TEST_CASE("covariance statistic mean and variance") {
    const SymMat sigma = Vec{{2.0, 1.0}}.asDiagonal();
    SampleStream stream(GaussianModel::with_covariance(Vec::Zero(2), sigma), 33);
    const int trials = 100'000, n = 50;
    std::vector<double> values;
    values.reserve(trials);
    for (int t = 0; t < trials; ++t) values.push_back(cov_stat(stream.draw(n)));
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= trials;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= trials - 1;
    CHECK(mean == doctest::Approx(1.0).epsilon(0.02));

    const double d = 2.0, frob_sq = 1.0;
    const double b2 = frob_sq * n / d;
    const double bound = 64.0 * d * d / (n * n) * (1.0 + b2 / n) * (1.0 + b2 / n + b2);
    CHECK(var <= 1.1 * bound);
}

TEST_CASE("chi-square tail bounds") {
    CHECK(chisq_upper_tail_bound(10.0, 0.0, 10.0) == doctest::Approx(std::exp(-1.25)));
    CHECK(chisq_upper_tail_bound(10.0, 2.0, 1e-9) == doctest::Approx(1.0));
    CHECK(chisq_lower_tail_bound(10.0, 2.0, 1e-9) == doctest::Approx(1.0));
    CHECK(chisq_lower_tail_bound(10.0, 0.0, 5.0) == doctest::Approx(std::exp(-10.0 * 25.0 / 400.0)));
    const ChiSquareTails both = chisq_tail_bounds(10.0, 0.0, 5.0);
    CHECK(both.upper == chisq_upper_tail_bound(10.0, 0.0, 5.0));
    CHECK(both.lower == chisq_lower_tail_bound(10.0, 0.0, 5.0));

    CHECK_THROWS_AS(chisq_upper_tail_bound(10.0, 0.0, 0.0), ArgumentError);
    CHECK_THROWS_AS(chisq_lower_tail_bound(10.0, 1.0, 11.0), ArgumentError);
    CHECK_THROWS_AS(chisq_tail_bounds(10.0, 1.0, 20.0), ArgumentError);
}

TEST_CASE("empirical chi-square tails respect the bounds") {
    const int d = 6, n = 4, trials = 10'000;
    const Vec mu = Vec::Constant(d, 0.3);
    const double lambda = n * mu.squaredNorm();
    SampleStream stream(GaussianModel::isotropic(mu), 34);
    std::vector<double> ys;
    for (int t = 0; t < trials; ++t) ys.push_back(mean_stat(stream.draw(n)));
    for (double t : {2.0, 4.0, 6.0, 8.0}) {
        int upper = 0, lower = 0;
        for (double y : ys) {
            upper += y > d + lambda + t ? 1 : 0;
            lower += y < d + lambda - t ? 1 : 0;
        }
        const double up_bound = chisq_upper_tail_bound(d, lambda, t);
        const double lo_bound = chisq_lower_tail_bound(d, lambda, t);
        CHECK(upper / double(trials) <= up_bound + 3.0 * std::sqrt(up_bound * (1 - up_bound) / trials));
        CHECK(lower / double(trials) <= lo_bound + 3.0 * std::sqrt(lo_bound * (1 - lo_bound) / trials));
    }
}

TEST_CASE("testers fail on short batches and reject bad shapes") {
    const TesterConfig m = mean_tester_config(16, 0.5, 1.0, 0.1);
    CHECK(tolerant_mean_test(m, Batch::Zero(16, m.required_samples() - 1)).verdict == Verdict::Fail);
    CHECK_THROWS_AS(tolerant_mean_test(m, Batch::Zero(15, m.required_samples())), ArgumentError);

    const TesterConfig c = cov_tester_config(2, 1.0, 2.0, 0.1);
    CHECK(tolerant_cov_test(c, Batch::Zero(2, c.required_samples() - 1)).verdict == Verdict::Fail);
    CHECK_THROWS_AS(tolerant_cov_test(c, Batch::Zero(3, c.required_samples())), ArgumentError);
    CHECK(std::string(to_string(Verdict::Fail)) == "Fail");
}

TEST_CASE("guarantee preconditions") {
    CHECK(mean_guarantee_holds(512, 0.5, 1.0));
    CHECK_FALSE(mean_guarantee_holds(400, 0.5, 1.0));
    CHECK(cov_guarantee_holds(8, 0.5 * std::sqrt(2.0)));
    CHECK_FALSE(cov_guarantee_holds(1, 2.0));

    const TesterConfig small = mean_tester_config(8, 0.5, 1.0, 0.1);
    SampleStream stream(GaussianModel::isotropic(Vec::Zero(8)), 35);
    const TestResult r = tolerant_mean_test(small, stream.draw(small.required_samples()));
    CHECK(r.guarantee_void);
    CHECK(r.verdict != Verdict::Fail);
}

TEST_CASE("verdicts are deterministic in the batch") {
    const TesterConfig m = mean_tester_config(32, 0.5, 1.0, 0.1);
    SampleStream stream(GaussianModel::isotropic(Vec::Constant(32, 0.13)), 36);
    const Batch b = stream.draw(m.required_samples());
    const Verdict first = tolerant_mean_test(m, b).verdict;
    for (int i = 0; i < 5; ++i) CHECK(tolerant_mean_test(m, b).verdict == first);
}

TEST_CASE("tolerant mean tester operating characteristic") {
    const TesterConfig cfg = mean_tester_config(512, 0.5, 1.0, 0.05);
    Vec far = Vec::Zero(512);
    far[0] = 1.5;
    int accept_null = 0, reject_far = 0;
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        SampleStream null_stream(GaussianModel::isotropic(Vec::Zero(512)), Rng(37, trial, 0));
        SampleStream far_stream(GaussianModel::isotropic(far), Rng(37, trial, 1));
        accept_null += tolerant_mean_test(cfg, null_stream.draw(cfg.required_samples())).verdict == Verdict::Accept;
        reject_far += tolerant_mean_test(cfg, far_stream.draw(cfg.required_samples())).verdict == Verdict::Reject;
    }
    CHECK(accept_null >= 95);
    CHECK(reject_far >= 95);
}

TEST_CASE("tolerant covariance tester on a handful of trials") {
    const TesterConfig cfg = cov_tester_config(8, 0.5, 0.5 * std::sqrt(2.0), 0.1);
    SymMat far = SymMat::Identity(8, 8);
    far(0, 0) = 2.0;
    int accept_null = 0, reject_far = 0;
    for (std::uint64_t trial = 0; trial < 5; ++trial) {
        SampleStream null_stream(GaussianModel::isotropic(Vec::Zero(8)), Rng(38, trial, 0));
        SampleStream far_stream(GaussianModel::with_covariance(Vec::Zero(8), far), Rng(38, trial, 1));
        accept_null += tolerant_cov_test(cfg, null_stream.draw(cfg.required_samples())).verdict == Verdict::Accept;
        reject_far += tolerant_cov_test(cfg, far_stream.draw(cfg.required_samples())).verdict == Verdict::Reject;
    }
    CHECK(accept_null == 5);
    CHECK(reject_far == 5);
}
