// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "pilotcov/covariance.hpp"
#include "pilotcov/estimators.hpp"

using namespace pilotcov;
using Catch::Approx;
using std::numbers::pi;

namespace {

using Pilot = PilotSequence<double>;

CMatrixXd random_psd(int m, int rank, std::mt19937_64& rng) {
    CMatrixXd g(m, rank);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < rank; ++j) g(i, j) = complex_gaussian(rng, 1.0);
    return g * g.adjoint();
}

CVectorXd random_vector(int n, std::mt19937_64& rng) {
    CVectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = complex_gaussian(rng, 1.0);
    return v;
}

double rel(const CVectorXd& a, const CVectorXd& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

// Two-cell Table-I-like covariances: 800 m desired link, ~1100 m interferer.
std::vector<CMatrixXd> two_cell_covariances(int m) {
    const ArrayGeometry<double> geom(m, 0.5);
    const double alpha = 100.0 * std::pow(1000.0, 3.0);
    return {covariance_from_density(geom, AoaDensity<double>::gaussian(deg2rad(80), deg2rad(10)),
                                    path_loss(alpha, 800.0, 3.0)).entries,
            covariance_from_density(geom, AoaDensity<double>::gaussian(deg2rad(60), deg2rad(10)),
                                    path_loss(alpha, 1100.0, 3.0)).entries};
}

}  // namespace

TEST_CASE("pilot power constraint") {
    CHECK(Pilot::all_ones(10).symbols().squaredNorm() == Approx(10.0));
    std::mt19937_64 rng(1);
    CHECK(Pilot::random(7, rng).symbols().squaredNorm() == Approx(7.0).epsilon(1e-12));
    CHECK_THROWS_AS(Pilot(CVectorXd::Zero(4)), DomainError);
    CHECK_THROWS_AS(Pilot(2.0 * CVectorXd::Ones(4)), DomainError);
}

TEST_CASE("simulate_received without noise") {
    std::mt19937_64 rng(2);
    const auto h1 = random_vector(6, rng);
    const auto h2 = random_vector(6, rng);
    const Pilot s = Pilot::random(5, rng);
    const std::vector<CVectorXd> one{h1};
    const std::vector<Pilot> p1{s};
    const auto y1 = simulate_received<double>(one, p1, 0.0, rng);
    CHECK((y1 - h1 * s.symbols().transpose()).norm() < 1e-12);
    CHECK(y1.fullPivLu().rank() == 1);

    const std::vector<CVectorXd> two{h1, h2};
    const std::vector<Pilot> p2{s, s};
    const auto y2 = simulate_received<double>(two, p2, 0.0, rng);
    CHECK((y2 - (h1 + h2) * s.symbols().transpose()).norm() < 1e-12);
    // LS under identical pilots returns the sum of all channels
    CHECK(rel(ls_estimate(y2, s), h1 + h2) < 1e-12);
    CHECK(rel(ls_estimate(y1, s), h1) < 1e-12);
}

TEST_CASE("simulate_received noise variance and LS noise variance") {
    std::mt19937_64 rng(3);
    const std::vector<CVectorXd> zero{CVectorXd::Zero(10)};
    const std::vector<Pilot> pilot{Pilot::all_ones(10)};
    const double noise_var = 2.5;
    double acc = 0.0;
    long count = 0;
    double ls_acc = 0.0;
    long ls_count = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto y = simulate_received<double>(zero, pilot, noise_var, rng);
        acc += y.squaredNorm();
        count += y.size();
        ls_acc += ls_estimate(y, pilot[0]).squaredNorm();
        ls_count += 10;
    }
    CHECK(acc / count == Approx(noise_var).epsilon(0.02));
    CHECK(ls_acc / ls_count == Approx(noise_var / 10).epsilon(0.03));
}

TEST_CASE("simulate_received rejects mismatched dimensions") {
    std::mt19937_64 rng(4);
    const std::vector<CVectorXd> ch{CVectorXd::Ones(4), CVectorXd::Ones(5)};
    const std::vector<Pilot> p{Pilot::all_ones(3), Pilot::all_ones(3)};
    CHECK_THROWS_AS(simulate_received<double>(ch, p, 1.0, rng), DomainError);
    const std::vector<CVectorXd> ch2{CVectorXd::Ones(4), CVectorXd::Ones(4)};
    const std::vector<Pilot> p2{Pilot::all_ones(3), Pilot::all_ones(4)};
    CHECK_THROWS_AS(simulate_received<double>(ch2, p2, 1.0, rng), DomainError);
}

TEST_CASE("joint MAP and MMSE forms agree on random instances") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        const int m = 1 + int(rng() % 16);
        const int l = 1 + int(rng() % 4);
        const int tau = 1 + int(rng() % 8);
        EstimationProblem<double> prob;
        prob.noise_var = 0.05 + double(rng() % 100) / 50.0;
        for (int c = 0; c < l; ++c) {
            prob.covariances.push_back(random_psd(m, 1 + int(rng() % m), rng));
            prob.pilots.push_back(Pilot::random(tau, rng));
        }
        const auto y = random_vector(m * tau, rng);
        const auto bayes = joint_bayes_estimate(y, prob);
        const auto mmse = joint_mmse_estimate(y, prob);
        CHECK(rel(bayes, mmse) < 1e-8);
    }
}

TEST_CASE("joint estimators: zero covariances and large noise") {
    std::mt19937_64 rng(6);
    EstimationProblem<double> prob;
    prob.pilots = {Pilot::all_ones(4), Pilot::all_ones(4)};
    prob.covariances = {CMatrixXd::Zero(3, 3), CMatrixXd::Zero(3, 3)};
    const auto y = random_vector(12, rng);
    CHECK(joint_bayes_estimate(y, prob).norm() == 0.0);
    CHECK(joint_mmse_estimate(y, prob).norm() == 0.0);
    CHECK(analytic_mse_joint(prob) == 0.0);

    prob.covariances = {random_psd(3, 3, rng), random_psd(3, 2, rng)};
    prob.noise_var = 1e12;
    CHECK(joint_mmse_estimate(y, prob).norm() < 1e-9);
    const double sum_tr = real_trace(prob.covariances[0]) + real_trace(prob.covariances[1]);
    CHECK(analytic_mse_joint(prob) == Approx(sum_tr).epsilon(1e-6));
}

TEST_CASE("joint estimators reject bad problems") {
    std::mt19937_64 rng(7);
    EstimationProblem<double> prob;
    prob.pilots = {Pilot::all_ones(4)};
    prob.covariances = {CMatrixXd::Identity(3, 3)};
    CHECK_THROWS_AS(joint_bayes_estimate(random_vector(11, rng), prob), DomainError);
    prob.noise_var = 0.0;
    CHECK_THROWS_AS(joint_mmse_estimate(random_vector(12, rng), prob), DomainError);
    prob.noise_var = 1.0;
    prob.pilots.push_back(Pilot::all_ones(4));
    CHECK_THROWS_AS(analytic_mse_joint(prob), DomainError);
}

TEST_CASE("scalar reduction: one cell, R = I, all-ones pilot") {
    std::mt19937_64 rng(8);
    const int m = 5;
    const int tau = 10;
    const double noise_var = 0.7;
    const Pilot s = Pilot::all_ones(tau);
    const std::vector<CVectorXd> h{random_vector(m, rng)};
    const std::vector<Pilot> p{s};
    const auto y_block = simulate_received<double>(h, p, noise_var, rng);
    const auto y = vectorize(y_block);
    const CVectorXd expected = tau / (noise_var + tau) * ls_estimate(y_block, s);

    const std::vector<CMatrixXd> covs{CMatrixXd::Identity(m, m)};
    CHECK(rel(single_mmse_estimate<double>(y, s, covs, noise_var), expected) < 1e-12);
    EstimationProblem<double> prob{{s}, covs, noise_var};
    CHECK(rel(joint_bayes_estimate(y, prob), expected) < 1e-12);
    CHECK(rel(no_interference_estimate<double>(y, s, covs[0], noise_var), expected) < 1e-12);
    CHECK(analytic_mse_no_int<double>(covs[0], noise_var, tau) == Approx(m * noise_var / (noise_var + tau)));
}

TEST_CASE("single-channel estimator edge cases") {
    std::mt19937_64 rng(9);
    const Pilot s = Pilot::all_ones(4);
    const auto y = random_vector(12, rng);
    const std::vector<CMatrixXd> zero_desired{CMatrixXd::Zero(3, 3), random_psd(3, 3, rng)};
    CHECK(single_mmse_estimate<double>(y, s, zero_desired, 1.0).norm() == 0.0);
    CHECK(no_interference_estimate<double>(y, s, CMatrixXd::Zero(3, 3), 1.0).norm() == 0.0);
    CHECK(analytic_mse_no_int<double>(CMatrixXd::Zero(3, 3), 1.0, 4) == 0.0);

    // with zero interferers the single estimator is the interference-free one
    const CMatrixXd r1 = random_psd(3, 3, rng);
    const std::vector<CMatrixXd> silent{r1, CMatrixXd::Zero(3, 3), CMatrixXd::Zero(3, 3)};
    CHECK(rel(single_mmse_estimate<double>(y, s, silent, 0.5), no_interference_estimate<double>(y, s, r1, 0.5)) < 1e-12);
    CHECK(analytic_mse_single<double>(silent, 0.5, 4) == Approx(analytic_mse_no_int<double>(r1, 0.5, 4)).epsilon(1e-12));

    // interference-free, invertible R_1, vanishing noise
    const std::vector<CMatrixXd> only{r1};
    CHECK(analytic_mse_single<double>(only, 1e-10, 4) < 1e-6);

    CHECK_THROWS_AS(single_mmse_estimate<double>(random_vector(11, rng), s, only, 1.0), DomainError);
    CHECK_THROWS_AS(single_mmse_estimate<double>(y, s, only, 0.0), DomainError);
    const std::vector<CMatrixXd> mismatched{r1, CMatrixXd::Identity(4, 4)};
    CHECK_THROWS_AS(single_mmse_estimate<double>(y, s, mismatched, 1.0), DomainError);
}

TEST_CASE("estimators are linear in the observation") {
    std::mt19937_64 rng(10);
    const int m = 6;
    const int tau = 3;
    const Pilot s = Pilot::random(tau, rng);
    const std::vector<CMatrixXd> covs{random_psd(m, 3, rng), random_psd(m, 2, rng)};
    EstimationProblem<double> prob{{s, Pilot::random(tau, rng)}, covs, 0.3};
    for (int i = 0; i < 20; ++i) {
        const auto y1 = random_vector(m * tau, rng);
        const auto y2 = random_vector(m * tau, rng);
        const Complex<double> a = complex_gaussian(rng, 1.0);
        const Complex<double> b = complex_gaussian(rng, 1.0);
        const CVectorXd y = a * y1 + b * y2;
        auto single = [&](const CVectorXd& v) { return single_mmse_estimate<double>(v, s, covs, 0.3); };
        CHECK(rel(single(y), a * single(y1) + b * single(y2)) < 1e-10);
        CHECK(rel(joint_mmse_estimate(y, prob), a * joint_mmse_estimate(y1, prob) + b * joint_mmse_estimate(y2, prob)) <
              1e-10);
        const CMatrixXd yb = Eigen::Map<const CMatrixXd>(y.data(), m, tau);
        const CMatrixXd yb1 = Eigen::Map<const CMatrixXd>(y1.data(), m, tau);
        const CMatrixXd yb2 = Eigen::Map<const CMatrixXd>(y2.data(), m, tau);
        CHECK(rel(ls_estimate(yb, s), a * ls_estimate(yb1, s) + b * ls_estimate(yb2, s)) < 1e-12);
    }
}

TEST_CASE("MSE formulas: bounds, dominance and pilot invariance") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
        const int m = 2 + int(rng() % 10);
        const int tau = 1 + int(rng() % 10);
        const double noise_var = 0.01 + double(rng() % 100) / 20.0;
        std::vector<CMatrixXd> covs{random_psd(m, 1 + int(rng() % m), rng)};
        const int l = 1 + int(rng() % 4);
        for (int c = 1; c < l; ++c) covs.push_back(random_psd(m, 1 + int(rng() % m), rng));
        const double single = analytic_mse_single<double>(covs, noise_var, tau);
        const double tr = real_trace(covs[0]);
        CHECK(single >= -1e-9 * tr);
        CHECK(single <= tr * (1 + 1e-12));
        CHECK(analytic_mse_no_int<double>(covs[0], noise_var, tau) <= single * (1 + 1e-10) + 1e-12);
        const double base = analytic_mse_single_with_pilot<double>(Pilot::all_ones(tau), covs, noise_var);
        CHECK(base == Approx(single).epsilon(1e-9));
        const double other = analytic_mse_single_with_pilot<double>(Pilot::random(tau, rng), covs, noise_var);
        CHECK(std::abs(other - base) <= 1e-10 * std::max(1.0, base));
    }
}

TEST_CASE("single-channel MSE formulas match Monte-Carlo") {
    const int m = 10;
    const int tau = 10;
    const double noise_var = 1.0;
    const auto covs = two_cell_covariances(m);
    const ArrayGeometry<double> geom(m, 0.5);
    const double alpha = 100.0 * std::pow(1000.0, 3.0);
    const PathProfile<double> desired(50, path_loss(alpha, 800.0, 3.0), AoaDensity<double>::gaussian(deg2rad(80), deg2rad(10)));
    const PathProfile<double> interferer(50, path_loss(alpha, 1100.0, 3.0), AoaDensity<double>::gaussian(deg2rad(60), deg2rad(10)));
    const Pilot s = Pilot::all_ones(tau);
    const std::vector<Pilot> pilots{s, s};
    const std::vector<CMatrixXd> desired_only{covs[0]};

    std::mt19937_64 rng(12);
    double err_single = 0.0;
    double err_noint = 0.0;
    const int trials = 10000;
    for (int t = 0; t < trials; ++t) {
        const std::vector<CVectorXd> h{draw_channel(desired, geom, rng), draw_channel(interferer, geom, rng)};
        const auto y_block = simulate_received<double>(h, pilots, noise_var, rng);
        const CVectorXd noise_only = vectorize(y_block - (h[0] + h[1]) * s.symbols().transpose());
        const CVectorXd y = vectorize(y_block);
        const CVectorXd y_clean = vectorize(h[0] * s.symbols().transpose()) + noise_only;
        err_single += (single_mmse_estimate<double>(y, s, covs, noise_var) - h[0]).squaredNorm();
        err_noint += (no_interference_estimate<double>(y_clean, s, covs[0], noise_var) - h[0]).squaredNorm();
    }
    CHECK(err_single / trials == Approx(analytic_mse_single<double>(covs, noise_var, tau)).epsilon(0.03));
    CHECK(err_noint / trials == Approx(analytic_mse_no_int<double>(covs[0], noise_var, tau)).epsilon(0.03));
}

TEST_CASE("joint MSE formula matches Monte-Carlo") {
    const int m = 8;
    const int tau = 10;
    const double noise_var = 1.0;
    const auto covs = two_cell_covariances(m);
    const ArrayGeometry<double> geom(m, 0.5);
    const double alpha = 100.0 * std::pow(1000.0, 3.0);
    const PathProfile<double> desired(50, path_loss(alpha, 800.0, 3.0), AoaDensity<double>::gaussian(deg2rad(80), deg2rad(10)));
    const PathProfile<double> interferer(50, path_loss(alpha, 1100.0, 3.0), AoaDensity<double>::gaussian(deg2rad(60), deg2rad(10)));
    const Pilot s = Pilot::all_ones(tau);
    EstimationProblem<double> prob{{s, s}, covs, noise_var};

    std::mt19937_64 rng(13);
    double err = 0.0;
    const int trials = 10000;
    for (int t = 0; t < trials; ++t) {
        const std::vector<CVectorXd> h{draw_channel(desired, geom, rng), draw_channel(interferer, geom, rng)};
        const auto y = vectorize(simulate_received<double>(h, prob.pilots, noise_var, rng));
        CVectorXd stacked(2 * m);
        stacked << h[0], h[1];
        err += (joint_bayes_estimate(y, prob) - stacked).squaredNorm();
    }
    CHECK(err / trials == Approx(analytic_mse_joint(prob)).epsilon(0.03));
}

TEST_CASE("disjoint supports at M = 100: single estimate approaches the interference-free one") {
    const int m = 100;
    const int tau = 10;
    const ArrayGeometry<double> geom(m, 0.5);
    const auto d1 = AoaDensity<double>::uniform(deg2rad(90), deg2rad(20));
    const auto d2 = AoaDensity<double>::uniform(deg2rad(25), deg2rad(20));
    const std::vector<CMatrixXd> covs{covariance_from_density(geom, d1, 195.3).entries,
                                      covariance_from_density(geom, d2, 100.0).entries};
    const Pilot s = Pilot::all_ones(tau);
    std::mt19937_64 rng(14);
    std::vector<double> devs;
    for (int t = 0; t < 51; ++t) {
        const CVectorXd h1 = draw_channel(PathProfile<double>(50, 195.3, d1), geom, rng);
        const CVectorXd h2 = draw_channel(PathProfile<double>(50, 100.0, d2), geom, rng);
        CMatrixXd noise(m, tau);
        for (int i = 0; i < m; ++i)
            for (int k = 0; k < tau; ++k) noise(i, k) = complex_gaussian(rng, 1.0);
        const CVectorXd y = vectorize(CMatrixXd((h1 + h2) * s.symbols().transpose() + noise));
        const CVectorXd y_clean = vectorize(CMatrixXd(h1 * s.symbols().transpose() + noise));
        const auto est = single_mmse_estimate<double>(y, s, covs, 1.0);
        const auto ref = no_interference_estimate<double>(y_clean, s, covs[0], 1.0);
        devs.push_back(rel(est, ref));
    }
    std::nth_element(devs.begin(), devs.begin() + 25, devs.end());
    CHECK(devs[25] < 0.05);
}
