#include <doctest.h>

#include "helpers.hpp"
#include "lvggm/solver.hpp"

using lvggm::AtomicPSD;
using lvggm::Estimate;
using lvggm::GaugeSpec;
using lvggm::LossKind;
using lvggm::SolverConfig;
using lvggm::SymmetricMatrix;

namespace {

SolverConfig base_config(int k) {
    SolverConfig cfg;
    cfg.gauge = GaugeSpec::fixed_k(k);
    cfg.loss_kind = LossKind::ScoreMatching;
    return cfg;
}

double atom_gradient_residual(const Estimate& est, const SymmetricMatrix& sigma_hat) {
    // |d objective / d c_i| at the returned estimate, for retained atoms
    const Eigen::MatrixXd m = est.S.mat() - est.L.materialize().mat();
    const Eigen::MatrixXd g =
        lvggm::loss_grad(est.loss_kind, SymmetricMatrix(m), sigma_hat).mat();
    double worst = 0.0;
    for (const lvggm::Atom& a : est.L.atoms()) {
        const double align = a.u.dot(g * a.u);
        worst = std::max(worst, std::abs(est.lambda - align));
    }
    return worst;
}

} // namespace

TEST_CASE("scalar soft threshold") {
    CHECK(lvggm::soft_threshold(0.5, 0.2) == doctest::Approx(0.3));
    CHECK(lvggm::soft_threshold(-0.1, 0.2) == 0.0);
    CHECK(lvggm::soft_threshold(-0.5, 0.2) == doctest::Approx(-0.3));
}

TEST_CASE("one unpenalized ISTA step from zero") {
    SolverConfig cfg = base_config(1);
    cfg.lambda = 0.0;
    cfg.ista_steps_per_outer = 1;
    Eigen::MatrixXd sig = 2.0 * Eigen::MatrixXd::Identity(2, 2);
    const SymmetricMatrix s =
        lvggm::ista_update_S(SymmetricMatrix(2), AtomicPSD(2), SymmetricMatrix(sig), cfg);
    CHECK((s.mat() - 0.5 * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("ISTA fixed point on the identity") {
    SolverConfig cfg = base_config(1);
    cfg.lambda = 0.1;
    cfg.gamma = 1.0;
    SymmetricMatrix s(3);
    for (int outer = 0; outer < 5; ++outer)
        s = lvggm::ista_update_S(s, AtomicPSD(3), SymmetricMatrix::identity(3), cfg);
    CHECK((s.mat() - 0.9 * Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("column generation stays empty at a stationary point") {
    SolverConfig cfg = base_config(2);
    cfg.lambda = 0.5;
    const AtomicPSD l = lvggm::fcg_update_L(SymmetricMatrix::identity(4), AtomicPSD(4),
                                            SymmetricMatrix::identity(4), cfg);
    CHECK(l.empty());
}

TEST_CASE("column generation stays empty when the corrective step would zero it") {
    SolverConfig cfg = base_config(2);
    cfg.lambda = 0.5;
    const AtomicPSD l =
        lvggm::fcg_update_L(SymmetricMatrix(4), AtomicPSD(4), SymmetricMatrix::identity(4), cfg);
    CHECK(l.empty());
}

TEST_CASE("column generation recovers a planted sparse factor") {
    // With Sigma = I the score matching loss is 0.5||M - I||_F^2 up to a
    // constant, so S = I + u u^T makes L = u u^T the exact L-minimizer as
    // lambda -> 0.
    const int p = 8;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(p);
    u[1] = std::sqrt(0.5);
    u[4] = -std::sqrt(0.3);
    u[6] = std::sqrt(0.2);
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(p, p) + u * u.transpose();

    SolverConfig cfg = base_config(3);
    cfg.lambda = 1e-5;
    const AtomicPSD l = lvggm::fcg_update_L(SymmetricMatrix(s), AtomicPSD(p),
                                            SymmetricMatrix::identity(p), cfg);
    REQUIRE(l.size() == 1);
    CHECK(l.atom(0).support == std::vector<int>{1, 4, 6});
    CHECK((l.materialize().mat() - u * u.transpose()).cwiseAbs().maxCoeff() <= 1e-3);
}

TEST_CASE("fit on the identity covariance gives the shrunk identity and empty L") {
    SolverConfig cfg = base_config(3);
    cfg.lambda = 0.1;
    cfg.gamma = 1.0;
    const Estimate est = lvggm::fit_lvggm(SymmetricMatrix::identity(6), cfg);
    CHECK((est.S.mat() - 0.9 * Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(est.L.empty());
    CHECK(est.iterations >= 1);
}

TEST_CASE("unpenalized Taylor fit reaches the inverse") {
    std::mt19937_64 rng(101);
    const SymmetricMatrix sigma = testutil::random_spd(10, rng, 1.0);
    SolverConfig cfg = base_config(3);
    cfg.loss_kind = LossKind::Taylor;
    cfg.lambda = 0.0;
    cfg.outer_iters = 200;
    const Estimate est = lvggm::fit_lvggm(sigma, cfg);
    const Eigen::MatrixXd m = est.S.mat() - est.L.materialize().mat();
    CHECK((m - sigma.mat().inverse()).norm() <= 1e-4);
}

TEST_CASE("objective trace is non-increasing") {
    std::mt19937_64 rng(103);
    const SymmetricMatrix sigma = testutil::random_spd(8, rng);
    SolverConfig cfg = base_config(3);
    cfg.lambda = 0.05;
    cfg.gamma = 0.5;
    const Estimate est = lvggm::fit_lvggm(sigma, cfg);
    REQUIRE(est.objective_trace.size() >= 2);
    for (size_t t = 1; t < est.objective_trace.size(); ++t)
        CHECK(est.objective_trace[t] <=
              est.objective_trace[t - 1] +
                  1e-9 * std::max(1.0, std::abs(est.objective_trace[t - 1])));
}

TEST_CASE("retained atoms satisfy first-order optimality") {
    std::mt19937_64 rng(107);
    // a covariance with genuine low-rank structure so atoms are retained
    Eigen::VectorXd u = Eigen::VectorXd::Zero(8);
    u[0] = u[2] = u[5] = 1.0 / std::sqrt(3.0);
    Eigen::MatrixXd k_true = Eigen::MatrixXd::Identity(8, 8) * 2.0 - 0.8 * u * u.transpose();
    const SymmetricMatrix sigma(Eigen::MatrixXd(k_true.inverse()));
    SolverConfig cfg = base_config(3);
    cfg.lambda = 0.02;
    cfg.gamma = 2.0;
    const Estimate est = lvggm::fit_lvggm(sigma, cfg);
    REQUIRE(!est.L.empty());
    CHECK(atom_gradient_residual(est, sigma) <= 1e-8);
    for (const lvggm::Atom& a : est.L.atoms()) CHECK(a.c > 1e-10);
}

TEST_CASE("returned L is PSD and S symmetric") {
    std::mt19937_64 rng(109);
    const SymmetricMatrix sigma = testutil::random_spd(8, rng);
    SolverConfig cfg = base_config(3);
    cfg.lambda = 0.01;
    cfg.gamma = 0.3;
    const Estimate est = lvggm::fit_lvggm(sigma, cfg);
    CHECK((est.S.mat() - est.S.mat().transpose()).cwiseAbs().maxCoeff() == 0.0);
    const auto eig = est.L.materialize().eigenvalues();
    CHECK(eig.minCoeff() >= -1e-10 * std::max(1.0, eig.maxCoeff()));
}

TEST_CASE("scaling the data fit and lambda together leaves the estimate unchanged") {
    std::mt19937_64 rng(113);
    const SymmetricMatrix sigma = testutil::random_spd(10, rng);
    SolverConfig cfg = base_config(3);
    cfg.lambda = 0.05;
    cfg.gamma = 0.7;

    const double a = 3.0;
    SolverConfig scaled = cfg;
    scaled.lambda = a * cfg.lambda;
    scaled.corrective_tol = a * cfg.corrective_tol;

    const Estimate e1 = lvggm::detail::fit_quadratic(
        lvggm::QuadraticLoss::score_matching(sigma, 1.0), cfg, nullptr, nullptr);
    const Estimate e2 = lvggm::detail::fit_quadratic(
        lvggm::QuadraticLoss::score_matching(sigma, a), scaled, nullptr, nullptr);
    CHECK((e1.S.mat() - e2.S.mat()).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((e1.L.materialize().mat() - e2.L.materialize().mat()).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("fits are deterministic for a fixed seed") {
    std::mt19937_64 rng(127);
    const SymmetricMatrix sigma = testutil::random_spd(9, rng);
    SolverConfig cfg = base_config(3);
    cfg.lambda = 0.03;
    cfg.seed = 42;
    const Estimate a = lvggm::fit_lvggm(sigma, cfg);
    const Estimate b = lvggm::fit_lvggm(sigma, cfg);
    CHECK((a.S.mat() - b.S.mat()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.L.materialize().mat() - b.L.materialize().mat()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("eigenvalue soft-threshold prox") {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = -1.0;
    const SymmetricMatrix prox = lvggm::psd_trace_prox(SymmetricMatrix(d), 1.0);
    CHECK(prox(0, 0) == doctest::Approx(2.0));
    CHECK(prox(1, 1) == doctest::Approx(0.0));
    CHECK(prox(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("baseline on the identity covariance") {
    auto [s, l] = lvggm::fit_baseline(SymmetricMatrix::identity(5), 0.1, 1.0,
                                      LossKind::ScoreMatching, 20);
    CHECK((s.mat() - 0.9 * Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(l.max_abs() <= 1e-12);
}

TEST_CASE("weighted-gauge fit accepts and penalizes by level") {
    std::mt19937_64 rng(131);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(8);
    u[0] = u[1] = u[2] = u[3] = 0.5;
    Eigen::MatrixXd k_true = 2.0 * Eigen::MatrixXd::Identity(8, 8) - 0.9 * u * u.transpose();
    const SymmetricMatrix sigma(Eigen::MatrixXd(k_true.inverse()));
    SolverConfig cfg;
    cfg.gauge = GaugeSpec::weighted_sqrt(8);
    cfg.loss_kind = LossKind::ScoreMatching;
    cfg.lambda = 0.01;
    cfg.gamma = 2.0;
    const Estimate est = lvggm::fit_lvggm(sigma, cfg);
    REQUIRE(!est.L.empty());
    // the planted factor has four active coordinates
    CHECK(est.L.atom(0).k() == 4);
}
