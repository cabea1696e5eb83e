#include <doctest.h>

#include "helpers.hpp"
#include "lvggm/losses.hpp"

using lvggm::LossKind;
using lvggm::SymmetricMatrix;

namespace {

// Central finite differences on the symmetric upper triangle; off-diagonal
// perturbations touch both mirror entries so the parameterization matches
// the optimization variable.
Eigen::MatrixXd fd_gradient(LossKind kind, const SymmetricMatrix& m,
                            const SymmetricMatrix& sigma, double h = 1e-5) {
    const int p = m.dim();
    Eigen::MatrixXd g(p, p);
    for (int i = 0; i < p; ++i) {
        for (int j = i; j < p; ++j) {
            Eigen::MatrixXd plus = m.mat(), minus = m.mat();
            plus(i, j) += h;
            minus(i, j) -= h;
            if (i != j) {
                plus(j, i) += h;
                minus(j, i) -= h;
            }
            const double d = (lvggm::loss_value(kind, SymmetricMatrix(plus), sigma) -
                              lvggm::loss_value(kind, SymmetricMatrix(minus), sigma)) /
                             (2.0 * h);
            g(i, j) = g(j, i) = (i == j) ? d : 0.5 * d;
        }
    }
    return g;
}

SymmetricMatrix diag2(double a, double b) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = a;
    d(1, 1) = b;
    return SymmetricMatrix(d);
}

} // namespace

TEST_CASE("score matching loss examples") {
    const SymmetricMatrix sigma = diag2(2.0, 4.0);
    CHECK(lvggm::loss_value(LossKind::ScoreMatching, SymmetricMatrix(2), sigma) == 0.0);
    CHECK(lvggm::loss_value(LossKind::ScoreMatching, SymmetricMatrix::identity(2), sigma) ==
          doctest::Approx(1.0));
}

TEST_CASE("Taylor loss vanishes at the exact inverse") {
    std::mt19937_64 rng(5);
    const SymmetricMatrix sigma = testutil::random_spd(6, rng);
    const SymmetricMatrix inv(Eigen::MatrixXd(sigma.mat().inverse()));
    CHECK(lvggm::loss_value(LossKind::Taylor, inv, sigma) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(lvggm::loss_grad(LossKind::Taylor, inv, sigma).max_abs() <= 1e-10);
}

TEST_CASE("negative log-likelihood value and domain error") {
    const SymmetricMatrix sigma = diag2(2.0, 4.0);
    // -log det(I) + tr(Sigma) = 6
    CHECK(lvggm::loss_value(LossKind::NegLogLik, SymmetricMatrix::identity(2), sigma) ==
          doctest::Approx(6.0));
    CHECK_THROWS_AS(lvggm::loss_value(LossKind::NegLogLik, diag2(1.0, -1.0), sigma), lvggm::Error);
}

TEST_CASE("score matching gradient at zero is -I") {
    const SymmetricMatrix sigma = diag2(2.0, 4.0);
    const SymmetricMatrix g = lvggm::loss_grad(LossKind::ScoreMatching, SymmetricMatrix(2), sigma);
    CHECK((g.mat() + Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("analytic gradients match finite differences") {
    std::mt19937_64 rng(17);
    for (LossKind kind : {LossKind::Taylor, LossKind::ScoreMatching}) {
        for (int trial = 0; trial < 5; ++trial) {
            const SymmetricMatrix sigma = testutil::random_spd(5, rng);
            const SymmetricMatrix m(testutil::random_sym(5, rng));
            const Eigen::MatrixXd analytic = lvggm::loss_grad(kind, m, sigma).mat();
            const Eigen::MatrixXd fd = fd_gradient(kind, m, sigma);
            const double rel = (analytic - fd).cwiseAbs().maxCoeff() /
                               std::max(1.0, fd.cwiseAbs().maxCoeff());
            CHECK(rel < 1e-6);
        }
    }
}

TEST_CASE("gradients are exactly symmetric") {
    std::mt19937_64 rng(29);
    const SymmetricMatrix sigma = testutil::random_spd(6, rng);
    const SymmetricMatrix m(testutil::random_sym(6, rng));
    for (LossKind kind : {LossKind::Taylor, LossKind::ScoreMatching}) {
        const Eigen::MatrixXd g = lvggm::loss_grad(kind, m, sigma).mat();
        CHECK((g - g.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("Lipschitz constants") {
    CHECK(lvggm::lipschitz_const(LossKind::ScoreMatching, diag2(2.0, 4.0)) ==
          doctest::Approx(4.0));
    CHECK(lvggm::lipschitz_const(LossKind::Taylor, diag2(2.0, 4.0)) == doctest::Approx(16.0));
    CHECK(lvggm::lipschitz_const(LossKind::ScoreMatching, SymmetricMatrix::identity(3)) ==
          doctest::Approx(1.0));
    CHECK_THROWS_AS(lvggm::lipschitz_const(LossKind::NegLogLik, diag2(1.0, 1.0)), lvggm::Error);
}

TEST_CASE("descent lemma holds with the stated constant") {
    std::mt19937_64 rng(31);
    for (LossKind kind : {LossKind::Taylor, LossKind::ScoreMatching}) {
        const SymmetricMatrix sigma = testutil::random_spd(6, rng);
        const double lip = lvggm::lipschitz_const(kind, sigma);
        for (int trial = 0; trial < 10; ++trial) {
            const Eigen::MatrixXd m = testutil::random_sym(6, rng);
            const Eigen::MatrixXd d = testutil::random_sym(6, rng);
            const double fm = lvggm::loss_value(kind, SymmetricMatrix(m), sigma);
            const Eigen::MatrixXd g = lvggm::loss_grad(kind, SymmetricMatrix(m), sigma).mat();
            for (double t : {0.1, 0.5, 1.0}) {
                const double lhs = lvggm::loss_value(kind, SymmetricMatrix(m + t * d), sigma);
                const double rhs = fm + t * (g.array() * d.array()).sum() +
                                   0.5 * t * t * lip * d.squaredNorm();
                CHECK(lhs <= rhs + 1e-9);
            }
        }
    }
}

TEST_CASE("quadratic losses are midpoint convex") {
    std::mt19937_64 rng(37);
    for (LossKind kind : {LossKind::Taylor, LossKind::ScoreMatching}) {
        const SymmetricMatrix sigma = testutil::random_spd(5, rng);
        for (int trial = 0; trial < 10; ++trial) {
            const Eigen::MatrixXd a = testutil::random_sym(5, rng);
            const Eigen::MatrixXd b = testutil::random_sym(5, rng);
            const double mid = lvggm::loss_value(kind, SymmetricMatrix(0.5 * (a + b)), sigma);
            const double avg = 0.5 * (lvggm::loss_value(kind, SymmetricMatrix(a), sigma) +
                                      lvggm::loss_value(kind, SymmetricMatrix(b), sigma));
            CHECK(mid <= avg + 1e-10);
        }
    }
}

TEST_CASE("loss dimension mismatch is a structural error") {
    CHECK_THROWS_AS(
        lvggm::loss_grad(LossKind::ScoreMatching, SymmetricMatrix(3), SymmetricMatrix(2)),
        lvggm::Error);
}
