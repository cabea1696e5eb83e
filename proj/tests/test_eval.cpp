#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "lvggm/eval.hpp"
#include "lvggm/synth.hpp"

using lvggm::AtomicPSD;
using lvggm::SupportMetrics;
using lvggm::SymmetricMatrix;

namespace {

AtomicPSD atoms_with_supports(int p, const std::vector<std::vector<int>>& supports) {
    AtomicPSD l(p);
    for (const auto& s : supports) {
        lvggm::Atom a;
        a.support = s;
        a.u = Eigen::VectorXd::Zero(p);
        for (int i : s) a.u[i] = 1.0 / std::sqrt(double(s.size()));
        a.c = 1.0;
        l.add(a);
    }
    return l;
}

} // namespace

TEST_CASE("support metrics basics") {
    std::mt19937_64 rng(3);
    const SymmetricMatrix s(testutil::random_sym(6, rng));
    const SupportMetrics perfect = lvggm::support_metrics(s, s, 0.0);
    CHECK(perfect.f1 == doctest::Approx(1.0));

    const SupportMetrics empty = lvggm::support_metrics(SymmetricMatrix(6), s, 0.0);
    CHECK(empty.recall == 0.0);
    CHECK(empty.f1 == 0.0);
}

TEST_CASE("support metrics arithmetic: 8 of 10 recovered plus 2 spurious") {
    const int p = 10;
    Eigen::MatrixXd truth = Eigen::MatrixXd::Zero(p, p);
    const std::vector<std::pair<int, int>> true_edges = {
        {0, 1}, {0, 2}, {1, 3}, {2, 4}, {3, 5}, {4, 6}, {5, 7}, {6, 8}, {7, 9}, {8, 9}};
    for (auto [i, j] : true_edges) truth(i, j) = truth(j, i) = 1.0;

    Eigen::MatrixXd est = truth;
    // miss two true edges
    est(7, 9) = est(9, 7) = 0.0;
    est(8, 9) = est(9, 8) = 0.0;
    // add two spurious ones
    est(0, 9) = est(9, 0) = 1.0;
    est(1, 2) = est(2, 1) = 1.0;

    const SupportMetrics m =
        lvggm::support_metrics(SymmetricMatrix(est), SymmetricMatrix(truth), 0.5);
    CHECK(m.precision == doctest::Approx(0.8));
    CHECK(m.recall == doctest::Approx(0.8));
    CHECK(m.f1 == doctest::Approx(0.8));
}

TEST_CASE("recall is non-increasing in the threshold") {
    // thresholds stay below the truth entries, so the true edge set is fixed
    // over the sweep
    std::mt19937_64 rng(5);
    const SymmetricMatrix a(testutil::random_sym(8, rng));
    Eigen::MatrixXd truth = Eigen::MatrixXd::Zero(8, 8);
    truth(0, 1) = truth(1, 0) = 2.0;
    truth(2, 5) = truth(5, 2) = -3.0;
    truth(4, 6) = truth(6, 4) = 2.5;
    const SymmetricMatrix b(truth);
    double prev = 1.0;
    for (double t : {0.0, 0.2, 0.5, 1.0, 1.9}) {
        const SupportMetrics m = lvggm::support_metrics(a, b, t);
        CHECK(m.recall <= prev + 1e-15);
        prev = m.recall;
    }
}

TEST_CASE("precision is non-decreasing in the threshold when signal dominates noise") {
    // spurious entries are smaller than true ones, the regime the sweep is
    // meant for; the general statement fails on adversarial pairs
    const int p = 8;
    Eigen::MatrixXd truth = Eigen::MatrixXd::Zero(p, p);
    truth(0, 1) = truth(1, 0) = 1.0;
    truth(2, 3) = truth(3, 2) = 1.0;
    truth(4, 5) = truth(5, 4) = 1.0;
    Eigen::MatrixXd est = truth;
    est(0, 7) = est(7, 0) = 0.3;
    est(2, 6) = est(6, 2) = 0.2;

    double prev = 0.0;
    for (double t : {0.0, 0.1, 0.25, 0.5, 0.9}) {
        const SupportMetrics m =
            lvggm::support_metrics(SymmetricMatrix(est), SymmetricMatrix(truth), t);
        CHECK(m.precision >= prev - 1e-15);
        prev = m.precision;
    }
}

TEST_CASE("atom matching: exact, disjoint, and partial overlap") {
    const int p = 45;
    const std::vector<std::vector<int>> groups = {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}};

    SUBCASE("exact supports give all ones") {
        const AtomicPSD l = atoms_with_supports(p, groups);
        const auto matches = lvggm::match_atoms(l, groups);
        int matched = 0;
        for (const auto& m : matches)
            if (m.atom >= 0 && m.group >= 0) {
                CHECK(m.jaccard == doctest::Approx(1.0));
                ++matched;
            }
        CHECK(matched == 3);
    }

    SUBCASE("disjoint atom stays unmatched at zero score") {
        const AtomicPSD l = atoms_with_supports(p, {{40, 41, 42}});
        const auto matches = lvggm::match_atoms(l, groups);
        for (const auto& m : matches)
            if (m.atom == 0 && m.group >= 0) CHECK(m.jaccard == 0.0);
    }

    SUBCASE("overlap of 10 out of 15 vs 15 scores one half") {
        std::vector<int> g(15), a(15);
        std::iota(g.begin(), g.end(), 0);
        std::iota(a.begin(), a.end(), 5); // shares 5..14, ten indices
        const AtomicPSD l = atoms_with_supports(p, {a});
        const auto matches = lvggm::match_atoms(l, {g});
        REQUIRE(!matches.empty());
        CHECK(matches[0].jaccard == doctest::Approx(0.5));
    }
}

TEST_CASE("atom matching is permutation invariant") {
    std::mt19937_64 rng(11);
    const int p = 20;
    const std::vector<std::vector<int>> groups = {{0, 1, 2, 3}, {4, 5, 6}, {10, 11}};
    const AtomicPSD l = atoms_with_supports(p, {{0, 1, 2}, {4, 5, 6, 7}, {10, 11, 12}});
    auto scores_of = [&](const AtomicPSD& atoms, const std::vector<std::vector<int>>& grps) {
        std::vector<double> scores;
        for (const auto& m : lvggm::match_atoms(atoms, grps))
            if (m.atom >= 0 && m.group >= 0) scores.push_back(m.jaccard);
        std::sort(scores.begin(), scores.end());
        return scores;
    };
    const auto base = scores_of(l, groups);
    const AtomicPSD shuffled = atoms_with_supports(p, {{10, 11, 12}, {0, 1, 2}, {4, 5, 6, 7}});
    std::vector<std::vector<int>> groups_shuffled = {{4, 5, 6}, {10, 11}, {0, 1, 2, 3}};
    CHECK(scores_of(shuffled, groups_shuffled) == base);
}

TEST_CASE("reconstruction embeds the estimate") {
    SUBCASE("empty L returns S itself") {
        std::mt19937_64 rng(13);
        const SymmetricMatrix s(testutil::random_sym(5, rng));
        const SymmetricMatrix full = lvggm::reconstruct_complete(s, AtomicPSD(5));
        CHECK(full.dim() == 5);
        CHECK((full.mat() - s.mat()).cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("single atom becomes a scaled latent column") {
        const int p = 4;
        AtomicPSD l(p);
        lvggm::Atom a;
        a.support = {0};
        a.u = Eigen::VectorXd::Zero(p);
        a.u[0] = 1.0;
        a.c = 4.0;
        l.add(a);
        const SymmetricMatrix full = lvggm::reconstruct_complete(SymmetricMatrix(p), l);
        REQUIRE(full.dim() == 5);
        CHECK(full(0, 0) == 1.0);            // latent block is the identity
        CHECK(full(1, 0) == doctest::Approx(2.0)); // sqrt(4) * e_1
        CHECK(full(2, 0) == 0.0);
    }
}

TEST_CASE("reconstruction round-trips the ground truth up to sign and scale") {
    lvggm::ModelSpec spec;
    spec.kind = lvggm::ModelKind::Tree3Groups;
    spec.seed = 77;
    const lvggm::GroundTruthModel model = lvggm::gen_model(spec);
    const auto blocks = lvggm::truth_blocks(model);
    AtomicPSD l(model.p(), blocks);

    const SymmetricMatrix full = lvggm::reconstruct_complete(lvggm::truth_S(model), l);
    const int r = l.size();
    REQUIRE(r == model.h());

    // each reconstructed latent column is proportional to a true K_OH column
    for (int g = 0; g < r; ++g) {
        Eigen::VectorXd rec(model.p());
        for (int row = 0; row < model.p(); ++row) rec[row] = full(r + row, g);
        Eigen::VectorXd truth(model.p());
        for (int row = 0; row < model.p(); ++row)
            truth[row] = model.K_full(model.observed[size_t(row)], model.hidden[size_t(g)]);
        const double cos = rec.dot(truth) / (rec.norm() * truth.norm());
        CHECK(std::abs(std::abs(cos) - 1.0) <= 1e-10);
    }
}

TEST_CASE("re-marginalizing the reconstruction recovers S minus L") {
    std::mt19937_64 rng(17);
    const int p = 12;
    const SymmetricMatrix s(testutil::random_sym(p, rng));
    const AtomicPSD l = testutil::random_atoms(p, 4, 3, rng);
    const SymmetricMatrix full = lvggm::reconstruct_complete(s, l);

    std::vector<int> observed;
    for (int i = 0; i < p; ++i) observed.push_back(l.size() + i);
    const SymmetricMatrix marg = lvggm::marginal_precision(full, observed);
    const Eigen::MatrixXd expect = s.mat() - l.materialize().mat();
    CHECK((marg.mat() - expect).cwiseAbs().maxCoeff() <= 1e-10);
}
