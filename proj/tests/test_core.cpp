#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "helpers.hpp"
#include "lvggm/atoms.hpp"
#include "lvggm/matrix.hpp"

using lvggm::Atom;
using lvggm::AtomicPSD;
using lvggm::SymmetricMatrix;

TEST_CASE("symmetric matrix symmetrizes on ingestion") {
    Eigen::MatrixXd m(2, 2);
    m << 1.0, 3.0, 1.0, 2.0;
    SymmetricMatrix s(m);
    CHECK(s(0, 1) == doctest::Approx(2.0));
    CHECK(s(0, 1) == s(1, 0));
}

TEST_CASE("symmetric matrix rejects bad input") {
    CHECK_THROWS_AS(SymmetricMatrix(Eigen::MatrixXd::Zero(2, 3)), lvggm::Error);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
    m(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(SymmetricMatrix{m}, lvggm::Error);
}

TEST_CASE("materialize: empty atom list is the zero matrix") {
    AtomicPSD l(4);
    CHECK(l.materialize().mat().isZero(0.0));
    CHECK(l.materialize().dim() == 4);
}

TEST_CASE("materialize: single axis atom") {
    AtomicPSD l(2);
    Atom a;
    a.support = {0};
    a.u = Eigen::VectorXd::Zero(2);
    a.u[0] = 1.0;
    a.c = 2.0;
    l.add(a);
    const SymmetricMatrix m = l.materialize();
    CHECK(m(0, 0) == doctest::Approx(2.0));
    CHECK(m(0, 1) == 0.0);
    CHECK(m(1, 1) == 0.0);
}

TEST_CASE("materialize: two axis atoms sum to the identity") {
    AtomicPSD l(2);
    for (int i = 0; i < 2; ++i) {
        Atom a;
        a.support = {i};
        a.u = Eigen::VectorXd::Zero(2);
        a.u[i] = 1.0;
        a.c = 1.0;
        l.add(a);
    }
    CHECK((l.materialize().mat() - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("materialize is linear in coefficients and trace equals coefficient sum") {
    std::mt19937_64 rng(7);
    const int p = 8;
    AtomicPSD l = testutil::random_atoms(p, 3, 5, rng);
    const double a = 1.7;
    AtomicPSD scaled(p);
    for (const Atom& atom : l.atoms()) {
        Atom copy = atom;
        copy.c *= a;
        scaled.add(copy);
    }
    CHECK((scaled.materialize().mat() - a * l.materialize().mat()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(l.materialize().mat().trace() == doctest::Approx(l.coefficient_sum()).epsilon(1e-10));
}

TEST_CASE("materialized sums are positive semidefinite") {
    std::mt19937_64 rng(11);
    AtomicPSD l = testutil::random_atoms(10, 4, 6, rng);
    const auto eig = l.materialize().eigenvalues();
    CHECK(eig.minCoeff() >= -1e-10 * std::max(1.0, eig.maxCoeff()));
}

TEST_CASE("atom validation") {
    Atom a;
    a.support = {0, 1};
    a.u = Eigen::VectorXd::Zero(3);
    a.u[0] = 1.0;
    a.c = 1.0;

    SUBCASE("dimension mismatch") {
        AtomicPSD l(5);
        CHECK_THROWS_AS(l.add(a), lvggm::Error);
    }
    SUBCASE("non-unit vector") {
        Atom b = a;
        b.u[0] = 0.5;
        AtomicPSD l(3);
        CHECK_THROWS_AS(l.add(b), lvggm::Error);
    }
    SUBCASE("mass outside support") {
        Atom b = a;
        b.u[2] = 0.3;
        AtomicPSD l(3);
        CHECK_THROWS_AS(l.add(b), lvggm::Error);
    }
    SUBCASE("negative coefficient") {
        Atom b = a;
        b.c = -1.0;
        AtomicPSD l(3);
        CHECK_THROWS_AS(l.add(b), lvggm::Error);
    }
}

TEST_CASE("drop_small removes zero-coefficient atoms") {
    std::mt19937_64 rng(3);
    AtomicPSD l = testutil::random_atoms(6, 2, 4, rng);
    l.set_coefficient(1, 0.0);
    l.set_coefficient(3, 5e-11);
    CHECK(l.drop_small(1e-10) == 2);
    CHECK(l.size() == 2);
}

TEST_CASE("matrix text round trip is exact") {
    std::mt19937_64 rng(42);
    const SymmetricMatrix m(testutil::random_sym(6, rng));
    std::stringstream ss;
    lvggm::write_matrix(m, ss);
    const SymmetricMatrix back = lvggm::parse_matrix(ss, "roundtrip");
    CHECK((m.mat() - back.mat()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("matrix parse rejects truncated input") {
    std::stringstream ss("3 3\n1 0 0\n0 1 0\n");
    CHECK_THROWS_AS(lvggm::parse_matrix(ss, "bad"), lvggm::Error);
}

TEST_CASE("atom JSON round trip is exact") {
    std::mt19937_64 rng(13);
    AtomicPSD l = testutil::random_atoms(7, 3, 4, rng);
    const AtomicPSD back = lvggm::atoms_from_json(lvggm::atoms_to_json(l));
    REQUIRE(back.size() == l.size());
    CHECK(back.dim() == l.dim());
    for (int i = 0; i < l.size(); ++i) {
        CHECK(back.atom(i).support == l.atom(i).support);
        CHECK((back.atom(i).u - l.atom(i).u).cwiseAbs().maxCoeff() == 0.0);
        CHECK(back.atom(i).c == l.atom(i).c);
    }
}
