#pragma once

#include <random>

#include "lvggm/atoms.hpp"
#include "lvggm/matrix.hpp"

namespace testutil {

inline Eigen::MatrixXd random_sym(int p, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, scale);
    Eigen::MatrixXd a(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) a(i, j) = gauss(rng);
    return 0.5 * (a + a.transpose());
}

inline lvggm::SymmetricMatrix random_spd(int p, std::mt19937_64& rng, double ridge = 0.5) {
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd a(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) a(i, j) = gauss(rng);
    Eigen::MatrixXd k = a * a.transpose() / double(p);
    k.diagonal().array() += ridge;
    return lvggm::SymmetricMatrix(k);
}

inline lvggm::Atom random_atom(int p, int k, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif;
    std::vector<int> idx(static_cast<size_t>(p));
    for (int i = 0; i < p; ++i) idx[size_t(i)] = i;
    for (int i = 0; i < k; ++i) {
        std::uniform_int_distribution<int> pick(i, p - 1);
        std::swap(idx[size_t(i)], idx[size_t(pick(rng))]);
    }
    lvggm::Atom a;
    a.support.assign(idx.begin(), idx.begin() + k);
    std::sort(a.support.begin(), a.support.end());
    a.u = Eigen::VectorXd::Zero(p);
    double norm = 0.0;
    while (norm == 0.0) {
        for (int i : a.support) a.u[i] = gauss(rng);
        norm = a.u.norm();
    }
    a.u /= norm;
    a.c = 2.0 * unif(rng);
    return a;
}

inline lvggm::AtomicPSD random_atoms(int p, int k, int count, std::mt19937_64& rng) {
    lvggm::AtomicPSD l(p);
    for (int i = 0; i < count; ++i) l.add(random_atom(p, k, rng));
    return l;
}

} // namespace testutil
