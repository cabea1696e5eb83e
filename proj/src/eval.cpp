#include "lvggm/eval.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace lvggm {

SupportMetrics support_metrics(const SymmetricMatrix& s_hat, const SymmetricMatrix& s_true,
                               double threshold) {
    require(s_hat.dim() == s_true.dim(), ErrorKind::Dimension,
            "support metrics need matrices of the same dimension");
    SupportMetrics m;
    for (int i = 0; i < s_hat.dim(); ++i) {
        for (int j = i + 1; j < s_hat.dim(); ++j) {
            const bool pred = std::abs(s_hat(i, j)) > threshold;
            const bool truth = std::abs(s_true(i, j)) > threshold;
            m.predicted_edges += pred;
            m.true_edges += truth;
            m.common_edges += pred && truth;
        }
    }
    m.precision = m.predicted_edges > 0 ? double(m.common_edges) / m.predicted_edges
                                        : (m.true_edges == 0 ? 1.0 : 0.0);
    m.recall = m.true_edges > 0 ? double(m.common_edges) / m.true_edges : 1.0;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

namespace {

double jaccard(const std::vector<int>& a, const std::vector<int>& b) {
    std::set<int> sa(a.begin(), a.end());
    int common = 0;
    for (int x : b) common += sa.count(x) > 0;
    const int uni = static_cast<int>(sa.size()) + static_cast<int>(b.size()) - common;
    return uni > 0 ? double(common) / uni : 0.0;
}

} // namespace

std::vector<AtomMatch> match_atoms(const AtomicPSD& estimated,
                                   const std::vector<std::vector<int>>& true_groups) {
    const int na = estimated.size();
    const int ng = static_cast<int>(true_groups.size());
    Eigen::MatrixXd scores(na, ng);
    for (int a = 0; a < na; ++a)
        for (int g = 0; g < ng; ++g)
            scores(a, g) = jaccard(estimated.atom(a).support, true_groups[size_t(g)]);

    std::vector<AtomMatch> out;
    std::vector<char> atom_used(static_cast<size_t>(na), 0), group_used(static_cast<size_t>(ng), 0);
    for (int round = 0; round < std::min(na, ng); ++round) {
        int best_a = -1, best_g = -1;
        double best = -1.0;
        for (int a = 0; a < na; ++a) {
            if (atom_used[size_t(a)]) continue;
            for (int g = 0; g < ng; ++g) {
                if (group_used[size_t(g)]) continue;
                if (scores(a, g) > best) {
                    best = scores(a, g);
                    best_a = a;
                    best_g = g;
                }
            }
        }
        atom_used[size_t(best_a)] = 1;
        group_used[size_t(best_g)] = 1;
        out.push_back({best_a, best_g, best});
    }
    for (int a = 0; a < na; ++a)
        if (!atom_used[size_t(a)]) out.push_back({a, -1, 0.0});
    for (int g = 0; g < ng; ++g)
        if (!group_used[size_t(g)]) out.push_back({-1, g, 0.0});
    return out;
}

SymmetricMatrix reconstruct_complete(const SymmetricMatrix& s, const AtomicPSD& l) {
    require(s.dim() == l.dim() || l.size() == 0, ErrorKind::Dimension,
            "estimate parts have mismatched dimensions");
    const int p = s.dim();
    const int r = l.size();
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(r + p, r + p);
    full.topLeftCorner(r, r).setIdentity();
    full.bottomRightCorner(p, p) = s.mat();
    for (int i = 0; i < r; ++i) {
        const Atom& a = l.atom(i);
        const Eigen::VectorXd col = std::sqrt(a.c) * a.u;
        full.block(r, i, p, 1) = col;
        full.block(i, r, 1, p) = col.transpose();
    }
    return SymmetricMatrix(full);
}

} // namespace lvggm
