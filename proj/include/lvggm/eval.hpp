#pragma once

#include <vector>

#include "lvggm/atoms.hpp"
#include "lvggm/matrix.hpp"

namespace lvggm {

struct SupportMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    int true_edges = 0;
    int predicted_edges = 0;
    int common_edges = 0;
};

/// Off-diagonal edge recovery: an unordered pair (i,j) is an edge when
/// |entry| > threshold.
SupportMetrics support_metrics(const SymmetricMatrix& s_hat, const SymmetricMatrix& s_true,
                               double threshold);

struct AtomMatch {
    int atom = -1;   // index into the estimate, -1 if the group is unmatched
    int group = -1;  // index into the true groups, -1 if the atom is unmatched
    double jaccard = 0.0;
};

/// Greedy maximum-Jaccard assignment between estimated atom supports and the
/// true groups; returns one entry per matched pair plus an entry per
/// unmatched atom or group.
std::vector<AtomMatch> match_atoms(const AtomicPSD& estimated,
                                   const std::vector<std::vector<int>>& true_groups);

/// Assembles the complete (r+p) x (r+p) concentration structure
/// [[I_r, B^T], [B, S]] with latent column i equal to sqrt(c_i) u^i; the
/// latent block is normalized to the identity, so each column carries the
/// usual per-column sign and scale ambiguity.
SymmetricMatrix reconstruct_complete(const SymmetricMatrix& s, const AtomicPSD& l);

} // namespace lvggm
