#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "lvggm/atoms.hpp"
#include "lvggm/matrix.hpp"

namespace lvggm {

enum class ModelKind {
    Tree3Groups,       // p=45, three disjoint groups of 15 on a random tree
    Tree3GroupsUneven, // p=45, groups of 20/15/10
    TreeOverlap4,      // p=45, four groups of 15 overlapping by 5
    ErdosRenyi,        // p=160, edge prob 0.01, four disjoint groups of 35
};

struct ModelSpec {
    ModelKind kind = ModelKind::Tree3Groups;
    std::uint64_t seed = 0;
    int n_samples = 0;       // 0 picks the default: 50p for trees, 2000 for ER
    double ridge = 1e-3;
    double min_eig = 1e-4;

    int p() const;
    int h() const;
    std::vector<std::vector<int>> groups() const;
    int default_samples() const;
};

/// Complete precision matrix over observed + hidden variables, with the
/// index partition and latent-to-observed group structure.
struct GroundTruthModel {
    SymmetricMatrix K_full;                // (p+h) x (p+h), positive definite
    std::vector<int> observed;             // indices 0..p-1
    std::vector<int> hidden;               // indices p..p+h-1
    std::vector<std::vector<int>> groups;  // observed neighbors per hidden node
    std::uint64_t seed = 0;

    int p() const { return static_cast<int>(observed.size()); }
    int h() const { return static_cast<int>(hidden.size()); }
};

/// Random precision matrix with the pattern of the graph: K = B~ B~^T where
/// B~ is the incidence matrix with standard normal weights on its nonzeros.
SymmetricMatrix sparse_wishart(int n_nodes, const std::vector<std::pair<int, int>>& edges,
                               std::mt19937_64& rng);

/// Builds the complete graph (random tree with max degree <= 5 or an
/// Erdos-Renyi draw on the observed part, one latent node per group wired to
/// exactly its group), draws a sparse-Wishart precision, adds ridge*I, and
/// retries until lambda_min >= min_eig.
GroundTruthModel gen_model(const ModelSpec& spec);

/// Schur complement K_OO - K_OH K_HH^{-1} K_HO.
SymmetricMatrix marginal_precision(const SymmetricMatrix& k_full,
                                   const std::vector<int>& observed);

/// Empirical covariance of n zero-mean Gaussian draws with precision K,
/// restricted to the observed indices.
SymmetricMatrix sample_covariance(const SymmetricMatrix& k_full, const std::vector<int>& observed,
                                  int n, std::mt19937_64& rng);

/// K_OO: the sparse part of the marginal decomposition.
SymmetricMatrix truth_S(const GroundTruthModel& model);

/// The rank-one blocks of K_OH K_HH^{-1} K_HO: per hidden node, support =
/// its group, u = normalized K_Oh column, c = ||K_Oh||^2 / K_hh.
std::vector<Atom> truth_blocks(const GroundTruthModel& model);

/// Structure JSON: {"p":..,"h":..,"seed":..,"observed":[..],"hidden":[..],"groups":[[..],..]}
std::string model_structure_json(const GroundTruthModel& model);
GroundTruthModel load_model(const std::string& k_path, const std::string& structure_path);
void save_model(const GroundTruthModel& model, const std::string& k_path,
                const std::string& structure_path);

} // namespace lvggm
