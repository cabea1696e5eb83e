#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lvggm/atoms.hpp"
#include "lvggm/matrix.hpp"

namespace lvggm {

/// Sparsity prior on the rank-one factors: a single budget k per atom, or a
/// positive non-decreasing per-level weight vector w_1..w_p.
struct GaugeSpec {
    enum class Mode { FixedK, Weighted };
    Mode mode = Mode::FixedK;
    int k = 0;                   // FixedK budget
    std::vector<double> weights; // Weighted: weights[j] is w_{j+1}

    static GaugeSpec fixed_k(int k);
    static GaugeSpec weighted(std::vector<double> w);
    /// w_k = sqrt(k), the weighting used in the overlapping-groups experiment.
    static GaugeSpec weighted_sqrt(int p);

    void validate(int dim) const;
    double weight_at(int level) const;
};

/// Result of a polar-gauge query: the best value, the attaining unit vector
/// and support when the value is positive, and the sparsity level it was
/// found at (equal to k for the fixed-budget polar). For fixed-budget
/// queries u^T Y u == value; for weighted queries the value is already
/// divided by the level weight, so u^T Y u == w_level * value.
struct PolarResult {
    double value = 0.0;
    std::optional<Eigen::VectorXd> u; // full-length, unit norm
    std::optional<std::vector<int>> support;
    int sparsity_level = 0;
};

/// Gauge value of the representing decomposition: sum of coefficients
/// (FixedK) or weighted sum (Weighted). Upper-bounds the gauge of the
/// materialized matrix.
double omega_value(const AtomicPSD& l, const GaugeSpec& spec);

/// Number of k-subsets of p elements, saturating at 2^63-1.
std::uint64_t subset_count(int p, int k);

/// Largest positive eigenvalue, zero if all are nonpositive.
double lambda_plus_max(const Eigen::MatrixXd& m);

/// Calls f(idx) for every k-subset of {0..p-1} in lexicographic order until
/// f returns false.
template <typename F>
void for_each_subset(int p, int k, F&& f) {
    std::vector<int> idx(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) idx[size_t(i)] = i;
    while (true) {
        if (!f(const_cast<const std::vector<int>&>(idx))) return;
        int pos = k - 1;
        while (pos >= 0 && idx[size_t(pos)] == p - k + pos) --pos;
        if (pos < 0) return;
        ++idx[size_t(pos)];
        for (int j = pos + 1; j < k; ++j) idx[size_t(j)] = idx[size_t(j - 1)] + 1;
    }
}

/// Budget for exhaustive subset enumeration in the exact polar.
inline constexpr std::uint64_t kPolarEnumBudget = 1000000;

/// Exact polar: max over |I| = k of lambda^+_max(Y_II) by exhaustive
/// enumeration, lexicographically smallest support among maximizers.
/// Throws a capacity error when C(p,k) exceeds the enumeration budget.
PolarResult polar_exact(const SymmetricMatrix& y, int k);

/// Truncated power iteration heuristic for the same quantity; never exceeds
/// the exact polar. Starts from the canonical vectors of the k largest
/// diagonal entries plus `restarts` random starts.
PolarResult polar_tpi(const SymmetricMatrix& y, int k, int restarts = 10, int max_iter = 250,
                      std::uint64_t seed = 0);

/// Polar of the weighted gauge: max over levels k of polar(Y,k)/w_k. Uses
/// the exact polar per level when `exact` is set and the enumeration budget
/// allows, truncated power iteration otherwise.
PolarResult polar_weighted(const SymmetricMatrix& y, const std::vector<double>& w, bool exact,
                           int restarts = 10, int max_iter = 250, std::uint64_t seed = 0);

} // namespace lvggm
