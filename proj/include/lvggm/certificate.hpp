#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lvggm/atoms.hpp"
#include "lvggm/matrix.hpp"

namespace lvggm {

/// Support data of a decomposition truth (S*, L*): the symmetric support of
/// S* and the rank-one blocks (I_i, u^i) of L*. Blocks must be pairwise
/// disjoint with a common size k.
struct TangentSpec {
    int dim = 0;
    std::vector<std::pair<int, int>> supp_S; // both (i,j) and (j,i) present
    std::vector<Atom> blocks;                // coefficients ignored

    static TangentSpec from(const SymmetricMatrix& s_star, const std::vector<Atom>& blocks,
                            double support_tol = 0.0);
    void validate() const;
    int block_size() const;
};

/// Entrywise mask of M onto the support of S* (the projector onto T_0).
SymmetricMatrix project_T0(const SymmetricMatrix& m, const TangentSpec& spec);

/// Projector onto T_i: restrict to I x I, apply P_u(X) = X - (I-uu^T)X(I-uu^T),
/// embed back with zeros elsewhere.
SymmetricMatrix project_Ti(const SymmetricMatrix& m, const Eigen::VectorXd& u,
                           const std::vector<int>& block);

/// The complement within the block: (I-uu^T) M_II (I-uu^T), embedded.
SymmetricMatrix project_Ti_complement(const SymmetricMatrix& m, const Eigen::VectorXd& u,
                                      const std::vector<int>& block);

/// Which decomposition convention the certified truth uses. The subgradient
/// conditions are stated for M = S + L; a truth written as M = S - L is
/// certified by negating S.
enum class Orientation { SumSL, DifferenceSL };

struct CertificateReport {
    SymmetricMatrix Q;
    double gamma = 0.0;
    int k = 0;
    Orientation orientation = Orientation::SumSL;
    double s1_residual = 0.0;            // max |P_T0(Q) - gamma sign(S*)|
    double s2_margin = 0.0;              // gamma - ||P_T0c(Q)||_inf
    std::vector<double> l1_residuals;    // per block, max |P_Ti(Q) - u u^T|
    std::vector<double> l2_margins;      // per block, 1 - lambda+max(P_Tic(Q))
    double l3_margin = 0.0;              // 1 - max over J not a block
    bool l3_exhaustive = false;
    double eq12_residual = 0.0;          // linear-system back-substitution
    bool pass = false;

    std::string to_json() const;
};

struct CertificateOptions {
    int tpi_restarts = 50;
    std::uint64_t seed = 0;
    int l3_samples = 10000;
};

/// Builds the dual Q from the per-block linear systems and evaluates the five
/// optimality-condition margins. `s_star` is the sparse part in the stated
/// orientation.
CertificateReport build_dual(const SymmetricMatrix& s_star, const std::vector<Atom>& blocks,
                             double gamma, int k, Orientation orientation = Orientation::SumSL,
                             const CertificateOptions& opts = {});

enum class TheoremMode { Theorem1, Theorem2 };

/// Key constants of the identifiability statements. In Theorem1 mode the
/// denominators use the ambient dimension (single full-support block); in
/// Theorem2 mode they use the common block size k.
struct TheoremConstants {
    int k0 = 0;
    double tau_bar = 0.0;
    double tau_under = 0.0;
    double alpha = 0.0;
    double mu = 0.0;             // 1/(1-3 alpha) when alpha < 1/3
    bool has_interval = false;   // Theorem1 mode
    double gamma_lo = 0.0;
    double gamma_hi = 0.0;
    double gamma_thm2 = 0.0;     // Theorem2 mode
    double r_bound = 0.0;        // 2 mu tau_bar k0 / k
    bool c182_ok = false;        // k > 182 k0
    std::string diagnostic;
};

TheoremConstants theorem_constants(const SymmetricMatrix& s_star, const std::vector<Atom>& blocks,
                                   TheoremMode mode);
/// Pure arithmetic used by the above: d is the mode-dependent denominator
/// (ambient p for Theorem1, block size k for Theorem2).
TheoremConstants theorem_constants_from(int k0, double tau_bar, double tau_under, int d,
                                        TheoremMode mode);

/// Analytic incoherence bounds: zeta_{i->0} <= sqrt(2 tau/k),
/// zeta'_{0->i} <= 2 k0 sqrt(k0 tau/k), zeta_{0->i} <= k0.
struct ZetaBounds {
    double i_to_0 = 0.0;
    double prime_0_to_i = 0.0;
    double zero_to_i = 0.0;
};

ZetaBounds zeta_bounds(const SymmetricMatrix& s_star, const std::vector<Atom>& blocks);

/// A synthetic truth in the regime of the multi-block identifiability
/// statement: disjoint equal-size blocks with near-flat unit factors and a
/// sparse S* with max row degree k0.
struct InstanceParams {
    int p = 40;
    int k = 10;
    int r = 2;
    int k0 = 1;
    double tau_target = 1.25;  // cap on k * max_j u_j^2
    double gamma = 0.0;        // 0 picks 2/k
    std::uint64_t seed = 0;
};

struct Instance {
    SymmetricMatrix S_star;       // sum orientation: M = S* + L*
    std::vector<Atom> blocks;     // coefficients set (the L* weights)
    double gamma = 0.0;
    int k = 0;

    SymmetricMatrix L_star() const;
    /// M = S* + L* (sum orientation) or S*_solver - L* after mapping.
    SymmetricMatrix M(Orientation o) const;
};

Instance make_identifiable_instance(const InstanceParams& params);

} // namespace lvggm
