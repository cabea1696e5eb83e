#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lvggm/atoms.hpp"
#include "lvggm/gauge.hpp"
#include "lvggm/losses.hpp"
#include "lvggm/matrix.hpp"

namespace lvggm {

struct SolverConfig {
    double lambda = 0.1;
    double gamma = 1.0;
    GaugeSpec gauge = GaugeSpec::fixed_k(1);
    LossKind loss_kind = LossKind::ScoreMatching;
    int outer_iters = 50;
    int ista_steps_per_outer = 10;
    double fw_tol = 1e-6;
    double corrective_tol = 1e-10;
    int max_atoms = 16;
    int tpi_restarts = 10;
    int tpi_max_iter = 80;
    // Working-set support refinement after the column-generation loop;
    // lambda sweeps enable it for the final stage only.
    bool refine_supports = true;
    std::uint64_t seed = 0;

    void validate(int dim) const;
};

/// Fitted pair (S, L) with the hyperparameters and per-outer-iteration
/// objective values; the trace is non-increasing.
struct Estimate {
    SymmetricMatrix S;
    AtomicPSD L;
    double lambda = 0.0;
    double gamma = 0.0;
    LossKind loss_kind = LossKind::ScoreMatching;
    std::vector<double> objective_trace;
    int iterations = 0;
};

double soft_threshold(double x, double t);

/// One S-update of the alternating scheme: cfg.ista_steps_per_outer
/// proximal-gradient steps at step size 1/Lipschitz with entrywise
/// soft-threshold at lambda*gamma/Lipschitz.
SymmetricMatrix ista_update_S(const SymmetricMatrix& s, const AtomicPSD& l,
                              const SymmetricMatrix& sigma_hat, const SolverConfig& cfg);

/// One L-update: column generation with the sparse-eigenvalue LMO and a
/// fully corrective nonnegative coordinate-descent reoptimization of the
/// coefficients, until the polar stationarity gap closes or max_atoms.
AtomicPSD fcg_update_L(const SymmetricMatrix& s, const AtomicPSD& l,
                       const SymmetricMatrix& sigma_hat, const SolverConfig& cfg);

/// Full alternating fit of min f(S-L) + lambda*(gamma*||S||_1 + Omega(L))
/// from (S,L) = (0,0).
Estimate fit_lvggm(const SymmetricMatrix& sigma_hat, const SolverConfig& cfg);

/// Decomposition-oracle mode: same problem with f(M) = 0.5||M - target||_F^2.
/// Internally sweeps lambda down to cfg.lambda with warm starts, which is how
/// the exact-recovery regime (lambda -> 0) stays reachable in finitely many
/// alternations.
Estimate fit_decomposition(const SymmetricMatrix& target, const SolverConfig& cfg);

/// Warm-started fit over a decreasing lambda sequence; returns the estimate
/// at the last lambda.
Estimate fit_path(const SymmetricMatrix& sigma_hat, const SolverConfig& cfg,
                  const std::vector<double>& lambdas);

/// Same sweep, returning the estimate at every lambda in the sequence.
std::vector<Estimate> fit_path_checkpoints(const SymmetricMatrix& sigma_hat,
                                           const SolverConfig& cfg,
                                           const std::vector<double>& lambdas);

/// Eigenvalue soft-threshold onto the PSD cone: eigenvalues map to
/// max(sigma - t, 0).
SymmetricMatrix psd_trace_prox(const SymmetricMatrix& m, double t);

/// The l1 + trace-norm baseline: alternating ISTA on S and PSD-projected
/// eigenvalue soft-thresholding on a dense L.
std::pair<SymmetricMatrix, SymmetricMatrix> fit_baseline(const SymmetricMatrix& sigma_hat,
                                                         double lambda, double gamma,
                                                         LossKind loss_kind, int iters);

namespace detail {
/// Shared implementation against an arbitrary quadratic data-fit term.
Estimate fit_quadratic(const QuadraticLoss& loss, const SolverConfig& cfg,
                       const SymmetricMatrix* warm_S, const AtomicPSD* warm_L);
} // namespace detail

} // namespace lvggm
