#include "lvggm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lvggm {

void SolverConfig::validate(int dim) const {
    require(lambda >= 0.0, ErrorKind::Invalid, "lambda must be nonnegative");
    require(gamma >= 0.0, ErrorKind::Invalid, "gamma must be nonnegative");
    require(is_quadratic(loss_kind), ErrorKind::Invalid, "solver losses must be quadratic");
    require(outer_iters >= 1 && ista_steps_per_outer >= 1, ErrorKind::Invalid,
            "iteration counts must be positive");
    require(fw_tol >= 0.0 && corrective_tol >= 0.0, ErrorKind::Invalid,
            "tolerances must be nonnegative");
    require(max_atoms >= 1, ErrorKind::Invalid, "max_atoms must be positive");
    gauge.validate(dim);
}

double soft_threshold(double x, double t) {
    if (x > t) return x - t;
    if (x < -t) return x + t;
    return 0.0;
}

namespace {

Eigen::MatrixXd soft_threshold(const Eigen::MatrixXd& m, double t) {
    return ((m.array().abs() - t).max(0.0) * m.array().sign()).matrix();
}

// Rewrites groups of atoms sharing a support as the eigendecomposition of
// their summed block. The materialized matrix is unchanged and the gauge
// value cannot increase (the coefficient sum is the block trace), but the
// representation becomes canonical: one atom per retained eigenvalue.
void consolidate_same_support(AtomicPSD& l, double tol) {
    std::vector<Atom> rebuilt;
    std::vector<char> used(static_cast<size_t>(l.size()), 0);
    for (int i = 0; i < l.size(); ++i) {
        if (used[size_t(i)]) continue;
        std::vector<int> group{i};
        for (int j = i + 1; j < l.size(); ++j)
            if (!used[size_t(j)] && l.atom(j).support == l.atom(i).support) group.push_back(j);
        for (int j : group) used[size_t(j)] = 1;
        if (group.size() == 1) {
            rebuilt.push_back(l.atom(i));
            continue;
        }
        const std::vector<int>& supp = l.atom(i).support;
        const int k = static_cast<int>(supp.size());
        Eigen::MatrixXd block = Eigen::MatrixXd::Zero(k, k);
        for (int j : group) {
            const Atom& a = l.atom(j);
            Eigen::VectorXd ub(k);
            for (int t = 0; t < k; ++t) ub[t] = a.u[supp[size_t(t)]];
            block.noalias() += a.c * (ub * ub.transpose());
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block);
        for (int t = k - 1; t >= 0; --t) {
            const double val = es.eigenvalues()[t];
            if (val <= tol) break;
            Atom a;
            a.u = Eigen::VectorXd::Zero(l.dim());
            for (int s = 0; s < k; ++s) {
                if (es.eigenvectors()(s, t) != 0.0) {
                    a.u[supp[size_t(s)]] = es.eigenvectors()(s, t);
                    a.support.push_back(supp[size_t(s)]);
                }
            }
            a.c = val;
            rebuilt.push_back(std::move(a));
        }
    }
    l = AtomicPSD(l.dim(), std::move(rebuilt));
}

class AlternatingSolver {
public:
    AlternatingSolver(const QuadraticLoss& loss, const SolverConfig& cfg)
        : loss_(loss), cfg_(cfg), dim_(loss.dim()) {
        cfg_.validate(dim_);
        eta_ = 1.0 / loss_.lipschitz();
    }

    void warm_start(const SymmetricMatrix& s, const AtomicPSD& l) {
        require(s.dim() == dim_ && l.dim() == dim_, ErrorKind::Dimension,
                "warm start has wrong dimension");
        S_ = s.mat();
        L_ = l;
    }

    void ista_S() {
        const Eigen::MatrixXd& Lmat = L_.materialize().mat();
        const double thresh = eta_ * cfg_.lambda * cfg_.gamma;
        for (int step = 0; step < cfg_.ista_steps_per_outer; ++step) {
            const Eigen::MatrixXd g = loss_.grad(S_ - Lmat);
            S_ = soft_threshold(S_ - eta_ * g, thresh);
        }
    }

    void fcg_L() {
        Eigen::MatrixXd M = S_ - L_.materialize().mat();
        // Re-equilibrate the existing active set first: S and lambda have
        // changed since the coefficients were last optimal.
        if (!L_.empty()) {
            fully_corrective(M);
            L_.drop_small(cfg_.corrective_tol);
            consolidate_same_support(L_, cfg_.corrective_tol);
            M = S_ - L_.materialize().mat();
        }
        double prev_obj = l_objective(M);
        while (true) {
            const Eigen::MatrixXd grad = loss_.grad(M);
            const PolarResult lmo = query_lmo(SymmetricMatrix(grad));
            if (lmo.value <= cfg_.lambda * (1.0 + cfg_.fw_tol) || !lmo.u.has_value()) break;
            if (L_.size() >= cfg_.max_atoms) break;

            if (!try_merge(*lmo.u, *lmo.support)) {
                Atom a;
                a.support = *lmo.support;
                a.u = *lmo.u;
                a.c = 0.0;
                L_.add(std::move(a));
            }
            fully_corrective(M);
            L_.drop_small(cfg_.corrective_tol);
            consolidate_same_support(L_, cfg_.corrective_tol);
            M = S_ - L_.materialize().mat();

            // The LMO is a heuristic; stop once an accepted direction no
            // longer decreases the L-subproblem objective.
            const double obj = l_objective(M);
            if (obj >= prev_obj - 1e-13 * (1.0 + std::abs(prev_obj))) break;
            prev_obj = obj;
        }
        if (cfg_.refine_supports) refine_supports(M);
    }

    // Working-set refinement of the corrective step: atoms that entered on a
    // stale gradient can sit on a slightly wrong support. Re-query the LMO
    // with each atom's mass returned to the residual and keep the swap only
    // if the subproblem objective improves.
    void refine_supports(Eigen::MatrixXd& M) {
        constexpr int kPasses = 2;
        for (int pass = 0; pass < kPasses; ++pass) {
            bool changed = false;
            for (int i = 0; i < L_.size(); ++i) {
                const Atom atom = L_.atom(i);
                if (atom.c <= cfg_.corrective_tol) continue;
                const Eigen::MatrixXd M_without =
                    M + atom.c * (atom.u * atom.u.transpose());
                const PolarResult lmo =
                    query_lmo(SymmetricMatrix(loss_.grad(M_without)));
                if (!lmo.u.has_value() || !lmo.support.has_value()) continue;
                if (*lmo.support == atom.support) continue;

                const double before = l_objective(M);
                const AtomicPSD backup = L_;
                Atom replacement;
                replacement.support = *lmo.support;
                replacement.u = *lmo.u;
                replacement.c = 0.0;
                AtomicPSD updated(L_.dim());
                for (int j = 0; j < L_.size(); ++j)
                    if (j != i) updated.add(L_.atom(j));
                updated.add(std::move(replacement));
                L_ = std::move(updated);
                Eigen::MatrixXd M_new = S_ - L_.materialize().mat();
                fully_corrective(M_new);
                L_.drop_small(cfg_.corrective_tol);
                consolidate_same_support(L_, cfg_.corrective_tol);
                M_new = S_ - L_.materialize().mat();
                if (l_objective(M_new) < before - 1e-13 * (1.0 + std::abs(before))) {
                    M = std::move(M_new);
                    changed = true;
                    break; // indices shifted; restart the sweep
                }
                L_ = backup;
            }
            if (!changed) break;
        }
    }

    Estimate run() {
        Estimate est;
        est.lambda = cfg_.lambda;
        est.gamma = cfg_.gamma;
        est.loss_kind = cfg_.loss_kind;
        if (S_.size() == 0) S_ = Eigen::MatrixXd::Zero(dim_, dim_);
        if (L_.dim() == 0) L_ = AtomicPSD(dim_);

        int flat_streak = 0;
        double prev = std::numeric_limits<double>::infinity();
        for (int t = 0; t < cfg_.outer_iters; ++t) {
            ista_S();
            fcg_L();
            const double obj = objective();
            require(std::isfinite(obj), ErrorKind::Numeric,
                    "objective became non-finite at outer iteration " + std::to_string(t + 1));
            est.objective_trace.push_back(obj);
            ++est.iterations;
            if (std::isfinite(prev)) {
                flat_streak = (prev - obj < 1e-9 * std::max(1.0, std::abs(prev))) ? flat_streak + 1 : 0;
                if (flat_streak >= 3) break;
            }
            prev = obj;
        }
        // Final polish: atoms carrying a negligible share of the trace are
        // leftovers of the finite Frank-Wolfe tolerance, not structure.
        if (!L_.empty()) {
            const double floor = std::max(cfg_.corrective_tol, 1e-5 * L_.coefficient_sum());
            if (L_.drop_small(floor) > 0) {
                Eigen::MatrixXd M = S_ - L_.materialize().mat();
                fully_corrective(M);
                L_.drop_small(cfg_.corrective_tol);
            }
        }
        est.S = SymmetricMatrix(S_);
        est.L = L_;
        return est;
    }

    double objective() const {
        const Eigen::MatrixXd M = S_ - L_.materialize().mat();
        return loss_.value(SymmetricMatrix(M)) +
               cfg_.lambda * (cfg_.gamma * S_.cwiseAbs().sum() + omega_value(L_, cfg_.gauge));
    }

    SymmetricMatrix S() const { return SymmetricMatrix(S_); }
    const AtomicPSD& L() const { return L_; }

private:
    PolarResult query_lmo(const SymmetricMatrix& g) const {
        if (cfg_.gauge.mode == GaugeSpec::Mode::FixedK)
            return polar_tpi(g, cfg_.gauge.k, cfg_.tpi_restarts, cfg_.tpi_max_iter, cfg_.seed);
        return polar_weighted(g, cfg_.gauge.weights, /*exact=*/false, cfg_.tpi_restarts,
                              cfg_.tpi_max_iter, cfg_.seed);
    }

    bool try_merge(const Eigen::VectorXd& u, const std::vector<int>& support) const {
        for (const Atom& a : L_.atoms())
            if (a.support == support && std::abs(a.u.dot(u)) > 1.0 - 1e-8) return true;
        return false;
    }

    double l_objective(const Eigen::MatrixXd& m) const {
        return loss_.value(SymmetricMatrix(m)) + cfg_.lambda * omega_value(L_, cfg_.gauge);
    }

    // Nonnegative cyclic coordinate descent with exact scalar updates on
    // c -> f(S - sum_i c_i u^i u^i^T) + lambda * sum_i w_i c_i.
    // M is kept consistent with the coefficients throughout.
    void fully_corrective(Eigen::MatrixXd& M) {
        const int n = L_.size();
        if (n == 0) return;

        std::vector<double> curvature(static_cast<size_t>(n));
        std::vector<double> weight(static_cast<size_t>(n));
        std::vector<Eigen::VectorXd> aux(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            curvature[size_t(i)] = loss_.rank_one_curvature(L_.atom(i).u);
            weight[size_t(i)] = cfg_.gauge.weight_at(std::max(L_.atom(i).k(), 1));
            aux[size_t(i)] = loss_.alignment_aux(L_.atom(i).u);
        }

        constexpr int kMaxCycles = 1000;
        for (int cycle = 0; cycle < kMaxCycles; ++cycle) {
            double residual = 0.0;
            for (int i = 0; i < n; ++i) {
                const Atom& a = L_.atom(i);
                const double align = loss_.alignment(M, a.u, a.support, aux[size_t(i)]);
                const double slope = cfg_.lambda * weight[size_t(i)] - align;
                const double curv = std::max(curvature[size_t(i)], 1e-18);
                const double c_new = std::max(0.0, a.c - slope / curv);
                if (c_new != a.c) {
                    const double delta = c_new - a.c;
                    for (int r : a.support)
                        for (int col : a.support) M(r, col) -= delta * a.u[r] * a.u[col];
                    L_.set_coefficient(i, c_new);
                }
                const double res = (c_new > 0.0) ? std::abs(slope) : std::max(0.0, -slope);
                residual = std::max(residual, res);
            }
            if (residual <= cfg_.corrective_tol) break;
        }
    }

    QuadraticLoss loss_;
    SolverConfig cfg_;
    int dim_;
    double eta_ = 0.0;
    Eigen::MatrixXd S_;
    AtomicPSD L_;
};

} // namespace

SymmetricMatrix ista_update_S(const SymmetricMatrix& s, const AtomicPSD& l,
                              const SymmetricMatrix& sigma_hat, const SolverConfig& cfg) {
    AlternatingSolver solver(QuadraticLoss::from_kind(cfg.loss_kind, sigma_hat), cfg);
    solver.warm_start(s, l);
    solver.ista_S();
    return solver.S();
}

AtomicPSD fcg_update_L(const SymmetricMatrix& s, const AtomicPSD& l,
                       const SymmetricMatrix& sigma_hat, const SolverConfig& cfg) {
    AlternatingSolver solver(QuadraticLoss::from_kind(cfg.loss_kind, sigma_hat), cfg);
    solver.warm_start(s, l);
    solver.fcg_L();
    return solver.L();
}

namespace detail {

Estimate fit_quadratic(const QuadraticLoss& loss, const SolverConfig& cfg,
                       const SymmetricMatrix* warm_S, const AtomicPSD* warm_L) {
    AlternatingSolver solver(loss, cfg);
    if (warm_S && warm_L) solver.warm_start(*warm_S, *warm_L);
    return solver.run();
}

} // namespace detail

Estimate fit_lvggm(const SymmetricMatrix& sigma_hat, const SolverConfig& cfg) {
    return detail::fit_quadratic(QuadraticLoss::from_kind(cfg.loss_kind, sigma_hat), cfg,
                                 nullptr, nullptr);
}

std::vector<Estimate> fit_path_checkpoints(const SymmetricMatrix& sigma_hat,
                                           const SolverConfig& cfg,
                                           const std::vector<double>& lambdas) {
    require(!lambdas.empty(), ErrorKind::Invalid, "lambda path must be non-empty");
    const QuadraticLoss loss = QuadraticLoss::from_kind(cfg.loss_kind, sigma_hat);
    std::vector<Estimate> out;
    Estimate est;
    bool first = true;
    for (size_t i = 0; i < lambdas.size(); ++i) {
        SolverConfig stage = cfg;
        stage.lambda = lambdas[i];
        stage.refine_supports = cfg.refine_supports && i + 1 == lambdas.size();
        est = first ? detail::fit_quadratic(loss, stage, nullptr, nullptr)
                    : detail::fit_quadratic(loss, stage, &est.S, &est.L);
        first = false;
        out.push_back(est);
    }
    return out;
}

Estimate fit_path(const SymmetricMatrix& sigma_hat, const SolverConfig& cfg,
                  const std::vector<double>& lambdas) {
    auto checkpoints = fit_path_checkpoints(sigma_hat, cfg, lambdas);
    int total_iters = 0;
    for (const Estimate& e : checkpoints) total_iters += e.iterations;
    Estimate est = std::move(checkpoints.back());
    est.iterations = total_iters;
    return est;
}

Estimate fit_decomposition(const SymmetricMatrix& target, const SolverConfig& cfg) {
    const QuadraticLoss loss = QuadraticLoss::frobenius(target);
    // Geometric continuation from a data-scaled lambda down to the requested
    // one; each stage is warm-started so only O(1) alternations are needed
    // per stage.
    std::vector<double> lambdas;
    const double scale = std::max(target.max_abs(), 1e-12);
    double lam0 = 0.25 * scale / std::max(cfg.gamma, 1.0);
    for (double lam = lam0; lam > cfg.lambda; lam *= 0.5) lambdas.push_back(lam);
    lambdas.push_back(cfg.lambda);

    Estimate est;
    bool first = true;
    int total_iters = 0;
    for (size_t i = 0; i < lambdas.size(); ++i) {
        SolverConfig stage = cfg;
        stage.lambda = lambdas[i];
        stage.refine_supports = cfg.refine_supports && i + 1 == lambdas.size();
        est = first ? detail::fit_quadratic(loss, stage, nullptr, nullptr)
                    : detail::fit_quadratic(loss, stage, &est.S, &est.L);
        first = false;
        total_iters += est.iterations;
    }
    est.iterations = total_iters;
    return est;
}

SymmetricMatrix psd_trace_prox(const SymmetricMatrix& m, double t) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.mat());
    Eigen::VectorXd vals = es.eigenvalues();
    for (int i = 0; i < vals.size(); ++i) vals[i] = std::max(vals[i] - t, 0.0);
    return SymmetricMatrix(es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().transpose());
}

std::pair<SymmetricMatrix, SymmetricMatrix> fit_baseline(const SymmetricMatrix& sigma_hat,
                                                         double lambda, double gamma,
                                                         LossKind loss_kind, int iters) {
    require(iters >= 1, ErrorKind::Invalid, "iteration count must be positive");
    const QuadraticLoss loss = QuadraticLoss::from_kind(loss_kind, sigma_hat);
    const int p = sigma_hat.dim();
    const double eta = 1.0 / loss.lipschitz();
    constexpr int kInnerSteps = 10;

    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(p, p);
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(p, p);
    for (int t = 0; t < iters; ++t) {
        for (int step = 0; step < kInnerSteps; ++step)
            S = soft_threshold(S - eta * loss.grad(S - L), eta * lambda * gamma);
        for (int step = 0; step < kInnerSteps; ++step) {
            // gradient in L of f(S - L) is -grad_f(M)
            const Eigen::MatrixXd Lhalf = L + eta * loss.grad(S - L);
            L = psd_trace_prox(SymmetricMatrix(Lhalf), eta * lambda).mat();
        }
    }
    return {SymmetricMatrix(S), SymmetricMatrix(L)};
}

} // namespace lvggm
