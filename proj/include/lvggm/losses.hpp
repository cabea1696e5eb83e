#pragma once

#include <vector>

#include "lvggm/matrix.hpp"

namespace lvggm {

/// The three losses of the estimation problem. Only the two quadratic ones
/// (Taylor, ScoreMatching) are valid optimization targets; the negative
/// log-likelihood is evaluated for reporting.
enum class LossKind {
    NegLogLik,
    Taylor,
    ScoreMatching,
};

bool is_quadratic(LossKind kind);

/// f_ML(M) = -log det(M) + tr(M Sigma), f_T(M) = 0.5 ||S^(1/2) M S^(1/2) - I||_F^2,
/// f_SM(M) = 0.5 tr(M^2 Sigma) - tr(M).
double loss_value(LossKind kind, const SymmetricMatrix& m, const SymmetricMatrix& sigma_hat);

/// Gradient of the loss at M; symmetric. NegLogLik (Sigma - M^{-1}) is
/// provided for reporting only.
SymmetricMatrix loss_grad(LossKind kind, const SymmetricMatrix& m,
                          const SymmetricMatrix& sigma_hat);

/// Lipschitz constant of the gradient over symmetric matrices:
/// lambda_max(Sigma) for ScoreMatching, lambda_max(Sigma)^2 for Taylor.
double lipschitz_const(LossKind kind, const SymmetricMatrix& sigma_hat);

/// Quadratic data-fit term used by the solver: one of the two quadratic
/// losses above, or a Frobenius distance 0.5||M - target||_F^2 (the
/// decomposition-oracle objective). `scale` multiplies the whole term.
class QuadraticLoss {
public:
    static QuadraticLoss taylor(SymmetricMatrix sigma_hat, double scale = 1.0);
    static QuadraticLoss score_matching(SymmetricMatrix sigma_hat, double scale = 1.0);
    static QuadraticLoss frobenius(SymmetricMatrix target, double scale = 1.0);
    static QuadraticLoss from_kind(LossKind kind, SymmetricMatrix sigma_hat, double scale = 1.0);

    double value(const SymmetricMatrix& m) const;
    Eigen::MatrixXd grad(const Eigen::MatrixXd& m) const;
    double lipschitz() const { return lipschitz_; }
    /// Curvature <uu^T, Hessian[uu^T]> along a unit rank-one direction.
    double rank_one_curvature(const Eigen::VectorXd& u) const;
    int dim() const { return data_.dim(); }

    /// Precomputed per-direction vector for alignment(); depends on u and the
    /// data only, not on M.
    Eigen::VectorXd alignment_aux(const Eigen::VectorXd& u) const;
    /// u^T grad(M) u without forming the gradient; `support` is Supp(u) and
    /// `aux` must come from alignment_aux(u).
    double alignment(const Eigen::MatrixXd& m, const Eigen::VectorXd& u,
                     const std::vector<int>& support, const Eigen::VectorXd& aux) const;

private:
    enum class Mode { Taylor, ScoreMatching, Frobenius };
    QuadraticLoss(Mode mode, SymmetricMatrix data, double scale);

    Mode mode_;
    SymmetricMatrix data_;  // Sigma-hat, or the Frobenius target
    double scale_;
    double lipschitz_;
};

} // namespace lvggm
