#include "lvggm/losses.hpp"

#include <cmath>

namespace lvggm {

bool is_quadratic(LossKind kind) { return kind == LossKind::Taylor || kind == LossKind::ScoreMatching; }

namespace {

void check_dims(const SymmetricMatrix& m, const SymmetricMatrix& sigma_hat) {
    require(m.dim() == sigma_hat.dim(), ErrorKind::Dimension,
            "loss operands have mismatched dimensions");
}

} // namespace

double loss_value(LossKind kind, const SymmetricMatrix& m, const SymmetricMatrix& sigma_hat) {
    check_dims(m, sigma_hat);
    const Eigen::MatrixXd& M = m.mat();
    const Eigen::MatrixXd& S = sigma_hat.mat();
    switch (kind) {
        case LossKind::NegLogLik: {
            Eigen::LLT<Eigen::MatrixXd> llt(M);
            require(llt.info() == Eigen::Success, ErrorKind::Domain,
                    "negative log-likelihood needs a positive definite argument");
            const double logdet =
                2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
            return -logdet + (M * S).trace();
        }
        case LossKind::Taylor: {
            // ||S^(1/2) M S^(1/2) - I||_F^2 = tr(MSMS) - 2 tr(MS) + p
            const Eigen::MatrixXd MS = M * S;
            return 0.5 * ((MS * MS).trace() - 2.0 * MS.trace() + m.dim());
        }
        case LossKind::ScoreMatching:
            return 0.5 * (M * M * S).trace() - M.trace();
    }
    fail(ErrorKind::Invalid, "unknown loss kind");
}

SymmetricMatrix loss_grad(LossKind kind, const SymmetricMatrix& m,
                          const SymmetricMatrix& sigma_hat) {
    check_dims(m, sigma_hat);
    const Eigen::MatrixXd& M = m.mat();
    const Eigen::MatrixXd& S = sigma_hat.mat();
    switch (kind) {
        case LossKind::NegLogLik: {
            Eigen::LLT<Eigen::MatrixXd> llt(M);
            require(llt.info() == Eigen::Success, ErrorKind::Domain,
                    "negative log-likelihood needs a positive definite argument");
            const Eigen::MatrixXd inv =
                llt.solve(Eigen::MatrixXd::Identity(m.dim(), m.dim()));
            return SymmetricMatrix(S - inv);
        }
        case LossKind::Taylor:
            return SymmetricMatrix(S * M * S - S);
        case LossKind::ScoreMatching: {
            const Eigen::MatrixXd MS = M * S;
            return SymmetricMatrix(0.5 * (MS + MS.transpose()) -
                                   Eigen::MatrixXd::Identity(m.dim(), m.dim()));
        }
    }
    fail(ErrorKind::Invalid, "unknown loss kind");
}

double lipschitz_const(LossKind kind, const SymmetricMatrix& sigma_hat) {
    require(is_quadratic(kind), ErrorKind::Domain,
            "Lipschitz constant is defined for the quadratic losses only");
    const double lmax = sigma_hat.lambda_max();
    return kind == LossKind::ScoreMatching ? lmax : lmax * lmax;
}

QuadraticLoss::QuadraticLoss(Mode mode, SymmetricMatrix data, double scale)
    : mode_(mode), data_(std::move(data)), scale_(scale) {
    require(scale > 0.0, ErrorKind::Invalid, "loss scale must be positive");
    switch (mode_) {
        case Mode::Taylor: lipschitz_ = scale_ * lipschitz_const(LossKind::Taylor, data_); break;
        case Mode::ScoreMatching:
            lipschitz_ = scale_ * lipschitz_const(LossKind::ScoreMatching, data_);
            break;
        case Mode::Frobenius: lipschitz_ = scale_; break;
    }
    // A zero curvature direction stalls ISTA; keep the step size finite.
    require(lipschitz_ > 0.0, ErrorKind::Domain, "loss has zero curvature (Sigma-hat is zero?)");
}

QuadraticLoss QuadraticLoss::taylor(SymmetricMatrix s, double scale) {
    return QuadraticLoss(Mode::Taylor, std::move(s), scale);
}
QuadraticLoss QuadraticLoss::score_matching(SymmetricMatrix s, double scale) {
    return QuadraticLoss(Mode::ScoreMatching, std::move(s), scale);
}
QuadraticLoss QuadraticLoss::frobenius(SymmetricMatrix target, double scale) {
    return QuadraticLoss(Mode::Frobenius, std::move(target), scale);
}
QuadraticLoss QuadraticLoss::from_kind(LossKind kind, SymmetricMatrix sigma_hat, double scale) {
    require(is_quadratic(kind), ErrorKind::Domain, "solver losses must be quadratic");
    return kind == LossKind::Taylor ? taylor(std::move(sigma_hat), scale)
                                    : score_matching(std::move(sigma_hat), scale);
}

double QuadraticLoss::value(const SymmetricMatrix& m) const {
    if (mode_ == Mode::Frobenius) {
        check_dims(m, data_);
        return scale_ * 0.5 * (m.mat() - data_.mat()).squaredNorm();
    }
    const LossKind kind = mode_ == Mode::Taylor ? LossKind::Taylor : LossKind::ScoreMatching;
    return scale_ * loss_value(kind, m, data_);
}

Eigen::MatrixXd QuadraticLoss::grad(const Eigen::MatrixXd& m) const {
    require(m.rows() == data_.dim() && m.cols() == data_.dim(), ErrorKind::Dimension,
            "loss operands have mismatched dimensions");
    switch (mode_) {
        case Mode::Frobenius: return scale_ * (m - data_.mat());
        case Mode::Taylor: return scale_ * (data_.mat() * m * data_.mat() - data_.mat());
        case Mode::ScoreMatching: {
            const Eigen::MatrixXd MS = m * data_.mat();
            return scale_ * (0.5 * (MS + MS.transpose()) -
                             Eigen::MatrixXd::Identity(m.rows(), m.cols()));
        }
    }
    fail(ErrorKind::Invalid, "unknown loss mode");
}

double QuadraticLoss::rank_one_curvature(const Eigen::VectorXd& u) const {
    switch (mode_) {
        case Mode::Frobenius: return scale_;
        case Mode::ScoreMatching: return scale_ * u.dot(data_.mat() * u);
        case Mode::Taylor: {
            const double q = u.dot(data_.mat() * u);
            return scale_ * q * q;
        }
    }
    fail(ErrorKind::Invalid, "unknown loss mode");
}

Eigen::VectorXd QuadraticLoss::alignment_aux(const Eigen::VectorXd& u) const {
    // Frobenius: T*u; Taylor and ScoreMatching: Sigma*u.
    return data_.mat() * u;
}

double QuadraticLoss::alignment(const Eigen::MatrixXd& m, const Eigen::VectorXd& u,
                                const std::vector<int>& support,
                                const Eigen::VectorXd& aux) const {
    switch (mode_) {
        case Mode::Frobenius: {
            // u^T (M - T) u over the support of u
            double s = 0.0;
            for (int i : support) {
                double row = 0.0;
                for (int j : support) row += m(i, j) * u[j];
                s += u[i] * (row - aux[i]);
            }
            return scale_ * s;
        }
        case Mode::ScoreMatching: {
            // u^T (0.5(M Sig + Sig M) - I) u = (M u)^T (Sig u) - 1
            double s = 0.0;
            for (int i : support) s += u[i] * m.row(i).dot(aux);
            return scale_ * (s - 1.0);
        }
        case Mode::Taylor: {
            // u^T (Sig M Sig - Sig) u = (Sig u)^T M (Sig u) - u^T Sig u
            double uau = 0.0;
            for (int i : support) uau += u[i] * aux[i];
            return scale_ * (aux.dot(m * aux) - uau);
        }
    }
    fail(ErrorKind::Invalid, "unknown loss mode");
}

} // namespace lvggm
