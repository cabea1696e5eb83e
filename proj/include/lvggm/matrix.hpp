#pragma once

#include <Eigen/Dense>
#include <string>

#include "lvggm/errors.hpp"

namespace lvggm {

/// Dense real symmetric matrix. Symmetry is enforced on construction by
/// averaging with the transpose; all entries must be finite.
class SymmetricMatrix {
public:
    SymmetricMatrix() = default;

    explicit SymmetricMatrix(int dim) : m_(Eigen::MatrixXd::Zero(dim, dim)) {
        require(dim >= 0, ErrorKind::Invalid, "matrix dimension must be nonnegative");
    }

    /// Ingest an arbitrary square matrix; stores (M + M^T)/2.
    explicit SymmetricMatrix(const Eigen::MatrixXd& m) {
        require(m.rows() == m.cols(), ErrorKind::Dimension, "matrix must be square");
        m_ = 0.5 * (m + m.transpose());
        require(m_.allFinite(), ErrorKind::Numeric, "matrix has non-finite entries");
    }

    static SymmetricMatrix identity(int dim) {
        SymmetricMatrix s(dim);
        s.m_.setIdentity();
        return s;
    }

    int dim() const { return static_cast<int>(m_.rows()); }
    double operator()(int i, int j) const { return m_(i, j); }
    const Eigen::MatrixXd& mat() const { return m_; }

    /// Symmetric in-place update; the caller guarantees `d` is symmetric.
    void add_symmetric(const Eigen::MatrixXd& d) { m_ += d; }

    void set(int i, int j, double v) {
        m_(i, j) = v;
        m_(j, i) = v;
    }

    double max_abs() const { return m_.size() == 0 ? 0.0 : m_.cwiseAbs().maxCoeff(); }

    Eigen::VectorXd eigenvalues() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m_, Eigen::EigenvaluesOnly);
        return es.eigenvalues();
    }

    double lambda_min() const { return dim() == 0 ? 0.0 : eigenvalues().minCoeff(); }
    double lambda_max() const { return dim() == 0 ? 0.0 : eigenvalues().maxCoeff(); }

private:
    Eigen::MatrixXd m_;
};

/// Text format: first line "p p", then p whitespace-separated rows.
SymmetricMatrix load_matrix(const std::string& path);
void save_matrix(const SymmetricMatrix& m, const std::string& path);

SymmetricMatrix parse_matrix(std::istream& in, const std::string& origin);
void write_matrix(const SymmetricMatrix& m, std::ostream& out);

} // namespace lvggm
