#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "lvggm/errors.hpp"
#include "lvggm/matrix.hpp"

namespace lvggm {

/// One term c * u u^T of an atomic decomposition: a sorted support set I,
/// a unit vector u with Supp(u) inside I, and a nonnegative coefficient.
struct Atom {
    std::vector<int> support;  // sorted, 0-based
    Eigen::VectorXd u;         // length p, zero outside support
    double c = 0.0;

    int k() const { return static_cast<int>(support.size()); }

    /// Normalizes the invariants that can be normalized (sorts the support,
    /// zeroes entries outside it after checking they are negligible) and
    /// rejects the rest.
    void validate(int dim);
};

/// L = sum_i c_i u^i (u^i)^T with every atom PSD rank one.
class AtomicPSD {
public:
    AtomicPSD() = default;
    explicit AtomicPSD(int dim) : dim_(dim) {}
    AtomicPSD(int dim, std::vector<Atom> atoms);

    int dim() const { return dim_; }
    bool empty() const { return atoms_.empty(); }
    int size() const { return static_cast<int>(atoms_.size()); }
    const std::vector<Atom>& atoms() const { return atoms_; }
    const Atom& atom(int i) const { return atoms_[static_cast<size_t>(i)]; }

    void add(Atom a);
    void set_coefficient(int i, double c);
    /// Removes atoms with c <= tol; returns how many were dropped.
    int drop_small(double tol);

    /// Dense sum of the rank-one terms; cached until the atom list changes.
    const SymmetricMatrix& materialize() const;

    /// Sum of coefficients; equals tr(materialize()) since atoms are unit norm.
    double coefficient_sum() const;

private:
    int dim_ = 0;
    std::vector<Atom> atoms_;
    mutable bool cache_valid_ = false;
    mutable SymmetricMatrix cache_;
};

/// JSON document {"dim": p, "atoms": [{"support": [...], "u": [...], "c": x}]}
/// with u stored aligned with the sorted support.
std::string atoms_to_json(const AtomicPSD& l);
AtomicPSD atoms_from_json(const std::string& text);
AtomicPSD load_atoms(const std::string& path);
void save_atoms(const AtomicPSD& l, const std::string& path);

} // namespace lvggm
