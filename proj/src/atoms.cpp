#include "lvggm/atoms.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace lvggm {

namespace {
constexpr double kUnitNormTol = 1e-12;
constexpr double kOffSupportTol = 1e-14;
} // namespace

void Atom::validate(int dim) {
    require(u.size() == dim, ErrorKind::Dimension, "atom vector length does not match dimension");
    require(c >= 0.0, ErrorKind::Domain, "atom coefficient must be nonnegative");
    std::sort(support.begin(), support.end());
    require(std::adjacent_find(support.begin(), support.end()) == support.end(),
            ErrorKind::Invalid, "atom support has duplicate indices");
    if (!support.empty())
        require(support.front() >= 0 && support.back() < dim, ErrorKind::Invalid,
                "atom support index out of range");
    std::vector<char> in_supp(static_cast<size_t>(dim), 0);
    for (int i : support) in_supp[static_cast<size_t>(i)] = 1;
    for (int j = 0; j < dim; ++j) {
        if (!in_supp[static_cast<size_t>(j)]) {
            require(std::abs(u[j]) <= kOffSupportTol, ErrorKind::Invalid,
                    "atom vector has mass outside its support");
            u[j] = 0.0;
        }
    }
    require(std::abs(u.norm() - 1.0) <= kUnitNormTol, ErrorKind::Domain,
            "atom vector must have unit norm");
}

AtomicPSD::AtomicPSD(int dim, std::vector<Atom> atoms) : dim_(dim) {
    for (auto& a : atoms) add(std::move(a));
}

void AtomicPSD::add(Atom a) {
    a.validate(dim_);
    atoms_.push_back(std::move(a));
    cache_valid_ = false;
}

void AtomicPSD::set_coefficient(int i, double c) {
    require(i >= 0 && i < size(), ErrorKind::Invalid, "atom index out of range");
    require(c >= 0.0, ErrorKind::Domain, "atom coefficient must be nonnegative");
    atoms_[static_cast<size_t>(i)].c = c;
    cache_valid_ = false;
}

int AtomicPSD::drop_small(double tol) {
    const auto before = atoms_.size();
    std::erase_if(atoms_, [tol](const Atom& a) { return a.c <= tol; });
    if (atoms_.size() != before) cache_valid_ = false;
    return static_cast<int>(before - atoms_.size());
}

const SymmetricMatrix& AtomicPSD::materialize() const {
    if (!cache_valid_) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim_, dim_);
        for (const Atom& a : atoms_) m.noalias() += a.c * (a.u * a.u.transpose());
        cache_ = SymmetricMatrix(m);
        cache_valid_ = true;
    }
    return cache_;
}

double AtomicPSD::coefficient_sum() const {
    double s = 0.0;
    for (const Atom& a : atoms_) s += a.c;
    return s;
}

std::string atoms_to_json(const AtomicPSD& l) {
    nlohmann::json doc;
    doc["dim"] = l.dim();
    auto arr = nlohmann::json::array();
    for (const Atom& a : l.atoms()) {
        nlohmann::json j;
        j["support"] = a.support;
        std::vector<double> vals;
        vals.reserve(a.support.size());
        for (int idx : a.support) vals.push_back(a.u[idx]);
        j["u"] = vals;
        j["c"] = a.c;
        arr.push_back(std::move(j));
    }
    doc["atoms"] = std::move(arr);
    return doc.dump(2);
}

AtomicPSD atoms_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        fail(ErrorKind::Io, std::string("atom list is not valid JSON: ") + e.what());
    }
    require(doc.contains("dim") && doc.contains("atoms"), ErrorKind::Io,
            "atom list JSON must have \"dim\" and \"atoms\"");
    const int dim = doc["dim"].get<int>();
    AtomicPSD l(dim);
    for (const auto& j : doc["atoms"]) {
        Atom a;
        a.support = j["support"].get<std::vector<int>>();
        auto vals = j["u"].get<std::vector<double>>();
        require(vals.size() == a.support.size(), ErrorKind::Io,
                "atom JSON: u must align with support");
        a.u = Eigen::VectorXd::Zero(dim);
        for (size_t i = 0; i < vals.size(); ++i) {
            const int idx = a.support[i];
            require(idx >= 0 && idx < dim, ErrorKind::Io, "atom JSON: support index out of range");
            a.u[idx] = vals[i];
        }
        a.c = j["c"].get<double>();
        l.add(std::move(a));
    }
    return l;
}

AtomicPSD load_atoms(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorKind::Io, "cannot open atom file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return atoms_from_json(ss.str());
}

void save_atoms(const AtomicPSD& l, const std::string& path) {
    std::ofstream out(path);
    require(out.good(), ErrorKind::Io, "cannot write atom file: " + path);
    out << atoms_to_json(l) << "\n";
}

} // namespace lvggm
