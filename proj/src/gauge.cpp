#include "lvggm/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace lvggm {

GaugeSpec GaugeSpec::fixed_k(int k) {
    GaugeSpec s;
    s.mode = Mode::FixedK;
    s.k = k;
    return s;
}

GaugeSpec GaugeSpec::weighted(std::vector<double> w) {
    GaugeSpec s;
    s.mode = Mode::Weighted;
    s.weights = std::move(w);
    return s;
}

GaugeSpec GaugeSpec::weighted_sqrt(int p) {
    std::vector<double> w(static_cast<size_t>(p));
    for (int k = 1; k <= p; ++k) w[static_cast<size_t>(k - 1)] = std::sqrt(double(k));
    return weighted(std::move(w));
}

void GaugeSpec::validate(int dim) const {
    if (mode == Mode::FixedK) {
        require(k >= 1 && k <= dim, ErrorKind::Invalid, "gauge budget k must be in [1, p]");
    } else {
        require(static_cast<int>(weights.size()) == dim, ErrorKind::Invalid,
                "weight vector must have one weight per sparsity level");
        double prev = 0.0;
        for (double w : weights) {
            require(w > 0.0 && w >= prev, ErrorKind::Invalid,
                    "weights must be positive and non-decreasing");
            prev = w;
        }
    }
}

double GaugeSpec::weight_at(int level) const {
    if (mode == Mode::FixedK) return 1.0;
    require(level >= 1 && level <= static_cast<int>(weights.size()), ErrorKind::Invalid,
            "sparsity level out of range");
    return weights[static_cast<size_t>(level - 1)];
}

double omega_value(const AtomicPSD& l, const GaugeSpec& spec) {
    spec.validate(l.dim());
    double total = 0.0;
    for (const Atom& a : l.atoms()) {
        if (spec.mode == GaugeSpec::Mode::FixedK)
            require(a.k() <= spec.k, ErrorKind::Domain,
                    "atom support exceeds the gauge sparsity budget");
        total += spec.weight_at(std::max(a.k(), 1)) * a.c;
    }
    return total;
}

std::uint64_t subset_count(int p, int k) {
    if (k < 0 || k > p) return 0;
    k = std::min(k, p - k);
    const std::uint64_t cap = std::numeric_limits<std::int64_t>::max();
    std::uint64_t c = 1;
    for (int i = 1; i <= k; ++i) {
        const double est = double(c) * double(p - k + i) / double(i);
        if (est > double(cap) * 0.5) return cap;
        c = c * std::uint64_t(p - k + i) / std::uint64_t(i);
    }
    return c;
}

namespace {

// Largest positive eigenvalue (zero if all nonpositive) and its eigenvector.
double lambda_plus_max_vec(const Eigen::MatrixXd& m, Eigen::VectorXd* vec) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const int last = static_cast<int>(m.rows()) - 1;
    const double top = es.eigenvalues()[last];
    if (top <= 0.0) return 0.0;
    if (vec) *vec = es.eigenvectors().col(last);
    return top;
}

} // namespace

double lambda_plus_max(const Eigen::MatrixXd& m) { return lambda_plus_max_vec(m, nullptr); }

PolarResult polar_exact(const SymmetricMatrix& y, int k) {
    const int p = y.dim();
    require(k >= 1 && k <= p, ErrorKind::Invalid, "polar budget k must be in [1, p]");
    require(subset_count(p, k) <= kPolarEnumBudget, ErrorKind::Capacity,
            "C(p,k) exceeds the exhaustive enumeration budget; use polar_tpi");

    PolarResult best;
    best.sparsity_level = k;

    Eigen::MatrixXd sub(k, k);
    auto restricted = [&](const std::vector<int>& idx, Eigen::VectorXd* vec) {
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b) sub(a, b) = y(idx[size_t(a)], idx[size_t(b)]);
        return lambda_plus_max_vec(sub, vec);
    };

    double max_val = 0.0;
    for_each_subset(p, k, [&](const std::vector<int>& idx) {
        max_val = std::max(max_val, restricted(idx, nullptr));
        return true;
    });
    best.value = max_val;
    if (max_val <= 0.0) return best;

    // Second pass resolves ties up to eigensolver noise, so the reported
    // support is the lexicographically smallest maximizer.
    const double tie_tol = 1e-12 * (1.0 + max_val);
    Eigen::VectorXd subvec;
    for_each_subset(p, k, [&](const std::vector<int>& idx) {
        if (restricted(idx, &subvec) < max_val - tie_tol) return true;
        best.support = idx;
        Eigen::VectorXd u = Eigen::VectorXd::Zero(p);
        for (int a = 0; a < k; ++a) u[idx[size_t(a)]] = subvec[a];
        best.u = std::move(u);
        return false;
    });
    return best;
}

namespace {

// Keep the k largest-magnitude entries (ties broken toward lower index),
// zero the rest. Returns false if x is entirely zero.
bool truncate_k(Eigen::VectorXd& x, int k) {
    const int p = static_cast<int>(x.size());
    if (k >= p) return x.norm() > 0.0;
    std::vector<int> order(static_cast<size_t>(p));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&x](int a, int b) {
        return std::abs(x[a]) > std::abs(x[b]);
    });
    Eigen::VectorXd out = Eigen::VectorXd::Zero(p);
    for (int i = 0; i < k; ++i) out[order[size_t(i)]] = x[order[size_t(i)]];
    x = std::move(out);
    return x.norm() > 0.0;
}

std::vector<int> support_of(const Eigen::VectorXd& x) {
    std::vector<int> s;
    for (int i = 0; i < x.size(); ++i)
        if (x[i] != 0.0) s.push_back(i);
    return s;
}

// Rayleigh estimate of lambda_max(-Y); positive when Y has a dominant
// negative eigenvalue. Plain power iteration from a fixed start.
double negative_shift_estimate(const Eigen::MatrixXd& y) {
    const int p = static_cast<int>(y.rows());
    Eigen::VectorXd v = Eigen::VectorXd::Ones(p);
    int jmin = 0;
    y.diagonal().minCoeff(&jmin);
    v[jmin] += 1.0;
    v.normalize();
    for (int it = 0; it < 50; ++it) {
        Eigen::VectorXd w = -(y * v);
        const double n = w.norm();
        if (n == 0.0) return 0.0;
        v = w / n;
    }
    return -v.dot(y * v);
}

} // namespace

namespace {

// Exact top positive eigenpair of Y restricted to a k-subset, embedded back.
double restricted_top(const Eigen::MatrixXd& y, const std::vector<int>& idx,
                      Eigen::VectorXd& u_out) {
    const int k = static_cast<int>(idx.size());
    Eigen::MatrixXd sub(k, k);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) sub(a, b) = y(idx[size_t(a)], idx[size_t(b)]);
    Eigen::VectorXd vec;
    const double val = lambda_plus_max_vec(sub, &vec);
    u_out = Eigen::VectorXd::Zero(y.rows());
    if (val > 0.0)
        for (int a = 0; a < k; ++a) u_out[idx[size_t(a)]] = vec[a];
    return val;
}

std::vector<int> padded_support(const Eigen::VectorXd& x, int k, int p) {
    std::vector<int> idx = support_of(x);
    std::vector<char> in(static_cast<size_t>(p), 0);
    for (int i : idx) in[size_t(i)] = 1;
    for (int j = 0; j < p && static_cast<int>(idx.size()) < k; ++j)
        if (!in[size_t(j)]) idx.push_back(j);
    std::sort(idx.begin(), idx.end());
    return idx;
}

} // namespace

PolarResult polar_tpi(const SymmetricMatrix& y, int k, int restarts, int max_iter,
                      std::uint64_t seed) {
    const int p = y.dim();
    require(k >= 1 && k <= p, ErrorKind::Invalid, "polar budget k must be in [1, p]");
    const Eigen::MatrixXd& Y = y.mat();

    // Shift so power iteration targets the most positive eigenvalue even for
    // indefinite Y; the reported value removes the shift exactly.
    const double rho = negative_shift_estimate(Y);
    const double sigma = rho > 0.0 ? 1.1 * rho + 1e-12 : 0.0;
    const Eigen::MatrixXd Ys = Y + sigma * Eigen::MatrixXd::Identity(p, p);

    std::vector<Eigen::VectorXd> starts;
    {
        std::vector<int> order(static_cast<size_t>(p));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&Y](int a, int b) {
            return Y(a, a) > Y(b, b);
        });
        for (int i = 0; i < std::min(k, p); ++i) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(p);
            e[order[size_t(i)]] = 1.0;
            starts.push_back(std::move(e));
        }
        std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
        std::normal_distribution<double> gauss;
        for (int r = 0; r < restarts; ++r) {
            Eigen::VectorXd v(p);
            for (int i = 0; i < p; ++i) v[i] = gauss(rng);
            if (truncate_k(v, k)) {
                v.normalize();
                starts.push_back(std::move(v));
            }
        }
    }

    // Every candidate support is scored by its exact restricted eigenpair, so
    // the reported value is attained and never exceeds the exact polar.
    double best_val = 0.0;
    std::vector<int> best_support;
    Eigen::VectorXd best_u;
    auto consider = [&](const std::vector<int>& idx) {
        Eigen::VectorXd u;
        const double val = restricted_top(Y, idx, u);
        if (val > best_val) {
            best_val = val;
            best_support = idx;
            best_u = std::move(u);
            return true;
        }
        return false;
    };

    for (auto& x : starts) {
        std::vector<int> prev_support = support_of(x);
        for (int it = 0; it < max_iter; ++it) {
            Eigen::VectorXd next = Ys * x;
            if (!truncate_k(next, k)) break;
            next.normalize();
            x = std::move(next);
            auto supp = support_of(x);
            if (supp == prev_support) break;
            prev_support = std::move(supp);
        }
        if (x.norm() > 0.0) consider(padded_support(x, k, p));
    }

    // Greedy one-swap refinement of the winner, with exchange candidates
    // filtered by |Y u| to keep the cost bounded.
    if (best_val > 0.0) {
        constexpr int kRefinePasses = 10;
        constexpr int kOutCandidates = 8;
        for (int pass = 0; pass < kRefinePasses; ++pass) {
            const Eigen::VectorXd score = (Y * best_u).cwiseAbs();
            std::vector<char> in(static_cast<size_t>(p), 0);
            for (int i : best_support) in[size_t(i)] = 1;
            std::vector<int> outside;
            for (int j = 0; j < p; ++j)
                if (!in[size_t(j)]) outside.push_back(j);
            std::stable_sort(outside.begin(), outside.end(),
                             [&score](int a, int b) { return score[a] > score[b]; });
            if (static_cast<int>(outside.size()) > kOutCandidates)
                outside.resize(kOutCandidates);
            bool improved = false;
            const std::vector<int> support_now = best_support;
            for (int drop : support_now) {
                for (int add : outside) {
                    std::vector<int> idx;
                    idx.reserve(static_cast<size_t>(k));
                    for (int i : support_now)
                        if (i != drop) idx.push_back(i);
                    idx.push_back(add);
                    std::sort(idx.begin(), idx.end());
                    improved = consider(idx) || improved;
                }
            }
            if (!improved) break;
        }
    }

    PolarResult res;
    res.sparsity_level = k;
    if (best_val <= 0.0) return res; // lambda^+ convention
    res.value = best_val;
    res.support = std::move(best_support);
    res.u = std::move(best_u);
    return res;
}

PolarResult polar_weighted(const SymmetricMatrix& y, const std::vector<double>& w, bool exact,
                           int restarts, int max_iter, std::uint64_t seed) {
    const int p = y.dim();
    require(static_cast<int>(w.size()) == p, ErrorKind::Invalid,
            "weight vector must have one weight per sparsity level");
    for (double wk : w) require(wk > 0.0, ErrorKind::Invalid, "weights must be positive");

    PolarResult best;
    for (int k = 1; k <= p; ++k) {
        PolarResult level = (exact && subset_count(p, k) <= kPolarEnumBudget)
                                ? polar_exact(y, k)
                                : polar_tpi(y, k, restarts, max_iter, seed + std::uint64_t(k));
        const double scaled = level.value / w[static_cast<size_t>(k - 1)];
        if (scaled > best.value) {
            best = std::move(level);
            best.value = scaled;
            best.sparsity_level = k;
        }
    }
    return best;
}

} // namespace lvggm
