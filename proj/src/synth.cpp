#include "lvggm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace lvggm {

int ModelSpec::p() const { return kind == ModelKind::ErdosRenyi ? 160 : 45; }

int ModelSpec::h() const {
    switch (kind) {
        case ModelKind::Tree3Groups:
        case ModelKind::Tree3GroupsUneven: return 3;
        case ModelKind::TreeOverlap4:
        case ModelKind::ErdosRenyi: return 4;
    }
    return 0;
}

std::vector<std::vector<int>> ModelSpec::groups() const {
    auto range = [](int lo, int n) {
        std::vector<int> g(static_cast<size_t>(n));
        std::iota(g.begin(), g.end(), lo);
        return g;
    };
    switch (kind) {
        case ModelKind::Tree3Groups: return {range(0, 15), range(15, 15), range(30, 15)};
        case ModelKind::Tree3GroupsUneven: return {range(0, 20), range(20, 15), range(35, 10)};
        case ModelKind::TreeOverlap4:
            // groups of 15 sharing 5 between consecutive pairs, covering 45
            return {range(0, 15), range(10, 15), range(20, 15), range(30, 15)};
        case ModelKind::ErdosRenyi:
            return {range(0, 35), range(35, 35), range(70, 35), range(105, 35)};
    }
    return {};
}

int ModelSpec::default_samples() const {
    return kind == ModelKind::ErdosRenyi ? 2000 : 50 * p();
}

SymmetricMatrix sparse_wishart(int n_nodes, const std::vector<std::pair<int, int>>& edges,
                               std::mt19937_64& rng) {
    require(n_nodes >= 1, ErrorKind::Invalid, "need at least one node");
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n_nodes, static_cast<int>(edges.size()));
    int col = 0;
    for (const auto& [i, j] : edges) {
        require(i >= 0 && i < n_nodes && j >= 0 && j < n_nodes && i != j, ErrorKind::Invalid,
                "edge endpoint out of range");
        b(i, col) = gauss(rng);
        b(j, col) = gauss(rng);
        ++col;
    }
    return SymmetricMatrix(Eigen::MatrixXd(b * b.transpose()));
}

namespace {

// Uniform spanning tree of the complete graph on p nodes (Wilson's
// algorithm: loop-erased random walks onto the growing tree).
std::vector<std::pair<int, int>> wilson_tree(int p, std::mt19937_64& rng) {
    std::vector<std::pair<int, int>> edges;
    if (p <= 1) return edges;
    std::vector<char> in_tree(static_cast<size_t>(p), 0);
    in_tree[0] = 1;
    std::vector<int> next(static_cast<size_t>(p), -1);
    std::uniform_int_distribution<int> pick(0, p - 2);
    auto step = [&](int v) {
        int w = pick(rng);
        if (w >= v) ++w; // uniform over the other p-1 nodes
        return w;
    };
    for (int start = 1; start < p; ++start) {
        if (in_tree[static_cast<size_t>(start)]) continue;
        int v = start;
        while (!in_tree[static_cast<size_t>(v)]) {
            next[static_cast<size_t>(v)] = step(v);
            v = next[static_cast<size_t>(v)];
        }
        v = start;
        while (!in_tree[static_cast<size_t>(v)]) {
            in_tree[static_cast<size_t>(v)] = 1;
            edges.emplace_back(v, next[static_cast<size_t>(v)]);
            v = next[static_cast<size_t>(v)];
        }
    }
    return edges;
}

std::vector<std::pair<int, int>> observed_graph(const ModelSpec& spec, std::mt19937_64& rng) {
    const int p = spec.p();
    if (spec.kind == ModelKind::ErdosRenyi) {
        std::bernoulli_distribution edge(0.01);
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j)
                if (edge(rng)) edges.emplace_back(i, j);
        return edges;
    }
    // random tree, rejected until max degree <= 5
    constexpr int kMaxDegree = 5;
    constexpr int kMaxTries = 10000;
    for (int attempt = 0; attempt < kMaxTries; ++attempt) {
        auto edges = wilson_tree(p, rng);
        std::vector<int> deg(static_cast<size_t>(p), 0);
        for (const auto& [i, j] : edges) {
            ++deg[static_cast<size_t>(i)];
            ++deg[static_cast<size_t>(j)];
        }
        if (*std::max_element(deg.begin(), deg.end()) <= kMaxDegree) return edges;
    }
    fail(ErrorKind::Capacity, "could not draw a tree with max degree <= 5");
}

} // namespace

GroundTruthModel gen_model(const ModelSpec& spec) {
    const int p = spec.p();
    const int h = spec.h();
    const auto groups = spec.groups();
    require(spec.ridge >= 0.0 && spec.min_eig > 0.0, ErrorKind::Invalid, "bad ridge/min_eig");

    std::mt19937_64 rng(spec.seed * 0x9e3779b97f4a7c15ull + 0x853c49e6748fea9bull);

    GroundTruthModel model;
    model.seed = spec.seed;
    model.observed.resize(static_cast<size_t>(p));
    std::iota(model.observed.begin(), model.observed.end(), 0);
    model.hidden.resize(static_cast<size_t>(h));
    std::iota(model.hidden.begin(), model.hidden.end(), p);
    model.groups = groups;

    constexpr int kMaxRetries = 200;
    for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
        auto edges = observed_graph(spec, rng);
        for (int g = 0; g < h; ++g)
            for (int member : groups[static_cast<size_t>(g)]) edges.emplace_back(p + g, member);
        SymmetricMatrix k = sparse_wishart(p + h, edges, rng);
        Eigen::MatrixXd km = k.mat();
        km.diagonal().array() += spec.ridge;
        SymmetricMatrix kr(km);
        if (kr.lambda_min() >= spec.min_eig) {
            model.K_full = std::move(kr);
            return model;
        }
    }
    fail(ErrorKind::Capacity, "retry budget exhausted while generating a well-conditioned model");
}

SymmetricMatrix marginal_precision(const SymmetricMatrix& k_full,
                                   const std::vector<int>& observed) {
    const int n = k_full.dim();
    std::vector<char> is_obs(static_cast<size_t>(n), 0);
    for (int i : observed) {
        require(i >= 0 && i < n, ErrorKind::Invalid, "observed index out of range");
        is_obs[static_cast<size_t>(i)] = 1;
    }
    std::vector<int> hidden;
    for (int i = 0; i < n; ++i)
        if (!is_obs[static_cast<size_t>(i)]) hidden.push_back(i);

    const int po = static_cast<int>(observed.size());
    const int ph = static_cast<int>(hidden.size());
    Eigen::MatrixXd koo(po, po), koh(po, ph), khh(ph, ph);
    for (int a = 0; a < po; ++a)
        for (int b = 0; b < po; ++b) koo(a, b) = k_full(observed[size_t(a)], observed[size_t(b)]);
    for (int a = 0; a < po; ++a)
        for (int b = 0; b < ph; ++b) koh(a, b) = k_full(observed[size_t(a)], hidden[size_t(b)]);
    for (int a = 0; a < ph; ++a)
        for (int b = 0; b < ph; ++b) khh(a, b) = k_full(hidden[size_t(a)], hidden[size_t(b)]);

    if (ph == 0) return SymmetricMatrix(koo);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(khh);
    require(ldlt.info() == Eigen::Success && ldlt.isPositive() &&
                ldlt.vectorD().minCoeff() > 0.0,
            ErrorKind::Domain, "K_HH must be invertible (positive definite)");
    return SymmetricMatrix(Eigen::MatrixXd(koo - koh * ldlt.solve(koh.transpose())));
}

SymmetricMatrix sample_covariance(const SymmetricMatrix& k_full, const std::vector<int>& observed,
                                  int n, std::mt19937_64& rng) {
    require(n >= 1, ErrorKind::Invalid, "need at least one sample");
    const int d = k_full.dim();
    Eigen::LLT<Eigen::MatrixXd> llt(k_full.mat());
    require(llt.info() == Eigen::Success, ErrorKind::Numeric,
            "precision matrix must be positive definite to sample");
    // K = R^T R (R upper); x = R^{-1} z has covariance K^{-1}.
    const Eigen::MatrixXd r_upper = llt.matrixU();
    std::normal_distribution<double> gauss;

    const int po = static_cast<int>(observed.size());
    for (int i : observed)
        require(i >= 0 && i < d, ErrorKind::Invalid, "observed index out of range");

    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(po, po);
    Eigen::VectorXd z(d), x(d), xo(po);
    for (int s = 0; s < n; ++s) {
        for (int i = 0; i < d; ++i) z[i] = gauss(rng);
        x = r_upper.triangularView<Eigen::Upper>().solve(z);
        for (int a = 0; a < po; ++a) xo[a] = x[observed[size_t(a)]];
        acc.noalias() += xo * xo.transpose();
    }
    return SymmetricMatrix(Eigen::MatrixXd(acc / double(n)));
}

SymmetricMatrix truth_S(const GroundTruthModel& model) {
    const int p = model.p();
    Eigen::MatrixXd koo(p, p);
    for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b)
            koo(a, b) = model.K_full(model.observed[size_t(a)], model.observed[size_t(b)]);
    return SymmetricMatrix(koo);
}

std::vector<Atom> truth_blocks(const GroundTruthModel& model) {
    const int p = model.p();
    std::vector<Atom> blocks;
    for (int g = 0; g < model.h(); ++g) {
        const int hidden = model.hidden[size_t(g)];
        Atom a;
        a.u = Eigen::VectorXd::Zero(p);
        double norm_sq = 0.0;
        for (int row = 0; row < p; ++row) {
            const double v = model.K_full(model.observed[size_t(row)], hidden);
            if (v != 0.0) {
                a.u[row] = v;
                a.support.push_back(row);
                norm_sq += v * v;
            }
        }
        require(norm_sq > 0.0, ErrorKind::Domain, "hidden node has an all-zero column");
        const double khh = model.K_full(hidden, hidden);
        require(khh > 0.0, ErrorKind::Domain, "K_HH has a nonpositive diagonal entry");
        a.u /= std::sqrt(norm_sq);
        a.c = norm_sq / khh;
        blocks.push_back(std::move(a));
    }
    return blocks;
}

std::string model_structure_json(const GroundTruthModel& model) {
    nlohmann::json j;
    j["p"] = model.p();
    j["h"] = model.h();
    j["seed"] = model.seed;
    j["observed"] = model.observed;
    j["hidden"] = model.hidden;
    j["groups"] = model.groups;
    return j.dump(2);
}

GroundTruthModel load_model(const std::string& k_path, const std::string& structure_path) {
    GroundTruthModel model;
    model.K_full = load_matrix(k_path);
    std::ifstream in(structure_path);
    require(in.good(), ErrorKind::Io, "cannot open structure file: " + structure_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        fail(ErrorKind::Io, std::string("structure file is not valid JSON: ") + e.what());
    }
    model.observed = j.at("observed").get<std::vector<int>>();
    model.hidden = j.at("hidden").get<std::vector<int>>();
    model.groups = j.at("groups").get<std::vector<std::vector<int>>>();
    model.seed = j.value("seed", std::uint64_t{0});
    require(model.p() + model.h() == model.K_full.dim(), ErrorKind::Io,
            "structure file is inconsistent with the K matrix dimension");
    return model;
}

void save_model(const GroundTruthModel& model, const std::string& k_path,
                const std::string& structure_path) {
    save_matrix(model.K_full, k_path);
    std::ofstream out(structure_path);
    require(out.good(), ErrorKind::Io, "cannot write structure file: " + structure_path);
    out << model_structure_json(model) << "\n";
}

} // namespace lvggm
