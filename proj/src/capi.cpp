#include "lvggm.h"

#include <cstdlib>
#include <cstring>
#include <random>
#include <string>

#include "lvggm/certificate.hpp"
#include "lvggm/errors.hpp"
#include "lvggm/eval.hpp"
#include "lvggm/gauge.hpp"
#include "lvggm/losses.hpp"
#include "lvggm/matrix.hpp"
#include "lvggm/solver.hpp"
#include "lvggm/synth.hpp"

struct lvggm_matrix {
    lvggm::SymmetricMatrix value;
};
struct lvggm_atoms {
    lvggm::AtomicPSD value;
};
struct lvggm_model {
    lvggm::GroundTruthModel value;
};
struct lvggm_estimate {
    lvggm::Estimate value;
};

namespace {

thread_local std::string g_last_error;

lvggm_status status_of(const lvggm::Error& e) {
    switch (e.kind()) {
        case lvggm::ErrorKind::Invalid: return LVGGM_ERR_INVALID;
        case lvggm::ErrorKind::Dimension: return LVGGM_ERR_DIM;
        case lvggm::ErrorKind::Domain: return LVGGM_ERR_DOMAIN;
        case lvggm::ErrorKind::Capacity: return LVGGM_ERR_CAPACITY;
        case lvggm::ErrorKind::Numeric: return LVGGM_ERR_NUMERIC;
        case lvggm::ErrorKind::Io: return LVGGM_ERR_IO;
    }
    return LVGGM_ERR_INVALID;
}

template <typename F>
lvggm_status guarded(F&& f) {
    try {
        f();
        return LVGGM_OK;
    } catch (const lvggm::Error& e) {
        g_last_error = e.what();
        return status_of(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return LVGGM_ERR_NUMERIC;
    }
}

template <typename T, typename F>
T* guarded_new(F&& f) {
    try {
        return new T{f()};
    } catch (const lvggm::Error& e) {
        g_last_error = e.what();
        return nullptr;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return nullptr;
    }
}

lvggm_status require_args(bool ok) {
    if (!ok) g_last_error = "null or malformed argument";
    return ok ? LVGGM_OK : LVGGM_ERR_INVALID;
}

lvggm::LossKind loss_of(lvggm_loss kind) {
    switch (kind) {
        case LVGGM_LOSS_NEGLOGLIK: return lvggm::LossKind::NegLogLik;
        case LVGGM_LOSS_TAYLOR: return lvggm::LossKind::Taylor;
        case LVGGM_LOSS_SCORE_MATCHING: return lvggm::LossKind::ScoreMatching;
    }
    lvggm::fail(lvggm::ErrorKind::Invalid, "unknown loss kind");
}

lvggm::SolverConfig config_of(const lvggm_solver_config& c, int dim) {
    lvggm::SolverConfig cfg;
    cfg.lambda = c.lambda;
    cfg.gamma = c.gamma;
    if (c.k > 0) {
        cfg.gauge = lvggm::GaugeSpec::fixed_k(c.k);
    } else {
        lvggm::require(c.weights != nullptr, lvggm::ErrorKind::Invalid,
                       "weighted gauge needs a weight vector");
        cfg.gauge = lvggm::GaugeSpec::weighted(std::vector<double>(c.weights, c.weights + dim));
    }
    cfg.loss_kind = loss_of(c.loss);
    if (c.outer_iters > 0) cfg.outer_iters = c.outer_iters;
    if (c.ista_steps_per_outer > 0) cfg.ista_steps_per_outer = c.ista_steps_per_outer;
    if (c.fw_tol > 0.0) cfg.fw_tol = c.fw_tol;
    if (c.corrective_tol > 0.0) cfg.corrective_tol = c.corrective_tol;
    if (c.max_atoms > 0) cfg.max_atoms = c.max_atoms;
    if (c.tpi_restarts > 0) cfg.tpi_restarts = c.tpi_restarts;
    cfg.seed = c.seed;
    return cfg;
}

void export_polar(const lvggm::PolarResult& r, int k_slots, double* value, int* support, double* u,
                  int* has_vector) {
    if (value) *value = r.value;
    if (has_vector) *has_vector = r.u.has_value() ? 1 : 0;
    if (support && r.support.has_value()) {
        int i = 0;
        for (int idx : *r.support)
            if (i < k_slots) support[i++] = idx;
        for (; i < k_slots; ++i) support[i] = -1;
    }
    if (u && r.u.has_value())
        for (int i = 0; i < r.u->size(); ++i) u[i] = (*r.u)[i];
}

} // namespace

extern "C" {

const char* lvggm_last_error(void) { return g_last_error.c_str(); }

void lvggm_string_free(char* s) { std::free(s); }

/* ---- matrices ---- */

lvggm_matrix* lvggm_matrix_create(int dim, const double* data) {
    return guarded_new<lvggm_matrix>([&] {
        if (!data) return lvggm::SymmetricMatrix(dim);
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
            m(data, dim, dim);
        return lvggm::SymmetricMatrix(Eigen::MatrixXd(m));
    });
}

lvggm_matrix* lvggm_matrix_clone(const lvggm_matrix* m) {
    if (!m) return nullptr;
    return new lvggm_matrix{m->value};
}

void lvggm_matrix_free(lvggm_matrix* m) { delete m; }

int lvggm_matrix_dim(const lvggm_matrix* m) { return m ? m->value.dim() : 0; }

double lvggm_matrix_get(const lvggm_matrix* m, int i, int j) {
    if (!m || i < 0 || j < 0 || i >= m->value.dim() || j >= m->value.dim()) return 0.0;
    return m->value(i, j);
}

lvggm_status lvggm_matrix_copy_data(const lvggm_matrix* m, double* out) {
    if (auto st = require_args(m && out)) return st;
    const int p = m->value.dim();
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) out[i * p + j] = m->value(i, j);
    return LVGGM_OK;
}

lvggm_matrix* lvggm_matrix_load(const char* path) {
    if (!path) return nullptr;
    return guarded_new<lvggm_matrix>([&] { return lvggm::load_matrix(path); });
}

lvggm_status lvggm_matrix_save(const lvggm_matrix* m, const char* path) {
    if (auto st = require_args(m && path)) return st;
    return guarded([&] { lvggm::save_matrix(m->value, path); });
}

lvggm_status lvggm_matrix_eigen(const lvggm_matrix* m, double* values, double* vectors) {
    if (auto st = require_args(m && values)) return st;
    return guarded([&] {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            m->value.mat(), vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
        lvggm::require(es.info() == Eigen::Success, lvggm::ErrorKind::Numeric,
                       "eigendecomposition failed");
        const int p = m->value.dim();
        for (int i = 0; i < p; ++i) values[i] = es.eigenvalues()[i];
        if (vectors)
            for (int i = 0; i < p; ++i)
                for (int j = 0; j < p; ++j) vectors[i * p + j] = es.eigenvectors()(i, j);
    });
}

/* ---- atoms ---- */

lvggm_atoms* lvggm_atoms_create(int dim) {
    return guarded_new<lvggm_atoms>([&] { return lvggm::AtomicPSD(dim); });
}

lvggm_status lvggm_atoms_add(lvggm_atoms* a, const int* support, int support_len,
                             const double* u_on_support, double c) {
    if (auto st = require_args(a && support && u_on_support && support_len > 0)) return st;
    return guarded([&] {
        lvggm::Atom atom;
        atom.support.assign(support, support + support_len);
        atom.u = Eigen::VectorXd::Zero(a->value.dim());
        for (int i = 0; i < support_len; ++i) {
            lvggm::require(support[i] >= 0 && support[i] < a->value.dim(),
                           lvggm::ErrorKind::Invalid, "support index out of range");
            atom.u[support[i]] = u_on_support[i];
        }
        atom.c = c;
        a->value.add(std::move(atom));
    });
}

void lvggm_atoms_free(lvggm_atoms* a) { delete a; }

int lvggm_atoms_count(const lvggm_atoms* a) { return a ? a->value.size() : 0; }

int lvggm_atoms_dim(const lvggm_atoms* a) { return a ? a->value.dim() : 0; }

int lvggm_atoms_support_size(const lvggm_atoms* a, int idx) {
    if (!a || idx < 0 || idx >= a->value.size()) return 0;
    return a->value.atom(idx).k();
}

lvggm_status lvggm_atoms_get(const lvggm_atoms* a, int idx, int* support, double* u, double* c) {
    if (auto st = require_args(a && idx >= 0 && idx < a->value.size())) return st;
    const lvggm::Atom& atom = a->value.atom(idx);
    for (int i = 0; i < atom.k(); ++i) {
        if (support) support[i] = atom.support[size_t(i)];
        if (u) u[i] = atom.u[atom.support[size_t(i)]];
    }
    if (c) *c = atom.c;
    return LVGGM_OK;
}

double lvggm_atoms_coefficient_sum(const lvggm_atoms* a) {
    return a ? a->value.coefficient_sum() : 0.0;
}

lvggm_matrix* lvggm_atoms_materialize(const lvggm_atoms* a) {
    if (!a) return nullptr;
    return guarded_new<lvggm_matrix>([&] { return a->value.materialize(); });
}

lvggm_atoms* lvggm_atoms_load(const char* path) {
    if (!path) return nullptr;
    return guarded_new<lvggm_atoms>([&] { return lvggm::load_atoms(path); });
}

lvggm_status lvggm_atoms_save(const lvggm_atoms* a, const char* path) {
    if (auto st = require_args(a && path)) return st;
    return guarded([&] { lvggm::save_atoms(a->value, path); });
}

/* ---- losses ---- */

lvggm_status lvggm_loss_value(lvggm_loss kind, const lvggm_matrix* m,
                              const lvggm_matrix* sigma_hat, double* out) {
    if (auto st = require_args(m && sigma_hat && out)) return st;
    return guarded([&] { *out = lvggm::loss_value(loss_of(kind), m->value, sigma_hat->value); });
}

lvggm_matrix* lvggm_loss_grad(lvggm_loss kind, const lvggm_matrix* m,
                              const lvggm_matrix* sigma_hat) {
    if (!m || !sigma_hat) return nullptr;
    return guarded_new<lvggm_matrix>(
        [&] { return lvggm::loss_grad(loss_of(kind), m->value, sigma_hat->value); });
}

lvggm_status lvggm_lipschitz_const(lvggm_loss kind, const lvggm_matrix* sigma_hat, double* out) {
    if (auto st = require_args(sigma_hat && out)) return st;
    return guarded([&] { *out = lvggm::lipschitz_const(loss_of(kind), sigma_hat->value); });
}

/* ---- polar ---- */

lvggm_status lvggm_polar_exact(const lvggm_matrix* y, int k, double* value, int* support,
                               double* u, int* has_vector) {
    if (auto st = require_args(y != nullptr)) return st;
    return guarded([&] {
        const lvggm::PolarResult r = lvggm::polar_exact(y->value, k);
        export_polar(r, k, value, support, u, has_vector);
    });
}

lvggm_status lvggm_polar_tpi(const lvggm_matrix* y, int k, int restarts, int max_iter,
                             uint64_t seed, double* value, int* support, double* u,
                             int* has_vector) {
    if (auto st = require_args(y != nullptr)) return st;
    return guarded([&] {
        const lvggm::PolarResult r = lvggm::polar_tpi(y->value, k, restarts, max_iter, seed);
        export_polar(r, k, value, support, u, has_vector);
    });
}

lvggm_status lvggm_polar_weighted(const lvggm_matrix* y, const double* weights, int exact,
                                  int restarts, int max_iter, uint64_t seed, double* value,
                                  int* level, int* support_len, int* support, double* u,
                                  int* has_vector) {
    if (auto st = require_args(y && weights)) return st;
    return guarded([&] {
        const int p = y->value.dim();
        const lvggm::PolarResult r = lvggm::polar_weighted(
            y->value, std::vector<double>(weights, weights + p), exact != 0, restarts, max_iter,
            seed);
        if (level) *level = r.sparsity_level;
        if (support_len) *support_len = r.support.has_value() ? int(r.support->size()) : 0;
        export_polar(r, support ? p : 0, value, support, u, has_vector);
    });
}

lvggm_status lvggm_omega_value(const lvggm_atoms* a, int k, const double* weights, double* out) {
    if (auto st = require_args(a && out && (k > 0 || weights))) return st;
    return guarded([&] {
        const lvggm::GaugeSpec spec =
            k > 0 ? lvggm::GaugeSpec::fixed_k(k)
                  : lvggm::GaugeSpec::weighted(
                        std::vector<double>(weights, weights + a->value.dim()));
        *out = lvggm::omega_value(a->value, spec);
    });
}

/* ---- solver ---- */

void lvggm_solver_config_init(lvggm_solver_config* cfg) {
    if (!cfg) return;
    std::memset(cfg, 0, sizeof(*cfg));
    cfg->lambda = 0.1;
    cfg->gamma = 1.0;
    cfg->k = 1;
    cfg->loss = LVGGM_LOSS_SCORE_MATCHING;
    cfg->outer_iters = 50;
    cfg->ista_steps_per_outer = 10;
    cfg->fw_tol = 1e-6;
    cfg->corrective_tol = 1e-10;
    cfg->max_atoms = 16;
    cfg->tpi_restarts = 10;
}

lvggm_estimate* lvggm_fit(const lvggm_matrix* sigma_hat, const lvggm_solver_config* cfg) {
    if (!sigma_hat || !cfg) return nullptr;
    return guarded_new<lvggm_estimate>(
        [&] { return lvggm::fit_lvggm(sigma_hat->value, config_of(*cfg, sigma_hat->value.dim())); });
}

lvggm_estimate* lvggm_fit_decomposition(const lvggm_matrix* target,
                                        const lvggm_solver_config* cfg) {
    if (!target || !cfg) return nullptr;
    return guarded_new<lvggm_estimate>([&] {
        return lvggm::fit_decomposition(target->value, config_of(*cfg, target->value.dim()));
    });
}

lvggm_status lvggm_fit_path(const lvggm_matrix* sigma_hat, const lvggm_solver_config* cfg,
                            const double* lambdas, int n_lambdas, lvggm_estimate** out) {
    if (auto st = require_args(sigma_hat && cfg && lambdas && out && n_lambdas > 0)) return st;
    return guarded([&] {
        const auto estimates = lvggm::fit_path_checkpoints(
            sigma_hat->value, config_of(*cfg, sigma_hat->value.dim()),
            std::vector<double>(lambdas, lambdas + n_lambdas));
        for (int i = 0; i < n_lambdas; ++i) out[i] = new lvggm_estimate{estimates[size_t(i)]};
    });
}

void lvggm_estimate_free(lvggm_estimate* e) { delete e; }

lvggm_matrix* lvggm_estimate_S(const lvggm_estimate* e) {
    if (!e) return nullptr;
    return new lvggm_matrix{e->value.S};
}

lvggm_atoms* lvggm_estimate_atoms(const lvggm_estimate* e) {
    if (!e) return nullptr;
    return new lvggm_atoms{e->value.L};
}

int lvggm_estimate_iterations(const lvggm_estimate* e) { return e ? e->value.iterations : 0; }

int lvggm_estimate_trace_len(const lvggm_estimate* e) {
    return e ? int(e->value.objective_trace.size()) : 0;
}

lvggm_status lvggm_estimate_trace(const lvggm_estimate* e, double* out) {
    if (auto st = require_args(e && out)) return st;
    for (size_t i = 0; i < e->value.objective_trace.size(); ++i) out[i] = e->value.objective_trace[i];
    return LVGGM_OK;
}

lvggm_status lvggm_fit_baseline(const lvggm_matrix* sigma_hat, double lambda, double gamma,
                                lvggm_loss loss, int iters, lvggm_matrix** S_out,
                                lvggm_matrix** L_out) {
    if (auto st = require_args(sigma_hat && S_out && L_out)) return st;
    return guarded([&] {
        auto [s, l] = lvggm::fit_baseline(sigma_hat->value, lambda, gamma, loss_of(loss), iters);
        *S_out = new lvggm_matrix{std::move(s)};
        *L_out = new lvggm_matrix{std::move(l)};
    });
}

/* ---- certificates ---- */

lvggm_status lvggm_certify(const lvggm_matrix* s_star, const lvggm_atoms* blocks, double gamma,
                           int k, int orientation, int tpi_restarts, uint64_t seed,
                           char** json_out, int* pass) {
    if (auto st = require_args(s_star && blocks)) return st;
    return guarded([&] {
        lvggm::CertificateOptions opts;
        if (tpi_restarts > 0) opts.tpi_restarts = tpi_restarts;
        opts.seed = seed;
        const lvggm::CertificateReport rep = lvggm::build_dual(
            s_star->value, blocks->value.atoms(), gamma, k,
            orientation == 0 ? lvggm::Orientation::SumSL : lvggm::Orientation::DifferenceSL, opts);
        if (pass) *pass = rep.pass ? 1 : 0;
        if (json_out) {
            const std::string json = rep.to_json();
            *json_out = static_cast<char*>(std::malloc(json.size() + 1));
            lvggm::require(*json_out != nullptr, lvggm::ErrorKind::Numeric, "out of memory");
            std::memcpy(*json_out, json.c_str(), json.size() + 1);
        }
    });
}

lvggm_status lvggm_theorem_constants(const lvggm_matrix* s_star, const lvggm_atoms* blocks,
                                     int mode, lvggm_constants* out) {
    if (auto st = require_args(s_star && blocks && out)) return st;
    return guarded([&] {
        const lvggm::TheoremConstants tc = lvggm::theorem_constants(
            s_star->value, blocks->value.atoms(),
            mode == 0 ? lvggm::TheoremMode::Theorem1 : lvggm::TheoremMode::Theorem2);
        out->k0 = tc.k0;
        out->tau_bar = tc.tau_bar;
        out->tau_under = tc.tau_under;
        out->alpha = tc.alpha;
        out->mu = tc.mu;
        out->has_interval = tc.has_interval ? 1 : 0;
        out->gamma_lo = tc.gamma_lo;
        out->gamma_hi = tc.gamma_hi;
        out->gamma_thm2 = tc.gamma_thm2;
        out->r_bound = tc.r_bound;
        out->c182_ok = tc.c182_ok ? 1 : 0;
    });
}

lvggm_status lvggm_zeta_bounds(const lvggm_matrix* s_star, const lvggm_atoms* blocks,
                               double* i_to_0, double* prime_0_to_i, double* zero_to_i) {
    if (auto st = require_args(s_star && blocks)) return st;
    return guarded([&] {
        const lvggm::ZetaBounds z = lvggm::zeta_bounds(s_star->value, blocks->value.atoms());
        if (i_to_0) *i_to_0 = z.i_to_0;
        if (prime_0_to_i) *prime_0_to_i = z.prime_0_to_i;
        if (zero_to_i) *zero_to_i = z.zero_to_i;
    });
}

lvggm_status lvggm_make_identifiable_instance(int p, int k, int r, int k0, double tau_target,
                                              double gamma_in, uint64_t seed,
                                              lvggm_matrix** s_star, lvggm_atoms** blocks,
                                              double* gamma_out) {
    if (auto st = require_args(s_star && blocks)) return st;
    return guarded([&] {
        lvggm::InstanceParams params;
        params.p = p;
        params.k = k;
        params.r = r;
        params.k0 = k0;
        if (tau_target > 0.0) params.tau_target = tau_target;
        params.gamma = gamma_in;
        params.seed = seed;
        lvggm::Instance inst = lvggm::make_identifiable_instance(params);
        *s_star = new lvggm_matrix{std::move(inst.S_star)};
        *blocks = new lvggm_atoms{lvggm::AtomicPSD(p, std::move(inst.blocks))};
        if (gamma_out) *gamma_out = inst.gamma;
    });
}

/* ---- synth ---- */

namespace {

lvggm::ModelSpec spec_of(lvggm_model_kind kind, uint64_t seed, double ridge, double min_eig) {
    lvggm::ModelSpec spec;
    switch (kind) {
        case LVGGM_MODEL_TREE3: spec.kind = lvggm::ModelKind::Tree3Groups; break;
        case LVGGM_MODEL_TREE3_UNEVEN: spec.kind = lvggm::ModelKind::Tree3GroupsUneven; break;
        case LVGGM_MODEL_TREE_OVERLAP4: spec.kind = lvggm::ModelKind::TreeOverlap4; break;
        case LVGGM_MODEL_ERDOS_RENYI: spec.kind = lvggm::ModelKind::ErdosRenyi; break;
        default: lvggm::fail(lvggm::ErrorKind::Invalid, "unknown model kind");
    }
    spec.seed = seed;
    if (ridge >= 0.0) spec.ridge = ridge;
    if (min_eig > 0.0) spec.min_eig = min_eig;
    return spec;
}

} // namespace

lvggm_model* lvggm_model_generate(lvggm_model_kind kind, uint64_t seed, double ridge,
                                  double min_eig) {
    return guarded_new<lvggm_model>(
        [&] { return lvggm::gen_model(spec_of(kind, seed, ridge, min_eig)); });
}

void lvggm_model_free(lvggm_model* m) { delete m; }

int lvggm_model_p(const lvggm_model* m) { return m ? m->value.p() : 0; }

int lvggm_model_h(const lvggm_model* m) { return m ? m->value.h() : 0; }

lvggm_matrix* lvggm_model_K(const lvggm_model* m) {
    if (!m) return nullptr;
    return new lvggm_matrix{m->value.K_full};
}

int lvggm_model_group_size(const lvggm_model* m, int g) {
    if (!m || g < 0 || g >= m->value.h()) return 0;
    return int(m->value.groups[size_t(g)].size());
}

lvggm_status lvggm_model_group(const lvggm_model* m, int g, int* out) {
    if (auto st = require_args(m && out && g >= 0 && g < (m ? m->value.h() : 0))) return st;
    const auto& grp = m->value.groups[size_t(g)];
    for (size_t i = 0; i < grp.size(); ++i) out[i] = grp[i];
    return LVGGM_OK;
}

int lvggm_model_default_samples(lvggm_model_kind kind) {
    return spec_of(kind, 0, -1.0, 0.0).default_samples();
}

lvggm_matrix* lvggm_model_marginal_precision(const lvggm_model* m) {
    if (!m) return nullptr;
    return guarded_new<lvggm_matrix>(
        [&] { return lvggm::marginal_precision(m->value.K_full, m->value.observed); });
}

lvggm_matrix* lvggm_model_sample_covariance(const lvggm_model* m, int n, uint64_t seed) {
    if (!m) return nullptr;
    return guarded_new<lvggm_matrix>([&] {
        std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 0xc2b2ae3d27d4eb4full);
        return lvggm::sample_covariance(m->value.K_full, m->value.observed, n, rng);
    });
}

lvggm_matrix* lvggm_model_truth_S(const lvggm_model* m) {
    if (!m) return nullptr;
    return guarded_new<lvggm_matrix>([&] { return lvggm::truth_S(m->value); });
}

lvggm_atoms* lvggm_model_truth_blocks(const lvggm_model* m) {
    if (!m) return nullptr;
    return guarded_new<lvggm_atoms>([&] {
        return lvggm::AtomicPSD(m->value.p(), lvggm::truth_blocks(m->value));
    });
}

lvggm_status lvggm_model_save(const lvggm_model* m, const char* k_path,
                              const char* structure_path) {
    if (auto st = require_args(m && k_path && structure_path)) return st;
    return guarded([&] { lvggm::save_model(m->value, k_path, structure_path); });
}

lvggm_model* lvggm_model_load(const char* k_path, const char* structure_path) {
    if (!k_path || !structure_path) return nullptr;
    return guarded_new<lvggm_model>([&] { return lvggm::load_model(k_path, structure_path); });
}

lvggm_matrix* lvggm_marginal_precision(const lvggm_matrix* k_full, const int* observed,
                                       int n_observed) {
    if (!k_full || (!observed && n_observed > 0)) return nullptr;
    return guarded_new<lvggm_matrix>([&] {
        return lvggm::marginal_precision(k_full->value,
                                         std::vector<int>(observed, observed + n_observed));
    });
}

lvggm_matrix* lvggm_sample_covariance(const lvggm_matrix* k_full, const int* observed,
                                      int n_observed, int n, uint64_t seed) {
    if (!k_full || (!observed && n_observed > 0)) return nullptr;
    return guarded_new<lvggm_matrix>([&] {
        std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 0xc2b2ae3d27d4eb4full);
        return lvggm::sample_covariance(k_full->value,
                                        std::vector<int>(observed, observed + n_observed), n, rng);
    });
}

lvggm_matrix* lvggm_sparse_wishart(int n_nodes, const int* edges, int m, uint64_t seed) {
    if (!edges && m > 0) return nullptr;
    return guarded_new<lvggm_matrix>([&] {
        std::vector<std::pair<int, int>> e;
        for (int i = 0; i < m; ++i) e.emplace_back(edges[2 * i], edges[2 * i + 1]);
        std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 0x94d049bb133111ebull);
        return lvggm::sparse_wishart(n_nodes, e, rng);
    });
}

/* ---- eval ---- */

lvggm_status lvggm_support_metrics(const lvggm_matrix* s_hat, const lvggm_matrix* s_true,
                                   double threshold, double* precision, double* recall,
                                   double* f1) {
    if (auto st = require_args(s_hat && s_true)) return st;
    return guarded([&] {
        const lvggm::SupportMetrics m =
            lvggm::support_metrics(s_hat->value, s_true->value, threshold);
        if (precision) *precision = m.precision;
        if (recall) *recall = m.recall;
        if (f1) *f1 = m.f1;
    });
}

lvggm_status lvggm_match_atoms(const lvggm_atoms* estimated, const int* group_offsets,
                               const int* group_members, int n_groups, int* atom_for_group,
                               double* jaccard_for_group) {
    if (auto st = require_args(estimated && group_offsets && (group_members || n_groups == 0)))
        return st;
    return guarded([&] {
        std::vector<std::vector<int>> groups;
        for (int g = 0; g < n_groups; ++g)
            groups.emplace_back(group_members + group_offsets[g],
                                group_members + group_offsets[g + 1]);
        const auto matches = lvggm::match_atoms(estimated->value, groups);
        for (int g = 0; g < n_groups; ++g) {
            if (atom_for_group) atom_for_group[g] = -1;
            if (jaccard_for_group) jaccard_for_group[g] = 0.0;
        }
        for (const auto& m : matches) {
            if (m.group < 0) continue;
            if (atom_for_group) atom_for_group[m.group] = m.atom;
            if (jaccard_for_group) jaccard_for_group[m.group] = m.jaccard;
        }
    });
}

lvggm_matrix* lvggm_reconstruct_complete(const lvggm_matrix* s, const lvggm_atoms* l) {
    if (!s || !l) return nullptr;
    return guarded_new<lvggm_matrix>([&] { return lvggm::reconstruct_complete(s->value, l->value); });
}

} // extern "C"
