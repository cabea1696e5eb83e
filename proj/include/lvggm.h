/* C API of the lvggm shared library.
 *
 * All objects are opaque handles created and destroyed by the library.
 * Functions returning a pointer return NULL on failure; functions returning
 * lvggm_status return LVGGM_OK on success. In both cases lvggm_last_error()
 * describes the most recent failure on the calling thread.
 */
#ifndef LVGGM_H
#define LVGGM_H

#include <stdint.h>

#if defined(_WIN32)
#define LVGGM_API __declspec(dllexport)
#else
#define LVGGM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lvggm_status {
    LVGGM_OK = 0,
    LVGGM_ERR_INVALID = 1,
    LVGGM_ERR_DIM = 2,
    LVGGM_ERR_DOMAIN = 3,
    LVGGM_ERR_CAPACITY = 4,
    LVGGM_ERR_NUMERIC = 5,
    LVGGM_ERR_IO = 6
} lvggm_status;

LVGGM_API const char* lvggm_last_error(void);
LVGGM_API void lvggm_string_free(char* s);

typedef struct lvggm_matrix lvggm_matrix;
typedef struct lvggm_atoms lvggm_atoms;
typedef struct lvggm_model lvggm_model;
typedef struct lvggm_estimate lvggm_estimate;

/* ---- symmetric matrices ------------------------------------------------ */

/* data may be NULL for a zero matrix; a non-symmetric buffer is symmetrized
 * as (M + M^T)/2. */
LVGGM_API lvggm_matrix* lvggm_matrix_create(int dim, const double* data_rowmajor);
LVGGM_API lvggm_matrix* lvggm_matrix_clone(const lvggm_matrix* m);
LVGGM_API void lvggm_matrix_free(lvggm_matrix* m);
LVGGM_API int lvggm_matrix_dim(const lvggm_matrix* m);
LVGGM_API double lvggm_matrix_get(const lvggm_matrix* m, int i, int j);
LVGGM_API lvggm_status lvggm_matrix_copy_data(const lvggm_matrix* m, double* out_rowmajor);
/* Text format: first line "p p", then p whitespace-separated rows. */
LVGGM_API lvggm_matrix* lvggm_matrix_load(const char* path);
LVGGM_API lvggm_status lvggm_matrix_save(const lvggm_matrix* m, const char* path);
/* Eigendecomposition; values ascending. vectors (row-major, may be NULL)
 * stores the eigenvector for values[j] in column j. */
LVGGM_API lvggm_status lvggm_matrix_eigen(const lvggm_matrix* m, double* values,
                                          double* vectors);

/* ---- atomic decompositions --------------------------------------------- */

LVGGM_API lvggm_atoms* lvggm_atoms_create(int dim);
/* u_on_support holds the unit vector's entries aligned with support. */
LVGGM_API lvggm_status lvggm_atoms_add(lvggm_atoms* a, const int* support, int support_len,
                                       const double* u_on_support, double c);
LVGGM_API void lvggm_atoms_free(lvggm_atoms* a);
LVGGM_API int lvggm_atoms_count(const lvggm_atoms* a);
LVGGM_API int lvggm_atoms_dim(const lvggm_atoms* a);
LVGGM_API int lvggm_atoms_support_size(const lvggm_atoms* a, int idx);
/* support and u_on_support must hold lvggm_atoms_support_size(a, idx)
 * entries; any out pointer may be NULL. */
LVGGM_API lvggm_status lvggm_atoms_get(const lvggm_atoms* a, int idx, int* support,
                                       double* u_on_support, double* c);
LVGGM_API double lvggm_atoms_coefficient_sum(const lvggm_atoms* a);
LVGGM_API lvggm_matrix* lvggm_atoms_materialize(const lvggm_atoms* a);
/* JSON document {"dim": p, "atoms": [{"support": [...], "u": [...], "c": x}]} */
LVGGM_API lvggm_atoms* lvggm_atoms_load(const char* path);
LVGGM_API lvggm_status lvggm_atoms_save(const lvggm_atoms* a, const char* path);

/* ---- losses ------------------------------------------------------------ */

typedef enum lvggm_loss {
    LVGGM_LOSS_NEGLOGLIK = 0,
    LVGGM_LOSS_TAYLOR = 1,
    LVGGM_LOSS_SCORE_MATCHING = 2
} lvggm_loss;

LVGGM_API lvggm_status lvggm_loss_value(lvggm_loss kind, const lvggm_matrix* m,
                                        const lvggm_matrix* sigma_hat, double* out);
LVGGM_API lvggm_matrix* lvggm_loss_grad(lvggm_loss kind, const lvggm_matrix* m,
                                        const lvggm_matrix* sigma_hat);
LVGGM_API lvggm_status lvggm_lipschitz_const(lvggm_loss kind, const lvggm_matrix* sigma_hat,
                                             double* out);

/* ---- polar gauge / LMO -------------------------------------------------- */

/* support (size k) and u (size dim) may be NULL; *has_vector is 0 when the
 * polar value is 0 (all restricted eigenvalues nonpositive). */
LVGGM_API lvggm_status lvggm_polar_exact(const lvggm_matrix* y, int k, double* value,
                                         int* support, double* u, int* has_vector);
LVGGM_API lvggm_status lvggm_polar_tpi(const lvggm_matrix* y, int k, int restarts, int max_iter,
                                       uint64_t seed, double* value, int* support, double* u,
                                       int* has_vector);
/* weights has one entry per sparsity level 1..dim; value is already divided
 * by the winning level weight; support must hold dim entries. */
LVGGM_API lvggm_status lvggm_polar_weighted(const lvggm_matrix* y, const double* weights,
                                            int exact, int restarts, int max_iter, uint64_t seed,
                                            double* value, int* level, int* support_len,
                                            int* support, double* u, int* has_vector);
/* k > 0 selects the fixed budget; k == 0 uses weights (length dim). */
LVGGM_API lvggm_status lvggm_omega_value(const lvggm_atoms* a, int k, const double* weights,
                                         double* out);

/* ---- solver -------------------------------------------------------------- */

typedef struct lvggm_solver_config {
    double lambda;
    double gamma;
    int k;                  /* fixed sparsity budget; 0 means weighted */
    const double* weights;  /* per-level weights (length dim) when k == 0 */
    lvggm_loss loss;        /* LVGGM_LOSS_TAYLOR or LVGGM_LOSS_SCORE_MATCHING */
    int outer_iters;
    int ista_steps_per_outer;
    double fw_tol;
    double corrective_tol;
    int max_atoms;
    int tpi_restarts;
    uint64_t seed;
} lvggm_solver_config;

LVGGM_API void lvggm_solver_config_init(lvggm_solver_config* cfg);
LVGGM_API lvggm_estimate* lvggm_fit(const lvggm_matrix* sigma_hat,
                                    const lvggm_solver_config* cfg);
/* Frobenius data fit 0.5||S - L - target||_F^2 with an internal lambda sweep
 * down to cfg->lambda. */
LVGGM_API lvggm_estimate* lvggm_fit_decomposition(const lvggm_matrix* target,
                                                  const lvggm_solver_config* cfg);
/* Warm-started fit along a decreasing lambda sequence; writes one estimate
 * per lambda into out (all created on success). */
LVGGM_API lvggm_status lvggm_fit_path(const lvggm_matrix* sigma_hat,
                                      const lvggm_solver_config* cfg, const double* lambdas,
                                      int n_lambdas, lvggm_estimate** out);
LVGGM_API void lvggm_estimate_free(lvggm_estimate* e);
LVGGM_API lvggm_matrix* lvggm_estimate_S(const lvggm_estimate* e);
LVGGM_API lvggm_atoms* lvggm_estimate_atoms(const lvggm_estimate* e);
LVGGM_API int lvggm_estimate_iterations(const lvggm_estimate* e);
LVGGM_API int lvggm_estimate_trace_len(const lvggm_estimate* e);
LVGGM_API lvggm_status lvggm_estimate_trace(const lvggm_estimate* e, double* out);
/* l1 + trace-norm baseline; S_out and L_out are created on success. */
LVGGM_API lvggm_status lvggm_fit_baseline(const lvggm_matrix* sigma_hat, double lambda,
                                          double gamma, lvggm_loss loss, int iters,
                                          lvggm_matrix** S_out, lvggm_matrix** L_out);

/* ---- identifiability certificates ---------------------------------------- */

/* orientation: 0 = the truth is M = S + L, 1 = the truth is M = S - L (the
 * solver convention; certified by negating S internally). json_out receives
 * a malloc'd report (free with lvggm_string_free). */
LVGGM_API lvggm_status lvggm_certify(const lvggm_matrix* s_star, const lvggm_atoms* blocks,
                                     double gamma, int k, int orientation, int tpi_restarts,
                                     uint64_t seed, char** json_out, int* pass);

typedef struct lvggm_constants {
    int k0;
    double tau_bar;
    double tau_under;
    double alpha;
    double mu;
    int has_interval;
    double gamma_lo;
    double gamma_hi;
    double gamma_thm2;
    double r_bound;
    int c182_ok;
} lvggm_constants;

/* mode: 0 = single full-support block (ambient-dimension constants),
 * 1 = equal-size sparse blocks (block-size constants). */
LVGGM_API lvggm_status lvggm_theorem_constants(const lvggm_matrix* s_star,
                                               const lvggm_atoms* blocks, int mode,
                                               lvggm_constants* out);
LVGGM_API lvggm_status lvggm_zeta_bounds(const lvggm_matrix* s_star, const lvggm_atoms* blocks,
                                         double* i_to_0, double* prime_0_to_i, double* zero_to_i);
/* Synthetic truth with r disjoint blocks of size k, near-flat factors and
 * max row degree k0 in S*; gamma_in <= 0 picks the default 2/k. */
LVGGM_API lvggm_status lvggm_make_identifiable_instance(int p, int k, int r, int k0,
                                                        double tau_target, double gamma_in,
                                                        uint64_t seed, lvggm_matrix** s_star,
                                                        lvggm_atoms** blocks, double* gamma_out);

/* ---- synthetic models ----------------------------------------------------- */

typedef enum lvggm_model_kind {
    LVGGM_MODEL_TREE3 = 0,
    LVGGM_MODEL_TREE3_UNEVEN = 1,
    LVGGM_MODEL_TREE_OVERLAP4 = 2,
    LVGGM_MODEL_ERDOS_RENYI = 3
} lvggm_model_kind;

LVGGM_API lvggm_model* lvggm_model_generate(lvggm_model_kind kind, uint64_t seed, double ridge,
                                            double min_eig);
LVGGM_API void lvggm_model_free(lvggm_model* m);
LVGGM_API int lvggm_model_p(const lvggm_model* m);
LVGGM_API int lvggm_model_h(const lvggm_model* m);
LVGGM_API lvggm_matrix* lvggm_model_K(const lvggm_model* m);
LVGGM_API int lvggm_model_group_size(const lvggm_model* m, int g);
LVGGM_API lvggm_status lvggm_model_group(const lvggm_model* m, int g, int* out);
LVGGM_API int lvggm_model_default_samples(lvggm_model_kind kind);
/* Schur complement over the observed block. */
LVGGM_API lvggm_matrix* lvggm_model_marginal_precision(const lvggm_model* m);
LVGGM_API lvggm_matrix* lvggm_model_sample_covariance(const lvggm_model* m, int n, uint64_t seed);
/* K_OO and the rank-one latent blocks of K_OH K_HH^{-1} K_HO. */
LVGGM_API lvggm_matrix* lvggm_model_truth_S(const lvggm_model* m);
LVGGM_API lvggm_atoms* lvggm_model_truth_blocks(const lvggm_model* m);
LVGGM_API lvggm_status lvggm_model_save(const lvggm_model* m, const char* k_path,
                                        const char* structure_path);
LVGGM_API lvggm_model* lvggm_model_load(const char* k_path, const char* structure_path);

/* Standalone variants operating on raw matrices. */
LVGGM_API lvggm_matrix* lvggm_marginal_precision(const lvggm_matrix* k_full, const int* observed,
                                                 int n_observed);
LVGGM_API lvggm_matrix* lvggm_sample_covariance(const lvggm_matrix* k_full, const int* observed,
                                                int n_observed, int n, uint64_t seed);
/* edges is an interleaved endpoint list of length 2*m. */
LVGGM_API lvggm_matrix* lvggm_sparse_wishart(int n_nodes, const int* edges, int m, uint64_t seed);

/* ---- evaluation ------------------------------------------------------------ */

LVGGM_API lvggm_status lvggm_support_metrics(const lvggm_matrix* s_hat,
                                             const lvggm_matrix* s_true, double threshold,
                                             double* precision, double* recall, double* f1);
/* group_offsets has n_groups+1 entries indexing group_members; per group the
 * matched atom index (-1 if none) and its Jaccard score are written. */
LVGGM_API lvggm_status lvggm_match_atoms(const lvggm_atoms* estimated, const int* group_offsets,
                                         const int* group_members, int n_groups,
                                         int* atom_for_group, double* jaccard_for_group);
LVGGM_API lvggm_matrix* lvggm_reconstruct_complete(const lvggm_matrix* s, const lvggm_atoms* l);

#ifdef __cplusplus
}
#endif

#endif /* LVGGM_H */
