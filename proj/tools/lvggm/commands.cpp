#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "config.hpp"
#include "handles.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;

namespace cli {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw CliError("cannot create output directory " + dir + ": " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out.good()) throw CliError("cannot write " + path);
    out << text;
    if (!out.good()) throw CliError("write failed: " + path);
}

lvggm_model_kind model_kind_of(const std::string& name) {
    if (name == "tree3") return LVGGM_MODEL_TREE3;
    if (name == "tree3u" || name == "tree3-uneven") return LVGGM_MODEL_TREE3_UNEVEN;
    if (name == "tree4o" || name == "tree4-overlap") return LVGGM_MODEL_TREE_OVERLAP4;
    if (name == "er" || name == "erdos-renyi") return LVGGM_MODEL_ERDOS_RENYI;
    throw CliError("unknown model '" + name + "' (expected tree3|tree3u|tree4o|er)");
}

lvggm_loss loss_of(const std::string& name) {
    if (name == "sm" || name == "score-matching") return LVGGM_LOSS_SCORE_MATCHING;
    if (name == "taylor") return LVGGM_LOSS_TAYLOR;
    throw CliError("unknown loss '" + name + "' (expected sm|taylor)");
}

int pool_size(int jobs) {
    int threads = int(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("LVGGM_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) threads = cap;
    }
    return std::max(1, std::min(threads, jobs));
}

// Runs fn(i) for i in [0, jobs) on a small pool; exceptions are re-thrown
// after all workers join.
template <typename F>
void parallel_for(int jobs, F&& fn) {
    const int threads = pool_size(jobs);
    if (threads <= 1) {
        for (int i = 0; i < jobs; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::string> errors(static_cast<size_t>(threads));
    std::vector<std::thread> workers;
    for (int t = 0; t < threads; ++t) {
        workers.emplace_back([&, t] {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= jobs) return;
                try {
                    fn(i);
                } catch (const std::exception& e) {
                    errors[size_t(t)] = e.what();
                    return;
                }
            }
        });
    }
    for (auto& w : workers) w.join();
    for (const auto& e : errors)
        if (!e.empty()) throw CliError(e);
}

struct ModelFiles {
    Model model;
    Matrix truth_S;
    Atoms truth_blocks;
    std::vector<int> group_offsets;
    std::vector<int> group_members;
    int n_groups = 0;
};

ModelFiles load_truth(const std::string& dir) {
    ModelFiles t;
    t.model = require_model(
        lvggm_model_load((fs::path(dir) / "K.txt").c_str(), (fs::path(dir) / "structure.json").c_str()),
        "load truth model from " + dir);
    t.truth_S = require_matrix(lvggm_model_truth_S(t.model.get()), "truth S");
    t.truth_blocks = require_atoms(lvggm_model_truth_blocks(t.model.get()), "truth blocks");
    t.n_groups = lvggm_model_h(t.model.get());
    t.group_offsets.push_back(0);
    for (int g = 0; g < t.n_groups; ++g) {
        const int sz = lvggm_model_group_size(t.model.get(), g);
        std::vector<int> buf(static_cast<size_t>(sz));
        check(lvggm_model_group(t.model.get(), g, buf.data()), "truth group");
        t.group_members.insert(t.group_members.end(), buf.begin(), buf.end());
        t.group_offsets.push_back(int(t.group_members.size()));
    }
    return t;
}

double default_threshold(const Matrix& s) {
    const auto data = matrix_data(s);
    double m = 0.0;
    for (double v : data) m = std::max(m, std::abs(v));
    return 1e-6 * m;
}

int offdiag_nnz(const Matrix& s, double threshold) {
    const int p = lvggm_matrix_dim(s.get());
    const auto data = matrix_data(s);
    int nnz = 0;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            if (i != j && std::abs(data[size_t(i) * size_t(p) + size_t(j)]) > threshold) ++nnz;
    return nnz;
}

lvggm_solver_config solver_config_from(const FitOptions& opt, int dim,
                                       std::vector<double>& weight_storage) {
    lvggm_solver_config cfg;
    lvggm_solver_config_init(&cfg);
    cfg.lambda = opt.lambda;
    cfg.gamma = opt.gamma;
    cfg.loss = loss_of(opt.loss);
    if (!opt.weights.empty()) {
        if (opt.weights != "sqrt")
            throw CliError("unknown weight family '" + opt.weights + "' (expected sqrt)");
        weight_storage = sqrt_weights(dim);
        cfg.k = 0;
        cfg.weights = weight_storage.data();
    } else {
        if (opt.k < 1) throw CliError("--k is required unless --weights is given");
        cfg.k = opt.k;
    }
    if (opt.outer > 0) cfg.outer_iters = opt.outer;
    if (opt.ista > 0) cfg.ista_steps_per_outer = opt.ista;
    if (opt.max_atoms > 0) cfg.max_atoms = opt.max_atoms;
    if (opt.restarts > 0) cfg.tpi_restarts = opt.restarts;
    if (opt.fw_tol > 0.0) cfg.fw_tol = opt.fw_tol;
    cfg.seed = opt.seed;
    return cfg;
}

nlohmann::json estimate_json(const EstimateHandle& est, const FitOptions& opt, int atom_count) {
    nlohmann::json j;
    j["lambda"] = opt.lambda;
    j["gamma"] = opt.gamma;
    j["loss"] = opt.loss;
    j["k"] = opt.k;
    j["weights"] = opt.weights;
    j["iterations"] = lvggm_estimate_iterations(est.get());
    j["atoms"] = atom_count;
    const int n = lvggm_estimate_trace_len(est.get());
    std::vector<double> trace(static_cast<size_t>(std::max(n, 0)));
    if (n > 0) check(lvggm_estimate_trace(est.get(), trace.data()), "estimate trace");
    j["objective_trace"] = trace;
    return j;
}

} // namespace

int run_synth(const SynthOptions& opt) {
    if (opt.out.empty()) throw CliError("--out directory is required");
    ensure_dir(opt.out);
    const lvggm_model_kind kind = model_kind_of(opt.model);
    Model model = require_model(lvggm_model_generate(kind, opt.seed, opt.ridge, opt.min_eig),
                                "model generation");
    const int n = opt.samples > 0 ? opt.samples : lvggm_model_default_samples(kind);
    Matrix sigma = require_matrix(lvggm_model_sample_covariance(model.get(), n, opt.seed),
                                  "covariance sampling");
    Matrix marginal =
        require_matrix(lvggm_model_marginal_precision(model.get()), "marginal precision");

    const fs::path dir(opt.out);
    check(lvggm_model_save(model.get(), (dir / "K.txt").c_str(), (dir / "structure.json").c_str()),
          "model save");
    check(lvggm_matrix_save(sigma.get(), (dir / "sigma.txt").c_str()), "sigma save");
    check(lvggm_matrix_save(marginal.get(), (dir / "marginal.txt").c_str()), "marginal save");

    nlohmann::json meta;
    meta["model"] = opt.model;
    meta["seed"] = opt.seed;
    meta["n_samples"] = n;
    meta["p"] = lvggm_model_p(model.get());
    meta["h"] = lvggm_model_h(model.get());
    write_text((dir / "meta.json").string(), meta.dump(2) + "\n");

    std::cout << "synth: wrote K.txt, structure.json, sigma.txt (n=" << n << "), marginal.txt to "
              << opt.out << "\n";
    return 0;
}

int run_fit(const FitOptions& opt) {
    if (opt.out.empty()) throw CliError("--out directory is required");
    ensure_dir(opt.out);
    Matrix sigma = require_matrix(lvggm_matrix_load(opt.input.c_str()), "load " + opt.input);
    std::vector<double> weight_storage;
    const lvggm_solver_config cfg =
        solver_config_from(opt, lvggm_matrix_dim(sigma.get()), weight_storage);
    EstimateHandle est(lvggm_fit(sigma.get(), &cfg));
    if (!est) throw CliError(std::string("fit failed: ") + lvggm_last_error());

    Matrix s = require_matrix(lvggm_estimate_S(est.get()), "estimate S");
    Atoms atoms = require_atoms(lvggm_estimate_atoms(est.get()), "estimate atoms");
    const fs::path dir(opt.out);
    check(lvggm_matrix_save(s.get(), (dir / "S.txt").c_str()), "S save");
    check(lvggm_atoms_save(atoms.get(), (dir / "atoms.json").c_str()), "atoms save");
    write_text((dir / "estimate.json").string(),
               estimate_json(est, opt, lvggm_atoms_count(atoms.get())).dump(2) + "\n");
    std::cout << "fit: " << lvggm_atoms_count(atoms.get()) << " atoms, "
              << lvggm_estimate_iterations(est.get()) << " outer iterations -> " << opt.out << "\n";
    return 0;
}

int run_fit_baseline(const BaselineOptions& opt) {
    if (opt.out.empty()) throw CliError("--out directory is required");
    ensure_dir(opt.out);
    Matrix sigma = require_matrix(lvggm_matrix_load(opt.input.c_str()), "load " + opt.input);
    lvggm_matrix *s_raw = nullptr, *l_raw = nullptr;
    check(lvggm_fit_baseline(sigma.get(), opt.lambda, opt.gamma, loss_of(opt.loss), opt.iters,
                             &s_raw, &l_raw),
          "baseline fit");
    Matrix s(s_raw), l(l_raw);

    const int p = lvggm_matrix_dim(l.get());
    std::vector<double> eigvals(static_cast<size_t>(p));
    check(lvggm_matrix_eigen(l.get(), eigvals.data(), nullptr), "baseline eigenvalues");

    const fs::path dir(opt.out);
    check(lvggm_matrix_save(s.get(), (dir / "S.txt").c_str()), "S save");
    check(lvggm_matrix_save(l.get(), (dir / "L.txt").c_str()), "L save");
    nlohmann::json j;
    j["lambda"] = opt.lambda;
    j["gamma"] = opt.gamma;
    j["loss"] = opt.loss;
    j["iters"] = opt.iters;
    j["l_eigenvalues"] = eigvals;
    write_text((dir / "estimate.json").string(), j.dump(2) + "\n");
    std::cout << "fit-baseline: wrote S.txt, L.txt -> " << opt.out << "\n";
    return 0;
}

namespace {

struct SelectTargets {
    double nnz = -1.0;
    double atoms = -1.0; // atom count (fcg) or rank (baseline)
    double rank = -1.0;
};

SelectTargets parse_select(const std::string& select) {
    SelectTargets t;
    std::istringstream in(select);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw CliError("bad --select entry: " + item);
        const std::string key = item.substr(0, eq);
        const double value = std::stod(item.substr(eq + 1));
        if (key == "nnz")
            t.nnz = value;
        else if (key == "atoms")
            t.atoms = value;
        else if (key == "rank")
            t.rank = value;
        else
            throw CliError("unknown --select key: " + key);
    }
    return t;
}

struct CellResult {
    int index = 0;
    double lambda = 0.0, gamma = 0.0;
    int nnz = 0;
    int atoms = 0; // rank for baseline
    double objective = 0.0;
    double f1 = -1.0;
    double jaccard_min = -1.0;
    double jaccard_mean = -1.0;
    bool ok = false;
    std::string error;
};

// Supports of the leading eigenvectors thresholded at a fraction of each
// vector's largest magnitude; the baseline's latent-column estimate.
Atoms baseline_atoms(const Matrix& l, int top, double rel_threshold) {
    const int p = lvggm_matrix_dim(l.get());
    std::vector<double> vals(static_cast<size_t>(p));
    std::vector<double> vecs(static_cast<size_t>(p) * static_cast<size_t>(p));
    check(lvggm_matrix_eigen(l.get(), vals.data(), vecs.data()), "baseline eigenvectors");
    Atoms atoms = require_atoms(lvggm_atoms_create(p), "atoms create");
    for (int j = p - 1; j >= std::max(0, p - top); --j) {
        if (vals[size_t(j)] <= 0.0) break;
        double vmax = 0.0;
        for (int i = 0; i < p; ++i)
            vmax = std::max(vmax, std::abs(vecs[size_t(i) * size_t(p) + size_t(j)]));
        std::vector<int> support;
        std::vector<double> u;
        for (int i = 0; i < p; ++i) {
            const double v = vecs[size_t(i) * size_t(p) + size_t(j)];
            if (std::abs(v) > rel_threshold * vmax) {
                support.push_back(i);
                u.push_back(v);
            }
        }
        if (support.empty()) continue;
        double norm = 0.0;
        for (double v : u) norm += v * v;
        norm = std::sqrt(norm);
        for (double& v : u) v /= norm;
        check(lvggm_atoms_add(atoms.get(), support.data(), int(support.size()), u.data(),
                              vals[size_t(j)]),
              "atoms add");
    }
    return atoms;
}

void fill_truth_metrics(CellResult& r, const ModelFiles& truth, const Matrix& s,
                        const Atoms& atoms) {
    double precision = 0, recall = 0, f1 = 0;
    check(lvggm_support_metrics(s.get(), truth.truth_S.get(), default_threshold(s), &precision,
                                &recall, &f1),
          "support metrics");
    r.f1 = f1;
    if (truth.n_groups > 0) {
        std::vector<int> atom_for_group(static_cast<size_t>(truth.n_groups));
        std::vector<double> jac(static_cast<size_t>(truth.n_groups));
        check(lvggm_match_atoms(atoms.get(), truth.group_offsets.data(),
                                truth.group_members.data(), truth.n_groups,
                                atom_for_group.data(), jac.data()),
              "match atoms");
        r.jaccard_min = *std::min_element(jac.begin(), jac.end());
        r.jaccard_mean = 0.0;
        for (double v : jac) r.jaccard_mean += v;
        r.jaccard_mean /= truth.n_groups;
    }
}

std::string grid_csv(const std::vector<CellResult>& cells, bool baseline) {
    std::ostringstream out;
    out << "cell,lambda,gamma,nnz_S," << (baseline ? "rank_L" : "atoms")
        << ",objective,f1,jaccard_min,jaccard_mean,ok\n";
    for (const CellResult& r : cells) {
        out << r.index << "," << fmt(r.lambda) << "," << fmt(r.gamma) << "," << r.nnz << ","
            << r.atoms << "," << fmt(r.objective) << "," << fmt(r.f1) << ","
            << fmt(r.jaccard_min) << "," << fmt(r.jaccard_mean) << "," << (r.ok ? 1 : 0) << "\n";
    }
    return out.str();
}

} // namespace

int run_grid(const GridOptions& opt) {
    if (opt.out.empty()) throw CliError("--out directory is required");
    if (opt.lambdas.empty() || opt.gammas.empty())
        throw CliError("--lambdas and --gammas must be non-empty");
    ensure_dir(opt.out);
    const bool baseline = opt.algo == "baseline";
    if (!baseline && opt.algo != "fcg") throw CliError("unknown --algo (expected fcg|baseline)");

    Matrix sigma = require_matrix(lvggm_matrix_load(opt.input.c_str()), "load " + opt.input);
    const int dim = lvggm_matrix_dim(sigma.get());

    ModelFiles truth;
    const bool have_truth = !opt.truth.empty();
    if (have_truth) truth = load_truth(opt.truth);

    const int n_cells = int(opt.lambdas.size() * opt.gammas.size());
    std::vector<CellResult> cells(static_cast<size_t>(n_cells));

    auto fill_estimate_cell = [&](CellResult& r, const EstimateHandle& est) {
        Matrix s = require_matrix(lvggm_estimate_S(est.get()), "estimate S");
        Atoms atoms = require_atoms(lvggm_estimate_atoms(est.get()), "estimate atoms");
        r.nnz = offdiag_nnz(s, default_threshold(s));
        r.atoms = lvggm_atoms_count(atoms.get());
        const int n = lvggm_estimate_trace_len(est.get());
        if (n > 0) {
            std::vector<double> trace(static_cast<size_t>(n));
            check(lvggm_estimate_trace(est.get(), trace.data()), "trace");
            r.objective = trace.back();
        }
        if (have_truth) fill_truth_metrics(r, truth, s, atoms);
        r.ok = true;
    };

    if (baseline) {
        parallel_for(n_cells, [&](int idx) {
            CellResult r;
            r.index = idx;
            r.lambda = opt.lambdas[size_t(idx) / opt.gammas.size()];
            r.gamma = opt.gammas[size_t(idx) % opt.gammas.size()];
            try {
                lvggm_matrix *s_raw = nullptr, *l_raw = nullptr;
                check(lvggm_fit_baseline(sigma.get(), r.lambda, r.gamma, loss_of(opt.loss),
                                         opt.outer > 0 ? opt.outer : 50, &s_raw, &l_raw),
                      "baseline fit");
                Matrix s(s_raw), l(l_raw);
                r.nnz = offdiag_nnz(s, default_threshold(s));
                std::vector<double> vals(static_cast<size_t>(dim));
                check(lvggm_matrix_eigen(l.get(), vals.data(), nullptr), "eigenvalues");
                const double top = std::max(0.0, vals.back());
                int rank = 0;
                for (double v : vals) rank += v > 1e-6 * std::max(top, 1e-300);
                r.atoms = rank;
                double obj = 0.0;
                check(lvggm_loss_value(loss_of(opt.loss), s.get(), sigma.get(), &obj), "loss");
                r.objective = obj;
                if (have_truth) {
                    Atoms atoms = baseline_atoms(l, truth.n_groups, 1e-3);
                    fill_truth_metrics(r, truth, s, atoms);
                }
                r.ok = true;
            } catch (const std::exception& e) {
                r.ok = false;
                r.error = e.what();
            }
            cells[size_t(idx)] = std::move(r);
        });
    } else {
        // One warm-started descending-lambda sweep per gamma column; the
        // requested lambdas are checkpoints along the sweep.
        std::vector<int> order(opt.lambdas.size());
        for (size_t i = 0; i < opt.lambdas.size(); ++i) order[i] = int(i);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return opt.lambdas[size_t(a)] > opt.lambdas[size_t(b)]; });
        const double lam_max = opt.lambdas[size_t(order.front())];
        std::vector<double> path; // annealing prefix above the largest target
        for (double l = 8.0 * lam_max; l > lam_max * 1.0001; l *= 0.55) path.push_back(l);
        const size_t prefix = path.size();
        for (int i : order) path.push_back(opt.lambdas[size_t(i)]);

        parallel_for(int(opt.gammas.size()), [&](int col) {
            FitOptions fopt;
            fopt.loss = opt.loss;
            fopt.gamma = opt.gammas[size_t(col)];
            fopt.k = opt.k;
            fopt.weights = opt.weights;
            fopt.outer = opt.outer;
            fopt.max_atoms = opt.max_atoms;
            fopt.seed = cell_seed(opt.seed, uint64_t(col));
            std::vector<double> weight_storage;
            lvggm_solver_config cfg;
            std::string error;
            try {
                cfg = solver_config_from(fopt, dim, weight_storage);
            } catch (const std::exception& e) {
                error = e.what();
            }
            std::vector<lvggm_estimate*> raw(path.size(), nullptr);
            if (error.empty() &&
                lvggm_fit_path(sigma.get(), &cfg, path.data(), int(path.size()), raw.data()) !=
                    LVGGM_OK)
                error = lvggm_last_error();
            for (size_t t = 0; t < opt.lambdas.size(); ++t) {
                const int lam_idx = order[t];
                CellResult r;
                r.index = lam_idx * int(opt.gammas.size()) + col;
                r.lambda = opt.lambdas[size_t(lam_idx)];
                r.gamma = opt.gammas[size_t(col)];
                if (error.empty()) {
                    EstimateHandle est(raw[prefix + t]);
                    raw[prefix + t] = nullptr;
                    try {
                        fill_estimate_cell(r, est);
                    } catch (const std::exception& e) {
                        r.ok = false;
                        r.error = e.what();
                    }
                } else {
                    r.ok = false;
                    r.error = error;
                }
                cells[size_t(r.index)] = std::move(r);
            }
            for (lvggm_estimate* e : raw) lvggm_estimate_free(e);
        });
    }

    const fs::path dir(opt.out);
    write_text((dir / "grid.csv").string(), grid_csv(cells, baseline));

    // pick the feasible cell closest to the requested sparsity/atom targets
    int best = -1;
    if (!opt.select.empty()) {
        const SelectTargets targets = parse_select(opt.select);
        double best_score = std::numeric_limits<double>::infinity();
        for (const CellResult& r : cells) {
            if (!r.ok) continue;
            double score = 0.0;
            if (targets.nnz >= 0.0)
                score += std::abs(r.nnz - targets.nnz) / std::max(1.0, targets.nnz);
            const double atom_target = baseline ? targets.rank : targets.atoms;
            if (atom_target >= 0.0)
                score += std::abs(r.atoms - atom_target) / std::max(1.0, atom_target);
            if (score < best_score) {
                best_score = score;
                best = r.index;
            }
        }
        if (best >= 0) {
            const CellResult& r = cells[size_t(best)];
            nlohmann::json sel;
            sel["cell"] = r.index;
            sel["lambda"] = r.lambda;
            sel["gamma"] = r.gamma;
            sel["nnz_S"] = r.nnz;
            sel[baseline ? "rank_L" : "atoms"] = r.atoms;
            sel["f1"] = r.f1;
            sel["jaccard_min"] = r.jaccard_min;
            sel["score"] = best_score;
            write_text((dir / "selected.json").string(), sel.dump(2) + "\n");

            // re-run the selected cell and keep its artifacts
            ensure_dir((dir / "selected").string());
            if (baseline) {
                BaselineOptions bopt;
                bopt.input = opt.input;
                bopt.loss = opt.loss;
                bopt.lambda = r.lambda;
                bopt.gamma = r.gamma;
                bopt.iters = opt.outer > 0 ? opt.outer : 50;
                bopt.out = (dir / "selected").string();
                run_fit_baseline(bopt);
            } else {
                // reproduce the column sweep down to the selected lambda
                const int col = r.index % int(opt.gammas.size());
                FitOptions fopt;
                fopt.loss = opt.loss;
                fopt.lambda = r.lambda;
                fopt.gamma = r.gamma;
                fopt.k = opt.k;
                fopt.weights = opt.weights;
                fopt.outer = opt.outer;
                fopt.max_atoms = opt.max_atoms;
                fopt.seed = cell_seed(opt.seed, uint64_t(col));
                std::vector<double> weight_storage;
                const lvggm_solver_config cfg = solver_config_from(fopt, dim, weight_storage);
                // identical sweep to the grid column, truncated at the cell
                const double lam_max = *std::max_element(opt.lambdas.begin(), opt.lambdas.end());
                std::vector<double> path;
                for (double l = 8.0 * lam_max; l > lam_max * 1.0001; l *= 0.55)
                    path.push_back(l);
                std::vector<double> targets = opt.lambdas;
                std::sort(targets.begin(), targets.end(), std::greater<double>());
                for (double l : targets) {
                    path.push_back(l);
                    if (l == r.lambda) break;
                }
                std::vector<lvggm_estimate*> raw(path.size(), nullptr);
                check(lvggm_fit_path(sigma.get(), &cfg, path.data(), int(path.size()),
                                     raw.data()),
                      "selected cell refit");
                EstimateHandle est(raw.back());
                raw.back() = nullptr;
                for (lvggm_estimate* e : raw) lvggm_estimate_free(e);
                Matrix s = require_matrix(lvggm_estimate_S(est.get()), "estimate S");
                Atoms atoms = require_atoms(lvggm_estimate_atoms(est.get()), "estimate atoms");
                const fs::path sel = dir / "selected";
                check(lvggm_matrix_save(s.get(), (sel / "S.txt").c_str()), "S save");
                check(lvggm_atoms_save(atoms.get(), (sel / "atoms.json").c_str()), "atoms save");
                fopt.out = sel.string();
                write_text((sel / "estimate.json").string(),
                           estimate_json(est, fopt, lvggm_atoms_count(atoms.get())).dump(2) + "\n");
            }
        }
    }

    int failures = 0;
    for (const CellResult& r : cells) failures += !r.ok;
    std::cout << "grid: " << n_cells << " cells (" << failures << " failed) -> " << opt.out
              << (best >= 0 ? " (selected cell " + std::to_string(best) + ")" : "") << "\n";
    return failures == 0 ? 0 : 1;
}

int run_certify(const CertifyOptions& opt) {
    Matrix s_star;
    Atoms blocks;
    int orientation = opt.orientation == "sum" ? 0 : 1;
    if (!opt.truth.empty()) {
        ModelFiles truth = load_truth(opt.truth);
        s_star = std::move(truth.truth_S);
        blocks = std::move(truth.truth_blocks);
    } else {
        if (opt.s_star.empty() || opt.blocks.empty())
            throw CliError("either --truth or both --s-star and --blocks are required");
        s_star = require_matrix(lvggm_matrix_load(opt.s_star.c_str()), "load " + opt.s_star);
        blocks = require_atoms(lvggm_atoms_load(opt.blocks.c_str()), "load " + opt.blocks);
    }

    const int n_blocks = lvggm_atoms_count(blocks.get());
    if (n_blocks == 0) throw CliError("no blocks to certify");
    int k = opt.k;
    if (k <= 0) {
        k = lvggm_atoms_support_size(blocks.get(), 0);
        for (int b = 1; b < n_blocks; ++b)
            if (lvggm_atoms_support_size(blocks.get(), b) != k)
                throw CliError("blocks have different sizes; pass --k explicitly");
    }

    double gamma = opt.gamma;
    if (gamma <= 0.0) {
        lvggm_constants tc;
        check(lvggm_theorem_constants(s_star.get(), blocks.get(), 1, &tc), "theorem constants");
        gamma = tc.gamma_thm2;
        if (!(gamma > 0.0) || !std::isfinite(gamma))
            throw CliError("no usable gamma from the theorem constants; pass --gamma");
    }

    char* json = nullptr;
    int pass = 0;
    check(lvggm_certify(s_star.get(), blocks.get(), gamma, k, orientation, opt.restarts, opt.seed,
                        &json, &pass),
          "certificate construction");
    const std::string report(json);
    lvggm_string_free(json);

    if (!opt.out.empty()) write_text(opt.out, report + "\n");
    std::cout << "certify: gamma=" << fmt(gamma) << " k=" << k << " pass=" << (pass ? "true" : "false")
              << (opt.out.empty() ? "" : " -> " + opt.out) << "\n";
    return pass ? 0 : 1;
}

int run_eval(const EvalOptions& opt) {
    const fs::path est_dir(opt.estimate);
    Matrix s = require_matrix(lvggm_matrix_load((est_dir / "S.txt").c_str()), "load estimate S");
    Atoms atoms =
        require_atoms(lvggm_atoms_load((est_dir / "atoms.json").c_str()), "load estimate atoms");
    ModelFiles truth = load_truth(opt.truth);

    const double threshold = opt.threshold >= 0.0 ? opt.threshold : default_threshold(s);
    double precision = 0, recall = 0, f1 = 0;
    check(lvggm_support_metrics(s.get(), truth.truth_S.get(), threshold, &precision, &recall, &f1),
          "support metrics");

    std::vector<int> atom_for_group(static_cast<size_t>(truth.n_groups));
    std::vector<double> jac(static_cast<size_t>(truth.n_groups));
    check(lvggm_match_atoms(atoms.get(), truth.group_offsets.data(), truth.group_members.data(),
                            truth.n_groups, atom_for_group.data(), jac.data()),
          "match atoms");

    std::ostringstream csv;
    csv << "threshold,precision,recall,f1,atoms";
    for (int g = 0; g < truth.n_groups; ++g) csv << ",jaccard_g" << g;
    csv << "\n";
    csv << fmt(threshold) << "," << fmt(precision) << "," << fmt(recall) << "," << fmt(f1) << ","
        << lvggm_atoms_count(atoms.get());
    for (int g = 0; g < truth.n_groups; ++g) csv << "," << fmt(jac[size_t(g)]);
    csv << "\n";

    if (!opt.out.empty())
        write_text(opt.out, csv.str());
    else
        std::cout << csv.str();
    return 0;
}

int run_render(const RenderOptions& opt) {
    if (opt.out.empty()) throw CliError("--out file is required");
    Matrix m;
    int latent = opt.latent;
    if (!opt.estimate.empty()) {
        const fs::path dir(opt.estimate);
        Matrix s = require_matrix(lvggm_matrix_load((dir / "S.txt").c_str()), "load estimate S");
        Atoms atoms =
            require_atoms(lvggm_atoms_load((dir / "atoms.json").c_str()), "load estimate atoms");
        m = require_matrix(lvggm_reconstruct_complete(s.get(), atoms.get()), "reconstruction");
        latent = lvggm_atoms_count(atoms.get());
    } else {
        if (opt.input.empty()) throw CliError("either --input or --estimate is required");
        m = require_matrix(lvggm_matrix_load(opt.input.c_str()), "load " + opt.input);
    }
    write_heatmap_svg(opt.out, matrix_data(m), lvggm_matrix_dim(m.get()), latent);
    std::cout << "render: " << lvggm_matrix_dim(m.get()) << "x" << lvggm_matrix_dim(m.get())
              << " heatmap -> " << opt.out << "\n";
    return 0;
}

int run_pipeline(const std::string& config_path) {
    const Config cfg = Config::parse_file(config_path);
    const std::string out_dir = cfg.get_string("out", "artifacts");
    ensure_dir(out_dir);
    const fs::path dir(out_dir);
    int rc = 0;

    std::string sigma_path = cfg.get_string("input", "");
    std::string truth_dir = cfg.get_string("truth", "");

    if (cfg.has_table("synth")) {
        SynthOptions opt;
        opt.model = cfg.get_string("synth.model", "tree3");
        opt.seed = std::uint64_t(cfg.get_int("synth.seed", 0));
        opt.samples = cfg.get_int("synth.samples", 0);
        opt.ridge = cfg.get_double("synth.ridge", -1.0);
        opt.min_eig = cfg.get_double("synth.min_eig", 0.0);
        opt.out = (dir / "model").string();
        rc = std::max(rc, run_synth(opt));
        sigma_path = (dir / "model" / "sigma.txt").string();
        truth_dir = (dir / "model").string();
    }

    if (cfg.has_table("fit")) {
        FitOptions opt;
        opt.input = cfg.get_string("fit.input", sigma_path);
        opt.loss = cfg.get_string("fit.loss", "sm");
        opt.lambda = cfg.get_double("fit.lambda", 0.1);
        opt.gamma = cfg.get_double("fit.gamma", 1.0);
        opt.k = cfg.get_int("fit.k", 0);
        opt.weights = cfg.get_string("fit.weights", "");
        opt.outer = cfg.get_int("fit.outer", 0);
        opt.ista = cfg.get_int("fit.ista", 0);
        opt.max_atoms = cfg.get_int("fit.max_atoms", 0);
        opt.seed = std::uint64_t(cfg.get_int("fit.seed", 0));
        opt.out = (dir / "fit").string();
        rc = std::max(rc, run_fit(opt));
    }

    if (cfg.has_table("grid")) {
        GridOptions opt;
        opt.input = cfg.get_string("grid.input", sigma_path);
        opt.truth = cfg.get_string("grid.truth", truth_dir);
        opt.algo = cfg.get_string("grid.algo", "fcg");
        opt.loss = cfg.get_string("grid.loss", "sm");
        opt.lambdas = cfg.get_doubles("grid.lambdas");
        opt.gammas = cfg.get_doubles("grid.gammas");
        opt.k = cfg.get_int("grid.k", 0);
        opt.weights = cfg.get_string("grid.weights", "");
        opt.select = cfg.get_string("grid.select", "");
        opt.outer = cfg.get_int("grid.outer", 0);
        opt.max_atoms = cfg.get_int("grid.max_atoms", 0);
        opt.seed = std::uint64_t(cfg.get_int("grid.seed", 0));
        opt.out = (dir / (opt.algo == "baseline" ? "grid-baseline" : "grid")).string();
        rc = std::max(rc, run_grid(opt));
    }

    if (cfg.has_table("certify")) {
        CertifyOptions opt;
        opt.truth = cfg.get_string("certify.truth", truth_dir);
        opt.gamma = cfg.get_double("certify.gamma", 0.0);
        opt.k = cfg.get_int("certify.k", 0);
        opt.orientation = cfg.get_string("certify.orientation", "solver");
        opt.restarts = cfg.get_int("certify.restarts", 50);
        opt.seed = std::uint64_t(cfg.get_int("certify.seed", 0));
        opt.out = (dir / "certificate.json").string();
        rc = std::max(rc, run_certify(opt));
    }

    if (cfg.has_table("eval")) {
        EvalOptions opt;
        opt.estimate = cfg.get_string("eval.estimate", (dir / "fit").string());
        opt.truth = cfg.get_string("eval.truth", truth_dir);
        opt.threshold = cfg.get_double("eval.threshold", -1.0);
        opt.out = (dir / "metrics.csv").string();
        rc = std::max(rc, run_eval(opt));
    }

    if (cfg.has_table("render")) {
        RenderOptions opt;
        opt.input = cfg.get_string("render.input", "");
        opt.estimate = cfg.get_string("render.estimate",
                                      opt.input.empty() ? (dir / "fit").string() : "");
        opt.latent = cfg.get_int("render.latent", 0);
        opt.out = (dir / "figure.svg").string();
        rc = std::max(rc, run_render(opt));
    }

    return rc;
}

} // namespace cli
