#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Latent-variable Gaussian graphical model estimation with sparse rank-one factors"};
    app.require_subcommand(1);

    cli::SynthOptions synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a ground-truth model and samples");
    synth_cmd->add_option("--model", synth.model, "tree3|tree3u|tree4o|er")->capture_default_str();
    synth_cmd->add_option("--seed", synth.seed, "RNG seed");
    synth_cmd->add_option("--samples", synth.samples, "sample count (default: 50p, or 2000 for er)");
    synth_cmd->add_option("--ridge", synth.ridge, "diagonal ridge added to K");
    synth_cmd->add_option("--min-eig", synth.min_eig, "smallest acceptable eigenvalue of K");
    synth_cmd->add_option("--out", synth.out, "output directory")->required();

    cli::FitOptions fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit the sparse + sparse-factor decomposition");
    fit_cmd->add_option("--input", fit.input, "covariance matrix file")->required();
    fit_cmd->add_option("--loss", fit.loss, "sm|taylor")->capture_default_str();
    fit_cmd->add_option("--lambda", fit.lambda, "overall penalty weight")->capture_default_str();
    fit_cmd->add_option("--gamma", fit.gamma, "l1 weight relative to the gauge")->capture_default_str();
    fit_cmd->add_option("--k", fit.k, "factor sparsity budget");
    fit_cmd->add_option("--weights", fit.weights, "per-level weight family (sqrt)");
    fit_cmd->add_option("--outer", fit.outer, "outer iterations");
    fit_cmd->add_option("--ista", fit.ista, "ISTA steps per outer iteration");
    fit_cmd->add_option("--max-atoms", fit.max_atoms, "active-set cap");
    fit_cmd->add_option("--restarts", fit.restarts, "TPI random restarts");
    fit_cmd->add_option("--fw-tol", fit.fw_tol, "column-generation gap tolerance");
    fit_cmd->add_option("--seed", fit.seed, "RNG seed");
    fit_cmd->add_option("--out", fit.out, "output directory")->required();

    cli::BaselineOptions baseline;
    auto* base_cmd = app.add_subcommand("fit-baseline", "Fit the l1 + trace-norm baseline");
    base_cmd->add_option("--input", baseline.input, "covariance matrix file")->required();
    base_cmd->add_option("--loss", baseline.loss, "sm|taylor")->capture_default_str();
    base_cmd->add_option("--lambda", baseline.lambda, "overall penalty weight")->capture_default_str();
    base_cmd->add_option("--gamma", baseline.gamma, "l1 weight")->capture_default_str();
    base_cmd->add_option("--iters", baseline.iters, "outer iterations")->capture_default_str();
    base_cmd->add_option("--out", baseline.out, "output directory")->required();

    cli::GridOptions grid;
    auto* grid_cmd = app.add_subcommand("grid", "Hyperparameter grid search");
    grid_cmd->add_option("--input", grid.input, "covariance matrix file")->required();
    grid_cmd->add_option("--truth", grid.truth, "ground-truth directory for metrics");
    grid_cmd->add_option("--algo", grid.algo, "fcg|baseline")->capture_default_str();
    grid_cmd->add_option("--loss", grid.loss, "sm|taylor")->capture_default_str();
    grid_cmd->add_option("--lambdas", grid.lambdas, "lambda values")->required()->delimiter(',');
    grid_cmd->add_option("--gammas", grid.gammas, "gamma values")->required()->delimiter(',');
    grid_cmd->add_option("--k", grid.k, "factor sparsity budget");
    grid_cmd->add_option("--weights", grid.weights, "per-level weight family (sqrt)");
    grid_cmd->add_option("--select", grid.select, "targets, e.g. nnz=88,atoms=3");
    grid_cmd->add_option("--outer", grid.outer, "outer iterations per cell");
    grid_cmd->add_option("--max-atoms", grid.max_atoms, "active-set cap");
    grid_cmd->add_option("--seed", grid.seed, "base seed (cells derive their own)");
    grid_cmd->add_option("--out", grid.out, "output directory")->required();

    cli::CertifyOptions certify;
    auto* cert_cmd = app.add_subcommand("certify", "Build and check the identifiability dual");
    cert_cmd->add_option("--truth", certify.truth, "ground-truth directory");
    cert_cmd->add_option("--s-star", certify.s_star, "sparse part matrix file");
    cert_cmd->add_option("--blocks", certify.blocks, "blocks JSON file");
    cert_cmd->add_option("--gamma", certify.gamma, "l1 weight (default: theorem value)");
    cert_cmd->add_option("--k", certify.k, "block size (default: from the blocks)");
    cert_cmd->add_option("--orientation", certify.orientation, "solver|sum")->capture_default_str();
    cert_cmd->add_option("--restarts", certify.restarts, "TPI restarts for the subset check");
    cert_cmd->add_option("--seed", certify.seed, "RNG seed");
    cert_cmd->add_option("--out", certify.out, "report JSON path");

    cli::EvalOptions eval;
    auto* eval_cmd = app.add_subcommand("eval", "Score an estimate against a ground truth");
    eval_cmd->add_option("--estimate", eval.estimate, "estimate directory")->required();
    eval_cmd->add_option("--truth", eval.truth, "ground-truth directory")->required();
    eval_cmd->add_option("--threshold", eval.threshold, "support threshold (default: relative)");
    eval_cmd->add_option("--out", eval.out, "metrics CSV path (default: stdout)");

    cli::RenderOptions render;
    auto* render_cmd = app.add_subcommand("render", "SVG heatmap of a matrix or an estimate");
    render_cmd->add_option("--input", render.input, "matrix file");
    render_cmd->add_option("--estimate", render.estimate, "estimate directory (complete matrix)");
    render_cmd->add_option("--latent", render.latent, "latent row/column count for separators");
    render_cmd->add_option("--out", render.out, "SVG path")->required();

    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "Execute a configured pipeline");
    run_cmd->add_option("config", config_path, "configuration file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth_cmd->parsed()) return cli::run_synth(synth);
        if (fit_cmd->parsed()) return cli::run_fit(fit);
        if (base_cmd->parsed()) return cli::run_fit_baseline(baseline);
        if (grid_cmd->parsed()) return cli::run_grid(grid);
        if (cert_cmd->parsed()) return cli::run_certify(certify);
        if (eval_cmd->parsed()) return cli::run_eval(eval);
        if (render_cmd->parsed()) return cli::run_render(render);
        if (run_cmd->parsed()) return cli::run_pipeline(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
