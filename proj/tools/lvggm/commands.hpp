#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cli {

struct SynthOptions {
    std::string model = "tree3";
    std::uint64_t seed = 0;
    int samples = 0; // 0 -> model default
    double ridge = -1.0;
    double min_eig = 0.0;
    std::string out;
};

struct FitOptions {
    std::string input;
    std::string loss = "sm";
    double lambda = 0.1;
    double gamma = 1.0;
    int k = 0;
    std::string weights; // "sqrt" selects the weighted gauge
    int outer = 0;
    int ista = 0;
    int max_atoms = 0;
    int restarts = 0;
    double fw_tol = 0.0;
    std::uint64_t seed = 0;
    std::string out;
};

struct BaselineOptions {
    std::string input;
    std::string loss = "sm";
    double lambda = 0.1;
    double gamma = 1.0;
    int iters = 50;
    std::string out;
};

struct GridOptions {
    std::string input;
    std::string truth; // directory with K.txt + structure.json, optional
    std::string algo = "fcg"; // or "baseline"
    std::string loss = "sm";
    std::vector<double> lambdas;
    std::vector<double> gammas;
    int k = 0;
    std::string weights;
    std::string select; // e.g. "nnz=88,atoms=3"
    int outer = 0;
    int max_atoms = 0;
    std::uint64_t seed = 0;
    std::string out;
};

struct CertifyOptions {
    std::string truth;       // model directory
    std::string s_star;      // or explicit files
    std::string blocks;
    double gamma = 0.0;      // 0 -> the multi-block theorem value
    int k = 0;               // 0 -> block size
    std::string orientation = "solver"; // or "sum"
    int restarts = 50;
    std::uint64_t seed = 0;
    std::string out;
};

struct EvalOptions {
    std::string estimate; // directory with S.txt + atoms.json
    std::string truth;    // model directory
    double threshold = -1.0; // <0 -> 1e-6 * max|S|
    std::string out;
};

struct RenderOptions {
    std::string input;    // matrix file, or
    std::string estimate; // estimate directory -> render the complete matrix
    int latent = 0;
    std::string out;
};

int run_synth(const SynthOptions& opt);
int run_fit(const FitOptions& opt);
int run_fit_baseline(const BaselineOptions& opt);
int run_grid(const GridOptions& opt);
int run_certify(const CertifyOptions& opt);
int run_eval(const EvalOptions& opt);
int run_render(const RenderOptions& opt);
int run_pipeline(const std::string& config_path);

} // namespace cli
