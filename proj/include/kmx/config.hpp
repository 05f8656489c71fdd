#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kmx/collision.hpp"
#include "kmx/norms.hpp"
#include "kmx/solver.hpp"

namespace kmx {

enum class RunMode { march, picard, lemmas, kernel, bench };

/// Fully resolved scenario configuration (sectioned key = value text file).
struct ScenarioConfig {
    std::uint64_t seed = 1;

    // [grid]
    double extent = 6.0;
    int nodes = 15;
    std::string x_mode = "homogeneous";  // homogeneous | slab1d
    double slab_length = 1.0;
    int x_nodes = 1;

    // [physics]
    CollisionParams params;

    // [quadrature]
    int n_theta = 4;
    int n_phi = 8;

    // [run]
    RunMode mode = RunMode::march;
    double dt = 0.01;
    double total_time = 0.5;
    double t_star = 0.1;
    double tol = 1e-9;
    int n_max = 12;
    std::string scheme = "nu_integrator";
    int time_steps = 8;

    // [norms]
    std::vector<NormSpec> norms;

    // [data]
    InitialDataSpec init;

    // [output]
    std::string out_dir = "out";
    int snapshot_stride = 0;
    int smallness_stride = 0;

    // [lemmas]
    int lemma_samples = 64;
    std::string lemma_family = "maxwellian_modulated";
    double lemma_r = 4.0;
    double lemma_l = 3.0;
    double lemma_low_r = 1.2;
    double lemma_low_l = 2.0;
    double lemma_n = 4.0;
    double lemma_eta = 0.1;
    int lemma_refine_nodes = 21;
    int nu_refine_nodes = 26;

    // [kernel]
    int kernel_nodes = 13;
    std::vector<double> kernel_l_values{0.0, 3.0, 5.0, -2.0};
    std::size_t kernel_cap = 4096;

    // [bench]
    int bench_n1 = 17;
    int bench_n2 = 25;
    int bench_n_theta = 4;
    int bench_n_phi = 8;
    int bench_threads = 2;

    // CLI-level knobs
    int threads = 1;
    bool deterministic = false;

    ParameterReport param_report;  // for the leading norm spec

    EvalOptions eval_options() const { return EvalOptions{threads, deterministic}; }
};

/// Parses and validates; throws ConfigError listing every violation, not
/// just the first. Required keys: [grid] R, N and [run] mode; everything
/// else defaults.
ScenarioConfig parse_config(const std::string& path);

/// Resolved-config text (echoed into every run's outputs).
std::string echo_config(const ScenarioConfig& cfg);

RunMode parse_run_mode(const std::string& name);

}  // namespace kmx
