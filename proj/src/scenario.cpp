#include "kmx/scenario.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "kmx/io.hpp"
#include "kmx/lemma_lab.hpp"
#include "kmx/linearized.hpp"
#include "kmx/scenario.hpp"

namespace kmx {

namespace {

namespace fs = std::filesystem;

SampleKind parse_family(const std::string& name) {
    if (name == "maxwellian_modulated") return SampleKind::maxwellian_modulated;
    if (name == "compact_bump") return SampleKind::compact_bump;
    return SampleKind::random_positive;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string stability_json(const ConstantReport& a, const ConstantReport& b) {
    nlohmann::json j;
    j["at_grid"] = nlohmann::json::parse(to_json(a));
    j["at_refined_grid"] = nlohmann::json::parse(to_json(b));
    const double drift =
        a.max_ratio > 0.0 ? std::abs(b.max_ratio - a.max_ratio) / a.max_ratio : 0.0;
    j["stability_drift"] = drift;
    j["stable_within_20pct"] = drift <= 0.20;
    return j.dump(2);
}

int run_march_mode(const ScenarioConfig& cfg) {
    MarchRunConfig mc;
    mc.xgrid = std::make_shared<const SpatialGrid>(
        cfg.x_mode == "slab1d" ? SpatialGrid::slab1d(cfg.slab_length, cfg.x_nodes)
                               : SpatialGrid::homogeneous());
    mc.vgrid = build_velocity_grid(cfg.extent, cfg.nodes);
    mc.sphere = build_sphere_quadrature(cfg.n_theta, cfg.n_phi);
    mc.params = cfg.params;
    mc.init = cfg.init;
    mc.dt = cfg.dt;
    mc.steps = static_cast<int>(std::llround(cfg.total_time / cfg.dt));
    mc.options.scheme = cfg.scheme == "g_integrator" ? MarchScheme::g_integrator
                                                     : MarchScheme::nu_integrator;
    mc.options.eval = cfg.eval_options();
    mc.norms = cfg.norms;
    mc.smallness_stride = cfg.smallness_stride;
    mc.t_star = cfg.t_star;

    Trajectory traj = run_march(mc);
    const fs::path out(cfg.out_dir);
    write_diagnostics_csv((out / "diagnostics.csv").string(), traj.records, cfg.norms,
                          echo_config(cfg));
    if (cfg.snapshot_stride > 0) {
        for (std::size_t k = 0; k < traj.fields.size(); k += cfg.snapshot_stride) {
            std::ostringstream name;
            name << "snapshot_" << k << ".kmx";
            write_snapshot((out / name.str()).string(), traj.fields[k], traj.time(k),
                           cfg.params.gamma);
        }
    }
    write_snapshot((out / "final.kmx").string(), traj.fields.back(),
                   traj.time(traj.fields.size() - 1), cfg.params.gamma);
    if (traj.aborted) {
        write_text((out / "ABORTED").string(),
                   "non-finite values at step " + std::to_string(traj.abort_step) +
                       "; last good step " + std::to_string(traj.fields.size() - 1) + "\n");
        return 3;
    }
    return 0;
}

int run_picard_mode(const ScenarioConfig& cfg) {
    PicardRunConfig pc;
    pc.xgrid = std::make_shared<const SpatialGrid>(
        cfg.x_mode == "slab1d" ? SpatialGrid::slab1d(cfg.slab_length, cfg.x_nodes)
                               : SpatialGrid::homogeneous());
    pc.vgrid = build_velocity_grid(cfg.extent, cfg.nodes);
    pc.sphere = build_sphere_quadrature(cfg.n_theta, cfg.n_phi);
    pc.params = cfg.params;
    pc.init = cfg.init;
    pc.t_star = cfg.t_star;
    pc.time_steps = cfg.time_steps;
    pc.tol = cfg.tol;
    pc.n_max = cfg.n_max;
    pc.norm_r = cfg.norms[0].r;
    pc.norm_l = cfg.norms[0].l;
    pc.eval = cfg.eval_options();

    PicardReport rep = run_picard(pc);
    const fs::path out(cfg.out_dir);
    nlohmann::json j = nlohmann::json::parse(to_json(rep));
    j["config_echo"] = echo_config(cfg);
    write_text((out / "picard_report.json").string(), j.dump(2));
    write_diagnostics_csv((out / "picard_trajectory.csv").string(), rep.trajectory.records, {},
                          echo_config(cfg));
    for (std::size_t k = 0; k < rep.trajectory.fields.size(); ++k) {
        std::ostringstream name;
        name << "picard_" << k << ".kmx";
        write_snapshot((out / name.str()).string(), rep.trajectory.fields[k],
                       rep.trajectory.time(k), cfg.params.gamma);
    }
    return 0;
}

int run_lemmas_mode(const ScenarioConfig& cfg) {
    const fs::path out(cfg.out_dir);
    auto sphere = build_sphere_quadrature(cfg.n_theta, cfg.n_phi);
    auto grid_a = build_velocity_grid(cfg.extent, cfg.nodes);
    auto grid_b = build_velocity_grid(cfg.extent, cfg.lemma_refine_nodes);
    SampleFamily family{parse_family(cfg.lemma_family), cfg.lemma_samples, cfg.seed};
    const EvalOptions eval = cfg.eval_options();

    {
        auto a = estimate_gain_constant(family, cfg.lemma_r, cfg.lemma_l, cfg.params, grid_a,
                                        *sphere, eval);
        auto b = estimate_gain_constant(family, cfg.lemma_r, cfg.lemma_l, cfg.params, grid_b,
                                        *sphere, eval);
        write_text((out / "lemma_gain.json").string(), stability_json(a, b));
    }
    {
        auto a = estimate_gain_constant_lowr(family, cfg.lemma_low_r, cfg.lemma_low_l, cfg.params,
                                             grid_a, *sphere, eval);
        auto b = estimate_gain_constant_lowr(family, cfg.lemma_low_r, cfg.lemma_low_l, cfg.params,
                                             grid_b, *sphere, eval);
        write_text((out / "lemma_gain_lowr.json").string(), stability_json(a, b));
    }
    {
        nlohmann::json j;
        for (double eta : {cfg.lemma_eta, 0.01}) {
            auto a = estimate_nonlinear_bounds(family, cfg.lemma_r, cfg.lemma_l, cfg.lemma_n, eta,
                                               cfg.params, grid_a, *sphere, eval);
            auto b = estimate_nonlinear_bounds(family, cfg.lemma_r, cfg.lemma_l, cfg.lemma_n, eta,
                                               cfg.params, grid_b, *sphere, eval);
            nlohmann::json jt;
            jt["loss"] = nlohmann::json::parse(stability_json(a.loss, b.loss));
            jt["gain"] = nlohmann::json::parse(stability_json(a.gain, b.gain));
            j[eta == cfg.lemma_eta ? "eta_primary" : "eta_small"] = jt;
        }
        j["config_echo"] = echo_config(cfg);
        write_text((out / "lemma_nonlinear.json").string(), j.dump(2));
    }
    {
        nlohmann::json j = nlohmann::json::array();
        for (double gamma : {0.0, 0.5, 1.0}) {
            auto rep = estimate_nu_growth(gamma, cfg.params.cb, cfg.extent, cfg.nodes,
                                          cfg.nu_refine_nodes, eval);
            j.push_back(nlohmann::json::parse(to_json(rep)));
        }
        write_text((out / "nu_growth.json").string(), j.dump(2));
    }
    return 0;
}

int run_kernel_mode(const ScenarioConfig& cfg) {
    const fs::path out(cfg.out_dir);
    auto grid = build_velocity_grid(cfg.extent, cfg.kernel_nodes);
    auto sphere = build_sphere_quadrature(cfg.n_theta, cfg.n_phi);
    KernelMatrix K =
        extract_kernel_matrix(grid, cfg.params, *sphere, cfg.eval_options(), cfg.kernel_cap);
    write_kernel_matrix((out / "kernel_matrix.kmx").string(), K, cfg.params);
    nlohmann::json j;
    j["symmetry_defect"] = K.symmetry_defect();
    nlohmann::json reports = nlohmann::json::array();
    for (double l : cfg.kernel_l_values) {
        KernelBoundReport rep = check_kernel_bounds(K, l);
        reports.push_back(nlohmann::json::parse(to_json(rep)));
    }
    j["bounds"] = reports;
    j["config_echo"] = echo_config(cfg);
    write_text((out / "kernel_bounds.json").string(), j.dump(2));
    return 0;
}

}  // namespace

BenchReport bench_collision(const ScenarioConfig& cfg) {
    BenchReport rep;
    rep.threads = cfg.bench_threads;
    auto sphere = build_sphere_quadrature(cfg.bench_n_theta, cfg.bench_n_phi);
    auto sphere2 = build_sphere_quadrature(cfg.bench_n_theta, 2 * cfg.bench_n_phi);

    auto time_gain = [&](int n, const SphereQuadrature& sq, const EvalOptions& eval,
                         std::uint64_t* hash) {
        auto grid = build_velocity_grid(cfg.extent, n);
        GridFunction f = sqrt_maxwellian(grid);
        const auto t0 = std::chrono::steady_clock::now();
        GridFunction r = gamma_gain(f, f, cfg.params, sq, eval);
        const double secs = seconds_since(t0);
        if (hash) *hash = field_hash(r.values());
        return secs;
    };

    EvalOptions fixed{1, true};  // order-fixed reduction, single worker
    rep.seconds_n1 = time_gain(cfg.bench_n1, *sphere, fixed, &rep.hash_n1);
    rep.seconds_n2 = time_gain(cfg.bench_n2, *sphere, fixed, nullptr);
    rep.seconds_nphi_doubled = time_gain(cfg.bench_n1, *sphere2, fixed, nullptr);
    EvalOptions threaded{cfg.bench_threads, true};
    time_gain(cfg.bench_n1, *sphere, threaded, &rep.hash_n1_threads);
    rep.hashes_match = rep.hash_n1 == rep.hash_n1_threads;
    rep.time_ratio_grids = rep.seconds_n2 / rep.seconds_n1;
    rep.predicted_ratio_grids = std::pow(static_cast<double>(cfg.bench_n2) / cfg.bench_n1, 6.0);
    rep.time_ratio_nphi = rep.seconds_nphi_doubled / rep.seconds_n1;
    const double n1_nodes = std::pow(static_cast<double>(cfg.bench_n1), 3.0);
    rep.nodes_per_second_n1 = n1_nodes / rep.seconds_n1;
    return rep;
}

int run_scenario(const ScenarioConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    write_text((std::filesystem::path(cfg.out_dir) / "config_echo.ini").string(),
               echo_config(cfg));
    write_text((std::filesystem::path(cfg.out_dir) / "parameter_report.json").string(),
               to_json(cfg.param_report));
    switch (cfg.mode) {
        case RunMode::march:
            return run_march_mode(cfg);
        case RunMode::picard:
            return run_picard_mode(cfg);
        case RunMode::lemmas:
            return run_lemmas_mode(cfg);
        case RunMode::kernel:
            return run_kernel_mode(cfg);
        case RunMode::bench: {
            BenchReport rep = bench_collision(cfg);
            nlohmann::json j;
            j["seconds_n1"] = rep.seconds_n1;
            j["seconds_n2"] = rep.seconds_n2;
            j["seconds_nphi_doubled"] = rep.seconds_nphi_doubled;
            j["time_ratio_grids"] = rep.time_ratio_grids;
            j["predicted_ratio_grids"] = rep.predicted_ratio_grids;
            j["time_ratio_nphi"] = rep.time_ratio_nphi;
            j["nodes_per_second_n1"] = rep.nodes_per_second_n1;
            j["hash_n1"] = rep.hash_n1;
            j["hash_n1_threads"] = rep.hash_n1_threads;
            j["hashes_match"] = rep.hashes_match;
            j["threads"] = rep.threads;
            j["config_echo"] = echo_config(cfg);
            write_text((std::filesystem::path(cfg.out_dir) / "bench.json").string(), j.dump(2));
            return 0;
        }
    }
    return 0;
}

}  // namespace kmx
