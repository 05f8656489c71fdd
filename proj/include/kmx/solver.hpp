#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "kmx/collision.hpp"
#include "kmx/diagnostics.hpp"
#include "kmx/grid.hpp"
#include "kmx/norms.hpp"

namespace kmx {

enum class MarchScheme { nu_integrator, g_integrator };

enum class InitKind { zero, gaussian_bump, two_temperature, random_smooth };

struct InitialDataSpec {
    InitKind kind = InitKind::zero;
    double amplitude = 0.0;
    Vec3 center{0.0, 0.0, 0.0};  // gaussian_bump
    double width = 1.0;          // gaussian_bump
    double x_modulation = 0.0;   // slab-mode spatial modulation depth
    double temp1 = 0.8;          // two_temperature (both < 1 so f decays)
    double temp2 = 0.5;
    std::uint64_t seed = 1;
};

/// Deterministic initial perturbation with F0 = mu + sqrt(mu) f0 >= 0
/// enforced; amplitude is scaled down (with a warning flag) if the requested
/// one would break positivity.
struct InitialDataResult {
    DistributionField f0;
    bool clamped = false;
    double amplitude_used = 0.0;
};
InitialDataResult build_initial_data(const InitialDataSpec& spec,
                                     std::shared_ptr<const SpatialGrid> xgrid,
                                     std::shared_ptr<const VelocityGrid> vgrid);

/// Characteristic shift f(x,v) -> f(x - v1 dt, v), periodic linear
/// interpolation in x; identity in homogeneous mode.
DistributionField free_stream(const DistributionField& f, double dt);

/// Uniform-step trajectory with per-step diagnostics.
struct Trajectory {
    double dt = 0.0;
    std::vector<DistributionField> fields;
    std::vector<DiagnosticsRecord> records;
    bool aborted = false;
    int abort_step = -1;
    double time(std::size_t k) const { return dt * k; }
};

struct MarchOptions {
    MarchScheme scheme = MarchScheme::nu_integrator;
    double dt_cap_factor = 0.5;      // dt must be <= factor / max(nu)
    bool disable_collision = false;  // pure damped streaming (testing hook)
    EvalOptions eval;
};

/// One exponential-integrator step of the mild form; the Duhamel integral is
/// collapsed to a one-point right-endpoint rule in the elapsed-time variable.
DistributionField march_step(const DistributionField& state, double dt,
                             const CollisionParams& params, const SphereQuadrature& sphere,
                             const MarchOptions& opts = {});

struct MarchRunConfig {
    std::shared_ptr<const SpatialGrid> xgrid;
    std::shared_ptr<const VelocityGrid> vgrid;
    std::shared_ptr<const SphereQuadrature> sphere;
    CollisionParams params;
    InitialDataSpec init;
    double dt = 0.01;
    int steps = 10;
    MarchOptions options;
    std::vector<NormSpec> norms;
    int smallness_stride = 0;  // 0 = never evaluate the smallness functionals
    double t_star = 0.1;
};

/// Marches `steps` steps recording diagnostics; aborts (recording the last
/// good step) if values stop being finite.
Trajectory run_march(const MarchRunConfig& config);

struct PicardRunConfig {
    std::shared_ptr<const SpatialGrid> xgrid;
    std::shared_ptr<const VelocityGrid> vgrid;
    std::shared_ptr<const SphereQuadrature> sphere;
    CollisionParams params;
    InitialDataSpec init;
    double t_star = 0.1;
    int time_steps = 8;  // stored grid t_k = k T*/time_steps
    double tol = 1e-9;
    int n_max = 12;
    double norm_r = 2.0;  // distances in ||w^(l/2) . ||_{L^r_v L^inf_x}, sup over t_k
    double norm_l = 3.0;
    EvalOptions eval;
};

/// Successive-substitution report for the damped mild form on [0, T*].
struct PicardReport {
    int iterations = 0;
    bool converged = false;
    bool non_contraction_reported = false;  // d_n grew 3 times in a row
    std::vector<double> distances;          // d_n per iteration
    std::vector<double> ratios;             // d_{n+1} / d_n
    std::vector<double> iterate_norms;      // ||w^l f^n|| sup over stored grid
    Trajectory trajectory;                  // final iterate
};
PicardReport run_picard(const PicardRunConfig& config);

}  // namespace kmx
