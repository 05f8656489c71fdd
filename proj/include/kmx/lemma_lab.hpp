#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "kmx/collision.hpp"
#include "kmx/grid.hpp"

namespace kmx {

enum class SampleKind { maxwellian_modulated, compact_bump, random_positive };

/// Seeded family of nonnegative velocity-space test functions.
struct SampleFamily {
    SampleKind kind = SampleKind::maxwellian_modulated;
    int count = 64;
    std::uint64_t seed = 1;
    double amp_lo = 0.1;
    double amp_hi = 1.0;
    double support_scale = 1.0;  // compact_bump radius multiplier
};

/// Generates the s-th sample of the family (two draws per index for paired
/// inequalities; draw = 0 or 1).
GridFunction draw_sample(const SampleFamily& family, int index, int draw,
                         std::shared_ptr<const VelocityGrid> grid);

/// Empirical best-constant estimate for one inequality: max of per-sample
/// ratios. These are lower bounds on the true constants; a report means "no
/// counterexample found up to grid resolution", never "verified".
struct ConstantReport {
    std::string inequality;
    double r = 0.0;
    double l = 0.0;
    double gamma = 0.0;
    double n_exponent = 0.0;  // nonlinear-bound n, when applicable
    double eta = 0.0;         // nonlinear-gain split parameter, when applicable
    int grid_n = 0;
    double grid_extent = 0.0;
    int samples_requested = 0;
    int skipped = 0;
    std::vector<double> ratios;  // per retained sample, in generation order
    double max_ratio = 0.0;
    double c1 = 0.0;  // fitted pair for the two-constant gain bound
    double c2 = 0.0;
};

/// ||w^l Gamma_gain(g,h)||_{L^r_v} <= C ||w^l g||_{L^r_v} ||w^l h||_{L^r_v},
/// valid range r >= 4/(3-gamma), l > 3/r'.
ConstantReport estimate_gain_constant(const SampleFamily& family, double r, double l,
                                      const CollisionParams& params,
                                      std::shared_ptr<const VelocityGrid> grid,
                                      const SphereQuadrature& sphere,
                                      const EvalOptions& opts = {});

/// Low-r variant with reduced output weight l - (gamma+1)/2 + 2/r', valid for
/// r in (1, 4/(3-gamma)), l > 1/r' + (gamma+1)/2.
ConstantReport estimate_gain_constant_lowr(const SampleFamily& family, double r, double l,
                                           const CollisionParams& params,
                                           std::shared_ptr<const VelocityGrid> grid,
                                           const SphereQuadrature& sphere,
                                           const EvalOptions& opts = {});

/// Output weight exponent of the low-r gain bound.
double lowr_output_weight(double r, double l, double gamma);

/// L^1-controlled nonlinear bounds: loss ratio
///   ||w^{l-gamma} Gamma_loss(g,g)|| / (||g||_{L^1} ||w^l g||),
/// and the two-constant gain bound
///   ||w^{l-gamma} Gamma_gain(g,g)|| <= C1 T1 + C2 eta T2,
///   T1 = ||g||_1^{1/(n r')} ||w^l g||^{1 + 1/r + 1/(n' r')},
///   T2 = sum_{p in {1, r}} ||w^l g||^{1 + 1/p},
/// with (C1, C2) fitted by grid search + local refinement minimizing C1 + C2
/// subject to covering every sample. pre: r > 1, l > 3/r', n > 3.
struct NonlinearBoundReports {
    ConstantReport loss;
    ConstantReport gain;  // ratios hold LHS/T1 (the scale-invariant part)
};
NonlinearBoundReports estimate_nonlinear_bounds(const SampleFamily& family, double r, double l,
                                                double n, double eta,
                                                const CollisionParams& params,
                                                std::shared_ptr<const VelocityGrid> grid,
                                                const SphereQuadrature& sphere,
                                                const EvalOptions& opts = {});

/// min/max over grid nodes of nu(v) / (1+|v|)^gamma at two resolutions.
struct NuGrowthReport {
    double gamma = 0.0;
    int grid_n = 0;
    int grid_n_refined = 0;
    double c_lo = 0.0;
    double c_hi = 0.0;
    double c_lo_refined = 0.0;
    double c_hi_refined = 0.0;
    double drift = 0.0;  // max relative change of the interval endpoints
    bool stable_within_10pct = false;
};
NuGrowthReport estimate_nu_growth(double gamma, double cb, double extent, int grid_n,
                                  int grid_n_refined, const EvalOptions& opts = {});

}  // namespace kmx
