#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "kmx/collision.hpp"
#include "kmx/grid.hpp"

namespace kmx {

inline constexpr double kInfExponent = std::numeric_limits<double>::infinity();

/// Nesting order of the mixed norm over a trajectory. On a single field the
/// two coincide.
enum class NormOrder {
    linf_t_lr_v_linf_x,  // sup over time of [ L^r_v of sup_x ]
    lr_v_linf_tx,        // L^r_v of sup over (time, x)
};

/// Weighted mixed norm ||w^l g|| with w(v) = 1 + |v|.
struct NormSpec {
    double r = 2.0;  // in (1, inf]; kInfExponent for the sup norm
    double l = 0.0;
    NormOrder order = NormOrder::lr_v_linf_tx;

    void validate() const;
    std::string label() const;
};

/// r' with 1/r + 1/r' = 1; r = inf gives 1. r <= 1 is out of domain.
double conjugate_exponent(double r);

double mixed_norm(const GridFunction& g, const NormSpec& spec);
double mixed_norm(const DistributionField& f, const NormSpec& spec);
/// Over a stored time grid (trajectory fields).
double mixed_norm(std::span<const DistributionField> fields, const NormSpec& spec);

/// Which theorem hypotheses hold for (r, l, gamma).
struct ParameterReport {
    double r = 2.0;
    double l = 0.0;
    double gamma = 1.0;
    double r_conjugate = 2.0;
    double local_threshold = 0.0;   // max{3/r', 1/r' + (gamma+1)/2, 2 gamma}
    bool local_ok = false;          // l > local_threshold
    double global_threshold = 0.0;  // 3/r' + gamma
    bool global_ok = false;         // local_ok and l > global_threshold
    double low_r_boundary = 0.0;    // 4/(3-gamma)
    bool smallness_required = false;  // r < 4/(3-gamma)
};
ParameterReport validate_parameters(double r, double l, double gamma);

/// Sampled sups of the initial-layer smallness integrals. Sampled sups are
/// lower bounds on the continuum sups and are reported as such.
struct SmallnessConfig {
    int t_samples = 9;        // uniform samples of [0, T*] for A
    int t_tail_samples = 9;   // geometric samples of [T*, t_max] for B
    double t_max_factor = 10.0;
};
struct SmallnessReport {
    double a_sup = 0.0;        // sup_{t<=T*,x} int exp(-|v|^2/4) |f0(x-vt,v)| dv
    double b_sup = 0.0;        // sup_{t>=T*,x} int exp(-nu t) |f0(x-vt,v)| dv
    double b_tail_bound = 0.0; // exp(-nu_min t_max) * sup_x int |f0| dv
    double t_star = 0.0;
    double t_max = 0.0;
};
SmallnessReport smallness_functionals(const DistributionField& f0, double t_star,
                                      const CollisionParams& params,
                                      const SphereQuadrature& sphere,
                                      const SmallnessConfig& cfg = {});

}  // namespace kmx
