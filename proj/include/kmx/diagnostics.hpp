#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kmx/grid.hpp"

namespace kmx {

/// Excess mass and energy of F = mu + sqrt(mu) f relative to the equilibrium,
/// integrated over x and v (unit x-measure in homogeneous mode).
struct ExcessMoments {
    double mass = 0.0;
    double energy = 0.0;
};
ExcessMoments excess_moments(const DistributionField& f);

/// int (F ln F - mu ln mu) with 0 ln 0 = 0. Nodes with F < 0 are clamped to 0
/// and counted (discretization dips stay visible instead of going NaN).
struct EntropyResult {
    double value = 0.0;
    std::size_t clamped_nodes = 0;
};
EntropyResult entropy(const DistributionField& f);

/// min over all (x,v) nodes of mu + sqrt(mu) f.
double positivity_min(const DistributionField& f);

/// Per-step diagnostics attached to a trajectory.
struct DiagnosticsRecord {
    double t = 0.0;
    double excess_mass = 0.0;
    double excess_energy = 0.0;
    double entropy = 0.0;
    std::size_t entropy_clamped = 0;
    double min_F = 0.0;
    std::vector<double> norms;  // one per configured NormSpec
    bool has_smallness = false;
    double smallness_a = 0.0;
    double smallness_b = 0.0;
};

/// Entropy budget along a stored run: flags H(t_{k+1}) <= H(t_k) + eps_H with
/// eps_H = coeff * (dt^2 + quad_tol), plus the combined excess measure
/// (|M0|+|E0|+|H0|) and its 1/m power.
struct EntropyBudgetReport {
    std::vector<double> entropy_series;
    double eps_h = 0.0;
    bool monotone_within_eps = true;
    std::size_t violations = 0;
    double worst_increase = 0.0;  // max over steps of H(t_{k+1}) - H(t_k)
    double excess_mass0 = 0.0;
    double excess_energy0 = 0.0;
    double entropy0 = 0.0;
    double combined_raw = 0.0;    // |M0| + |E0| + |H0|
    double combined_pow = 0.0;    // combined_raw^(1/m)
    double m_exponent = 1.0;
};
EntropyBudgetReport excess_entropy_budget(std::span<const DistributionField> fields, double dt,
                                          double eps_h_coeff, double quad_tol,
                                          double m_exponent = 1.0);

}  // namespace kmx
