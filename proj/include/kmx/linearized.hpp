#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "kmx/collision.hpp"
#include "kmx/grid.hpp"

namespace kmx {

/// Linearized collision operator K, through the identity
///   K f = Gamma_gain(f, sqrt(mu)) + Gamma_gain(sqrt(mu), f) - Gamma_loss(sqrt(mu), f),
/// so the full linearized term is nu(v) f - K f.
GridFunction apply_K(const GridFunction& f, const CollisionParams& params,
                     const SphereQuadrature& sphere, const EvalOptions& opts = {});

/// Discrete kernel density of K: entries k(v_i, u_j) with quadrature weights
/// folded out, i.e. (K f)(v_i) ~= sum_j k_ij f_j w_j.
class KernelMatrix {
public:
    KernelMatrix(std::shared_ptr<const VelocityGrid> grid, std::vector<double> entries);

    const VelocityGrid& grid() const { return *grid_; }
    std::shared_ptr<const VelocityGrid> grid_ptr() const { return grid_; }
    std::size_t dim() const { return grid_->size(); }
    double entry(std::size_t i, std::size_t j) const { return entries_[i * dim() + j]; }
    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(entries_).subspan(i * dim(), dim());
    }

    /// max_{i != j} |k_ij - k_ji| / (1 + |k_ij|).
    double symmetry_defect() const;

    /// (K f)_i = sum_j k_ij f_j w_j.
    GridFunction apply(const GridFunction& f) const;

private:
    std::shared_ptr<const VelocityGrid> grid_;
    std::vector<double> entries_;
};

/// Column-consistent extraction: entry k_ij equals apply_K on the indicator
/// of node j, divided by that node's quadrature weight (assembled in one
/// adjoint pass over the shared quadrature rather than N^3 operator calls).
/// pre: N^3 <= cap_nodes.
KernelMatrix extract_kernel_matrix(std::shared_ptr<const VelocityGrid> grid,
                                   const CollisionParams& params, const SphereQuadrature& sphere,
                                   const EvalOptions& opts = {}, std::size_t cap_nodes = 4096);

/// Pointwise two-shape bound and weighted-integral decay of the kernel:
///   shape1 = |v-u| exp(-(|v|^2+|u|^2)/8)
///   shape2 = |v-u|^{-1} exp(-|v-u|^2/8 - (|v|^2-|u|^2)^2 / (8|v-u|^2))
///   I_l(v_i) = sum_j |k_ij| (w(v_i)/w(u_j))^l w_j
struct KernelBoundReport {
    double l = 0.0;
    // Minimax ratio constants. c_joint is max |k|/(s1+s2) over off-diagonal
    // entries, so |k| <= c_joint*(s1+s2) holds pointwise; c1/c2 are the same
    // ratio restricted to where each shape dominates.
    double c1 = 0.0;
    double c2 = 0.0;
    double c_joint = 0.0;
    bool pointwise_ok = false;
    double near_band_ratio = 0.0;  // max ratio on |v-u| <= 2h (shape2 region)
    std::vector<double> profile;   // I_l per node
    double profile_max = 0.0;
    bool profile_finite = false;
    double decay_exponent = 0.0;   // log-log LS slope of I_l vs (1+|v|)
    double decay_intercept = 0.0;
    bool decay_ok = false;         // slope <= -0.8 and profile finite
};
KernelBoundReport check_kernel_bounds(const KernelMatrix& K, double l);

/// Effective damping weight of the mild form:
///   g_f(x,v) = nu(v) + 2 pi C_b int |v-u|^gamma exp(-|u|^2/2) f(x,u) du.
DistributionField compute_g(const DistributionField& f, const CollisionParams& params,
                            const SphereQuadrature& sphere, const EvalOptions& opts = {});

/// Checks -int_s^t g_f ds1 <= -nu(v)(t-s)/2 along characteristics on sampled
/// (x, v, s < t) tuples, with trapezoidal time quadrature on the stored grid.
struct GLowerBoundReport {
    std::size_t samples = 0;
    std::size_t satisfied = 0;
    double fraction = 1.0;
    double worst_margin = 0.0;  // max over samples of lhs - rhs (<= 0 means satisfied)
};
GLowerBoundReport check_g_lower_bound(std::span<const DistributionField> fields, double dt,
                                      const CollisionParams& params,
                                      const SphereQuadrature& sphere, int sample_count = 256,
                                      std::uint64_t seed = 1, const EvalOptions& opts = {});

}  // namespace kmx
