#pragma once

// Brute-force reference evaluators for the collision-term quadratures.
// Written against the public grid/collision surface only (interpolate,
// kinetic_kernel, node/weight access), with plain triple loops over the full
// sphere node set and no folding, pairing, or precombined factors. They are
// the oracle the optimized kernels are checked against, and are only meant
// to run on small grids.

#include "kmx/collision.hpp"
#include "kmx/grid.hpp"

namespace kmx::testref {

inline constexpr int kMaxNodesPerAxis = 13;

GridFunction naive_gamma_gain(const GridFunction& g, const GridFunction& h,
                              const CollisionParams& params, const SphereQuadrature& sphere);

GridFunction naive_gamma_loss(const GridFunction& g, const GridFunction& h,
                              const CollisionParams& params);

/// Gain and loss halves of q_full in the same factored form the library
/// uses, accumulated separately (the difference calibrates the fused path).
struct NaiveQParts {
    GridFunction gain;
    GridFunction loss;
};
NaiveQParts naive_q_parts(const GridFunction& F, const GridFunction& G,
                          const CollisionParams& params, const SphereQuadrature& sphere);

GridFunction naive_q_full(const GridFunction& F, const GridFunction& G,
                          const CollisionParams& params, const SphereQuadrature& sphere);

/// K f = Gamma_gain(f, sqrt(mu)) + Gamma_gain(sqrt(mu), f) - Gamma_loss(sqrt(mu), f).
GridFunction naive_apply_K(const GridFunction& f, const CollisionParams& params,
                           const SphereQuadrature& sphere);

GridFunction naive_nu(std::shared_ptr<const VelocityGrid> grid, const CollisionParams& params);

}  // namespace kmx::testref
