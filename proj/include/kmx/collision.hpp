#pragma once

#include <memory>
#include <span>
#include <utility>

#include "kmx/grid.hpp"

namespace kmx {

/// Hard-potential collision model: kernel |v-u|^gamma * C_b |cos theta|
/// against the fixed equilibrium mu(v) = exp(-|v|^2).
struct CollisionParams {
    double gamma = 1.0;  // hard potentials, 0 <= gamma <= 1
    double cb = 1.0;     // angular constant in b(theta) = C_b |cos theta|

    void validate() const;
};

/// Shared evaluation knobs. `deterministic` forces the fixed-order reduction
/// path so results are bitwise identical for every thread count (the
/// symmetric-pair fast path regroups sums and is skipped).
struct EvalOptions {
    int threads = 1;
    bool deterministic = false;
};

/// Elastic post-collision velocities. pre: |omega| = 1 within 1e-12.
std::pair<Vec3, Vec3> post_collision(const Vec3& v, const Vec3& u, const Vec3& omega);

/// |v-u|^gamma * C_b |cos theta| with cos theta = (v-u).omega / |v-u|.
/// Returns 0 at u = v (measure-zero set).
double kinetic_kernel(const Vec3& v, const Vec3& u, const Vec3& omega,
                      const CollisionParams& params);

/// Full bilinear collision operator Q(F,G) on one velocity grid.
///
/// The gain product F(v')G(u') is evaluated in the near-equilibrium factored
/// form mu(v)mu(u) * (F/mu)(v') (G/mu)(u') (energy identity applied exactly;
/// only the ratio fields are interpolated), and gain and loss share the same
/// sphere sum term by term. Q(mu,mu) therefore vanishes identically, and the
/// evaluation is exact-tail-safe for inputs that decay like the equilibrium.
GridFunction q_full(const GridFunction& F, const GridFunction& G, const CollisionParams& params,
                    const SphereQuadrature& sphere, const EvalOptions& opts = {});

/// Gain part of the perturbation-form collision term:
///   (1/sqrt(mu)) iint |v-u|^gamma b(theta) (sqrt(mu) g)(v') (sqrt(mu) h)(u')
/// evaluated as iint ... exp(-|u|^2/2) g(v') h(u') with g, h interpolated.
GridFunction gamma_gain(const GridFunction& g, const GridFunction& h,
                        const CollisionParams& params, const SphereQuadrature& sphere,
                        const EvalOptions& opts = {});

/// Single output node of gamma_gain (same quadrature path).
double gamma_gain_at(const GridFunction& g, const GridFunction& h, const CollisionParams& params,
                     const SphereQuadrature& sphere, std::size_t node_index);

/// Loss part: g(v) * 2 pi C_b * int |v-u|^gamma sqrt(mu)(u) h(u) du.
/// The sphere integral of C_b |cos theta| is direction independent and is
/// collapsed to its exact value 2 pi C_b (fast path; `sphere` kept for
/// signature symmetry).
GridFunction gamma_loss(const GridFunction& g, const GridFunction& h,
                        const CollisionParams& params, const SphereQuadrature& sphere,
                        const EvalOptions& opts = {});

double gamma_loss_at(const GridFunction& g, const GridFunction& h, const CollisionParams& params,
                     std::size_t node_index);

/// Collision frequency nu = Gamma_loss(1, sqrt(mu)); cached per (grid shape,
/// params). Comparable to (1+|v|)^gamma on the grid.
std::shared_ptr<const GridFunction> compute_nu(std::shared_ptr<const VelocityGrid> grid,
                                               const CollisionParams& params,
                                               const SphereQuadrature& sphere,
                                               const EvalOptions& opts = {});

/// nu at a single node through the same accumulation as compute_nu.
double nu_at(const VelocityGrid& grid, const CollisionParams& params, std::size_t node_index);

}  // namespace kmx
