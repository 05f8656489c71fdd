#include "naive_ops.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kmx/errors.hpp"

namespace kmx::testref {

namespace {

void check_small(const VelocityGrid& grid) {
    if (grid.nodes_per_axis() > kMaxNodesPerAxis)
        throw ResourceError("naive reference evaluator: grid too large (N = " +
                            std::to_string(grid.nodes_per_axis()) + " > " +
                            std::to_string(kMaxNodesPerAxis) + ")");
}

}  // namespace

GridFunction naive_gamma_gain(const GridFunction& g, const GridFunction& h,
                              const CollisionParams& params, const SphereQuadrature& sphere) {
    const VelocityGrid& grid = g.grid();
    check_small(grid);
    const std::size_t n = grid.size();
    GridFunction out(g.grid_ptr());
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 v = grid.node(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const Vec3 u = grid.node(j);
            const double gauss = std::exp(-0.5 * norm2(u));
            for (std::size_t k = 0; k < sphere.size(); ++k) {
                const Vec3& omega = sphere.node(k);
                const double kern = kinetic_kernel(v, u, omega, params);
                if (kern == 0.0) continue;
                const auto [vp, up] = post_collision(v, u, omega);
                acc += grid.weight(j) * sphere.weight(k) * kern * gauss * interpolate(g, vp) *
                       interpolate(h, up);
            }
        }
        out[i] = acc;
    }
    return out;
}

GridFunction naive_gamma_loss(const GridFunction& g, const GridFunction& h,
                              const CollisionParams& params) {
    const VelocityGrid& grid = g.grid();
    check_small(grid);
    const std::size_t n = grid.size();
    GridFunction out(g.grid_ptr());
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 v = grid.node(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const Vec3 u = grid.node(j);
            const Vec3 rel{v[0] - u[0], v[1] - u[1], v[2] - u[2]};
            const double d = std::sqrt(norm2(rel));
            if (d == 0.0) continue;
            acc += grid.weight(j) * std::pow(d, params.gamma) * std::exp(-0.5 * norm2(u)) *
                   h.values()[j];
        }
        out[i] = 2.0 * std::numbers::pi * params.cb * g.values()[i] * acc;
    }
    return out;
}

NaiveQParts naive_q_parts(const GridFunction& F, const GridFunction& G,
                          const CollisionParams& params, const SphereQuadrature& sphere) {
    const VelocityGrid& grid = F.grid();
    check_small(grid);
    const std::size_t n = grid.size();
    auto gp = F.grid_ptr();

    GridFunction phiF(gp), phiG(gp);
    for (std::size_t i = 0; i < n; ++i) {
        const double mu = std::exp(-norm2(grid.node(i)));
        phiF[i] = F.values()[i] / mu;
        phiG[i] = G.values()[i] / mu;
    }

    NaiveQParts parts{GridFunction(gp), GridFunction(gp)};
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 v = grid.node(i);
        const double mu_v = std::exp(-norm2(v));
        double gain = 0.0, loss = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const Vec3 u = grid.node(j);
            const double mu_u = std::exp(-norm2(u));
            for (std::size_t k = 0; k < sphere.size(); ++k) {
                const Vec3& omega = sphere.node(k);
                const double kern = kinetic_kernel(v, u, omega, params);
                if (kern == 0.0) continue;
                const auto [vp, up] = post_collision(v, u, omega);
                const double common = grid.weight(j) * sphere.weight(k) * kern * mu_v * mu_u;
                gain += common * interpolate(phiF, vp) * interpolate(phiG, up);
                loss += common * phiF[i] * phiG[j];
            }
        }
        parts.gain[i] = gain;
        parts.loss[i] = loss;
    }
    return parts;
}

GridFunction naive_q_full(const GridFunction& F, const GridFunction& G,
                          const CollisionParams& params, const SphereQuadrature& sphere) {
    NaiveQParts parts = naive_q_parts(F, G, params, sphere);
    GridFunction out(F.grid_ptr());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = parts.gain[i] - parts.loss[i];
    return out;
}

GridFunction naive_apply_K(const GridFunction& f, const CollisionParams& params,
                           const SphereQuadrature& sphere) {
    GridFunction sq = sqrt_maxwellian(f.grid_ptr());
    GridFunction a = naive_gamma_gain(f, sq, params, sphere);
    GridFunction b = naive_gamma_gain(sq, f, params, sphere);
    GridFunction c = naive_gamma_loss(sq, f, params);
    GridFunction out(f.grid_ptr());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i] - c[i];
    return out;
}

GridFunction naive_nu(std::shared_ptr<const VelocityGrid> grid, const CollisionParams& params) {
    GridFunction ones(grid);
    for (std::size_t i = 0; i < ones.size(); ++i) ones[i] = 1.0;
    GridFunction sq = sqrt_maxwellian(grid);
    return naive_gamma_loss(ones, sq, params);
}

}  // namespace kmx::testref
