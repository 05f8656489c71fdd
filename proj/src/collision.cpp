#include "kmx/collision.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <tuple>
#include <vector>

#include "kmx/detail/quadrature_kernels.hpp"
#include "kmx/parallel.hpp"

namespace kmx {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// |v-u|^gamma from the squared distance, endpoint-specialized.
inline double rel_speed_pow(double d2, double gamma) {
    if (gamma == 1.0) return std::sqrt(d2);
    if (gamma == 0.0) return 1.0;
    if (gamma == -1.0) return 1.0 / std::sqrt(d2);
    return std::pow(d2, 0.5 * gamma);
}

struct NodeTables {
    std::vector<double> x, y, z;  // node coordinates, SoA
    std::vector<double> r2;       // |v|^2
    std::vector<double> w;        // quadrature weights
    std::vector<double> mu;       // exp(-|v|^2)
    std::vector<double> half_mu;  // exp(-|v|^2 / 2)
};

NodeTables make_tables(const VelocityGrid& grid) {
    NodeTables t;
    const std::size_t n = grid.size();
    t.x.resize(n);
    t.y.resize(n);
    t.z.resize(n);
    t.r2.resize(n);
    t.w.resize(n);
    t.mu.resize(n);
    t.half_mu.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 v = grid.node(i);
        t.x[i] = v[0];
        t.y[i] = v[1];
        t.z[i] = v[2];
        t.r2[i] = norm2(v);
        t.w[i] = grid.weight(i);
        t.mu[i] = maxwellian_at(v);
        t.half_mu[i] = sqrt_maxwellian_at(v);
    }
    return t;
}

detail::FoldedSphere checked_fold(const SphereQuadrature& sq) {
    detail::FoldedSphere fs = detail::fold_sphere(sq);
    if (fs.size() > 1024)
        throw ResourceError("sphere quadrature too large for the collision kernels (" +
                            std::to_string(fs.size()) + " folded nodes, cap 1024)");
    return fs;
}

void check_same_grid(const GridFunction& a, const GridFunction& b, const char* op) {
    if (!a.grid().same_grid(b.grid()))
        throw ContractError(std::string(op) + ": arguments live on different velocity grids");
}

constexpr std::size_t kMaxSphereNodes = 1024;

/// Sphere sum of the gain integrand at one (v,u) pair:
///   sum_k w_k |t_k| * (A(v + t_k w_k) B(u - t_k w_k) - base),  t_k = (u-v).w_k.
/// The per-term base subtraction fuses the loss contribution so that terms
/// cancel exactly when the interpolated product equals the nodal product.
/// `inside` asserts that every post-collision point stays in the box (energy
/// bound checked by the caller), which skips the per-point range tests.
/// Staged: positions first (vectorizable), gathers second.
template <bool inside>
inline double sphere_gain_sum(const detail::FoldedSphere& fs, const detail::InterpGrid& A,
                              const detail::InterpGrid& B, double vx, double vy, double vz,
                              double ux, double uy, double uz, double rx, double ry, double rz,
                              double base) {
    const std::size_t m = fs.size();
    const double* ox = fs.ox.data();
    const double* oy = fs.oy.data();
    const double* oz = fs.oz.data();
    const double* ow = fs.w.data();
    double t[kMaxSphereNodes], px[kMaxSphereNodes], py[kMaxSphereNodes], pz[kMaxSphereNodes],
        qx[kMaxSphereNodes], qy[kMaxSphereNodes], qz[kMaxSphereNodes];
    for (std::size_t k = 0; k < m; ++k) {
        const double tk = rx * ox[k] + ry * oy[k] + rz * oz[k];
        t[k] = tk;
        px[k] = vx + tk * ox[k];
        py[k] = vy + tk * oy[k];
        pz[k] = vz + tk * oz[k];
        qx[k] = ux - tk * ox[k];
        qy[k] = uy - tk * oy[k];
        qz[k] = uz - tk * oz[k];
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        double a, b;
        if constexpr (inside) {
            a = A.at_inside(px[k], py[k], pz[k]);
            b = B.at_inside(qx[k], qy[k], qz[k]);
        } else {
            a = A.at(px[k], py[k], pz[k]);
            b = B.at(qx[k], qy[k], qz[k]);
        }
        acc += ow[k] * std::abs(t[k]) * (a * b - base);
    }
    return acc;
}

inline double sphere_gain_sum(const detail::FoldedSphere& fs, const detail::InterpGrid& A,
                              const detail::InterpGrid& B, double vx, double vy, double vz,
                              double ux, double uy, double uz, double rx, double ry, double rz,
                              double base, bool ball_inside) {
    return ball_inside ? sphere_gain_sum<true>(fs, A, B, vx, vy, vz, ux, uy, uz, rx, ry, rz, base)
                       : sphere_gain_sum<false>(fs, A, B, vx, vy, vz, ux, uy, uz, rx, ry, rz,
                                                base);
}

}  // namespace

void CollisionParams::validate() const {
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw ConfigError("collision params: hard potentials require 0 <= gamma <= 1, got " +
                          std::to_string(gamma));
    if (!(cb > 0.0))
        throw ConfigError("collision params: angular constant C_b must be positive, got " +
                          std::to_string(cb));
}

std::pair<Vec3, Vec3> post_collision(const Vec3& v, const Vec3& u, const Vec3& omega) {
    const double n = std::sqrt(norm2(omega));
    if (std::abs(n - 1.0) > 1e-12)
        throw ContractError("post_collision: omega must be a unit vector, |omega| = " +
                            std::to_string(n));
    const Vec3 rel{u[0] - v[0], u[1] - v[1], u[2] - v[2]};
    const double t = dot(rel, omega);
    Vec3 vp{v[0] + t * omega[0], v[1] + t * omega[1], v[2] + t * omega[2]};
    Vec3 up{u[0] - t * omega[0], u[1] - t * omega[1], u[2] - t * omega[2]};
    return {vp, up};
}

double kinetic_kernel(const Vec3& v, const Vec3& u, const Vec3& omega,
                      const CollisionParams& params) {
    const double n = std::sqrt(norm2(omega));
    if (std::abs(n - 1.0) > 1e-12)
        throw ContractError("kinetic_kernel: omega must be a unit vector");
    const Vec3 rel{v[0] - u[0], v[1] - u[1], v[2] - u[2]};
    const double d2 = norm2(rel);
    if (d2 == 0.0) return 0.0;
    // |v-u|^gamma |cos| = |v-u|^(gamma-1) |(v-u).omega|
    const double p = (params.gamma == 1.0) ? 1.0 : rel_speed_pow(d2, params.gamma) / std::sqrt(d2);
    return params.cb * p * std::abs(dot(rel, omega));
}

GridFunction gamma_gain(const GridFunction& g, const GridFunction& h,
                        const CollisionParams& params, const SphereQuadrature& sphere,
                        const EvalOptions& opts) {
    params.validate();
    check_same_grid(g, h, "gamma_gain");
    const VelocityGrid& grid = g.grid();
    const NodeTables t = make_tables(grid);
    const detail::FoldedSphere fs = checked_fold(sphere);
    const detail::InterpGrid A(grid, g.values().data());
    const detail::InterpGrid B(grid, h.values().data());
    const double gamma = params.gamma;
    const double ball2 = grid.extent() * grid.extent() * (1.0 - 1e-13);
    const std::size_t n = grid.size();
    GridFunction out(g.grid_ptr());
    double* o = out.values().data();

    const bool pair_path = (&g == &h) && opts.threads <= 1 && !opts.deterministic;
    if (pair_path) {
        for (std::size_t i = 0; i < n; ++i) {
            const double vx = t.x[i], vy = t.y[i], vz = t.z[i];
            for (std::size_t j = i + 1; j < n; ++j) {
                const double rx = t.x[j] - vx, ry = t.y[j] - vy, rz = t.z[j] - vz;
                const double d2 = rx * rx + ry * ry + rz * rz;
                if (d2 == 0.0) continue;
                const double s = sphere_gain_sum(fs, A, B, vx, vy, vz, t.x[j], t.y[j], t.z[j],
                                                 rx, ry, rz, 0.0, t.r2[i] + t.r2[j] <= ball2);
                const double common =
                    (gamma == 1.0 ? s : rel_speed_pow(d2, gamma - 1.0) * s);
                o[i] += t.w[j] * t.half_mu[j] * common;
                o[j] += t.w[i] * t.half_mu[i] * common;
            }
        }
        for (std::size_t i = 0; i < n; ++i) o[i] *= params.cb;
        return out;
    }

    parallel_for(n, opts.threads, [&](std::size_t i) {
        const double vx = t.x[i], vy = t.y[i], vz = t.z[i];
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double rx = t.x[j] - vx, ry = t.y[j] - vy, rz = t.z[j] - vz;
            const double d2 = rx * rx + ry * ry + rz * rz;
            if (d2 == 0.0) continue;
            const double s = sphere_gain_sum(fs, A, B, vx, vy, vz, t.x[j], t.y[j], t.z[j],
                                             rx, ry, rz, 0.0, t.r2[i] + t.r2[j] <= ball2);
            const double common = (gamma == 1.0 ? s : rel_speed_pow(d2, gamma - 1.0) * s);
            acc += t.w[j] * t.half_mu[j] * common;
        }
        o[i] = params.cb * acc;
    });
    return out;
}

double gamma_gain_at(const GridFunction& g, const GridFunction& h, const CollisionParams& params,
                     const SphereQuadrature& sphere, std::size_t node_index) {
    params.validate();
    check_same_grid(g, h, "gamma_gain");
    const VelocityGrid& grid = g.grid();
    const NodeTables t = make_tables(grid);
    const detail::FoldedSphere fs = checked_fold(sphere);
    const detail::InterpGrid A(grid, g.values().data());
    const detail::InterpGrid B(grid, h.values().data());
    const double gamma = params.gamma;
    const double ball2 = grid.extent() * grid.extent() * (1.0 - 1e-13);
    const std::size_t n = grid.size();
    const std::size_t i = node_index;
    const double vx = t.x[i], vy = t.y[i], vz = t.z[i];
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double rx = t.x[j] - vx, ry = t.y[j] - vy, rz = t.z[j] - vz;
        const double d2 = rx * rx + ry * ry + rz * rz;
        if (d2 == 0.0) continue;
        const double s = sphere_gain_sum(fs, A, B, vx, vy, vz, t.x[j], t.y[j], t.z[j], rx, ry, rz,
                                         0.0, t.r2[i] + t.r2[j] <= ball2);
        const double common = (gamma == 1.0 ? s : rel_speed_pow(d2, gamma - 1.0) * s);
        acc += t.w[j] * t.half_mu[j] * common;
    }
    return params.cb * acc;
}

GridFunction q_full(const GridFunction& F, const GridFunction& G, const CollisionParams& params,
                    const SphereQuadrature& sphere, const EvalOptions& opts) {
    params.validate();
    check_same_grid(F, G, "q_full");
    const VelocityGrid& grid = F.grid();
    const NodeTables t = make_tables(grid);
    const detail::FoldedSphere fs = checked_fold(sphere);
    const double gamma = params.gamma;
    const std::size_t n = grid.size();

    // Ratio fields phi = F/mu. Pointwise exact, so phi == 1 bit-for-bit when
    // the input is the sampled equilibrium and every fused term below is 0.
    std::vector<double> phiF(n), phiG(n);
    const auto fv = F.values();
    const auto gv = G.values();
    for (std::size_t i = 0; i < n; ++i) {
        phiF[i] = fv[i] / t.mu[i];
        phiG[i] = gv[i] / t.mu[i];
    }
    const detail::InterpGrid A(grid, phiF.data());
    const detail::InterpGrid B(grid, phiG.data());
    const double ball2 = grid.extent() * grid.extent() * (1.0 - 1e-13);
    GridFunction out(F.grid_ptr());
    double* o = out.values().data();

    const bool pair_path = (&F == &G) && opts.threads <= 1 && !opts.deterministic;
    if (pair_path) {
        for (std::size_t i = 0; i < n; ++i) {
            const double vx = t.x[i], vy = t.y[i], vz = t.z[i];
            for (std::size_t j = i + 1; j < n; ++j) {
                const double rx = t.x[j] - vx, ry = t.y[j] - vy, rz = t.z[j] - vz;
                const double d2 = rx * rx + ry * ry + rz * rz;
                if (d2 == 0.0) continue;
                const double s = sphere_gain_sum(fs, A, B, vx, vy, vz, t.x[j], t.y[j], t.z[j],
                                                 rx, ry, rz, phiF[i] * phiG[j],
                                                 t.r2[i] + t.r2[j] <= ball2);
                const double common =
                    (gamma == 1.0 ? s : rel_speed_pow(d2, gamma - 1.0) * s) * t.mu[i] * t.mu[j];
                o[i] += t.w[j] * common;
                o[j] += t.w[i] * common;
            }
        }
        for (std::size_t i = 0; i < n; ++i) o[i] *= params.cb;
        return out;
    }

    parallel_for(n, opts.threads, [&](std::size_t i) {
        const double vx = t.x[i], vy = t.y[i], vz = t.z[i];
        const double pfi = phiF[i];
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double rx = t.x[j] - vx, ry = t.y[j] - vy, rz = t.z[j] - vz;
            const double d2 = rx * rx + ry * ry + rz * rz;
            if (d2 == 0.0) continue;
            const double s = sphere_gain_sum(fs, A, B, vx, vy, vz, t.x[j], t.y[j], t.z[j], rx, ry,
                                             rz, pfi * phiG[j], t.r2[i] + t.r2[j] <= ball2);
            const double common = (gamma == 1.0 ? s : rel_speed_pow(d2, gamma - 1.0) * s);
            acc += t.w[j] * t.mu[j] * common;
        }
        o[i] = params.cb * t.mu[i] * acc;
    });
    return out;
}

GridFunction gamma_loss(const GridFunction& g, const GridFunction& h,
                        const CollisionParams& params, const SphereQuadrature& /*sphere*/,
                        const EvalOptions& opts) {
    params.validate();
    check_same_grid(g, h, "gamma_loss");
    const VelocityGrid& grid = g.grid();
    const NodeTables t = make_tables(grid);
    const double gamma = params.gamma;
    const std::size_t n = grid.size();
    const auto hv = h.values();

    // w_u sqrt(mu)(u) h(u) precombined; the sphere integral of C_b|cos theta|
    // is direction independent and equals 2 pi C_b exactly.
    std::vector<double> m(n);
    for (std::size_t j = 0; j < n; ++j) m[j] = t.w[j] * t.half_mu[j] * hv[j];

    GridFunction out(g.grid_ptr());
    double* o = out.values().data();
    const auto gv = g.values();
    parallel_for(n, opts.threads, [&](std::size_t i) {
        const double vx = t.x[i], vy = t.y[i], vz = t.z[i];
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double dx = t.x[j] - vx, dy = t.y[j] - vy, dz = t.z[j] - vz;
            const double d2 = dx * dx + dy * dy + dz * dz;
            if (d2 == 0.0) continue;
            acc += m[j] * rel_speed_pow(d2, gamma);
        }
        o[i] = kTwoPi * params.cb * gv[i] * acc;
    });
    return out;
}

double gamma_loss_at(const GridFunction& g, const GridFunction& h, const CollisionParams& params,
                     std::size_t node_index) {
    params.validate();
    check_same_grid(g, h, "gamma_loss");
    const VelocityGrid& grid = g.grid();
    const std::size_t n = grid.size();
    const Vec3 v = grid.node(node_index);
    const auto hv = h.values();
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const Vec3 u = grid.node(j);
        const double dx = v[0] - u[0], dy = v[1] - u[1], dz = v[2] - u[2];
        const double d2 = dx * dx + dy * dy + dz * dz;
        if (d2 == 0.0) continue;
        acc += grid.weight(j) * sqrt_maxwellian_at(u) * hv[j] * rel_speed_pow(d2, params.gamma);
    }
    return kTwoPi * params.cb * g.values()[node_index] * acc;
}

namespace {
std::mutex nu_cache_mutex;
std::map<std::tuple<double, int, double, double>, std::shared_ptr<const GridFunction>> nu_cache;
}  // namespace

double nu_at(const VelocityGrid& grid, const CollisionParams& params, std::size_t node_index) {
    const std::size_t n = grid.size();
    const Vec3 v = grid.node(node_index);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const Vec3 u = grid.node(j);
        const double dx = v[0] - u[0], dy = v[1] - u[1], dz = v[2] - u[2];
        const double d2 = dx * dx + dy * dy + dz * dz;
        if (d2 == 0.0) continue;
        acc += grid.weight(j) * maxwellian_at(u) * rel_speed_pow(d2, params.gamma);
    }
    return kTwoPi * params.cb * acc;
}

std::shared_ptr<const GridFunction> compute_nu(std::shared_ptr<const VelocityGrid> grid,
                                               const CollisionParams& params,
                                               const SphereQuadrature& /*sphere*/,
                                               const EvalOptions& opts) {
    params.validate();
    const auto key =
        std::make_tuple(grid->extent(), grid->nodes_per_axis(), params.gamma, params.cb);
    {
        std::lock_guard<std::mutex> lock(nu_cache_mutex);
        auto it = nu_cache.find(key);
        if (it != nu_cache.end()) return it->second;
    }
    const NodeTables t = make_tables(*grid);
    const std::size_t n = grid->size();
    auto out = std::make_shared<GridFunction>(grid);
    double* o = out->values().data();
    std::vector<double> m(n);
    for (std::size_t j = 0; j < n; ++j) m[j] = t.w[j] * t.mu[j];
    const double gamma = params.gamma;
    parallel_for(n, opts.threads, [&](std::size_t i) {
        const double vx = t.x[i], vy = t.y[i], vz = t.z[i];
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double dx = t.x[j] - vx, dy = t.y[j] - vy, dz = t.z[j] - vz;
            const double d2 = dx * dx + dy * dy + dz * dz;
            if (d2 == 0.0) continue;
            acc += m[j] * rel_speed_pow(d2, gamma);
        }
        o[i] = kTwoPi * params.cb * acc;
    });
    std::shared_ptr<const GridFunction> res = out;
    std::lock_guard<std::mutex> lock(nu_cache_mutex);
    nu_cache.emplace(key, res);
    return res;
}

}  // namespace kmx
