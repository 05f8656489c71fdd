#pragma once

// Internal helpers shared by the collision quadratures and the kernel-matrix
// extraction. Not part of the public surface.

#include <cmath>
#include <cstddef>
#include <vector>

#include "kmx/grid.hpp"

namespace kmx::detail {

/// Sphere nodes folded over omega -> -omega (integrands here are even in
/// omega, and for even n_phi the node set is exactly antipodally closed, so
/// half the nodes with doubled weights reproduce the full sum). Falls back
/// to the full set when the closure does not hold.
struct FoldedSphere {
    std::vector<double> ox, oy, oz, w;
    std::size_t size() const { return w.size(); }
};

inline FoldedSphere fold_sphere(const SphereQuadrature& sq) {
    FoldedSphere out;
    const std::size_t m = sq.size();
    out.ox.reserve(m);
    out.oy.reserve(m);
    out.oz.reserve(m);
    out.w.reserve(m);
    if (sq.antipodal_closed()) {
        const int nphi = sq.n_azimuth();
        for (std::size_t k = 0; k < m; ++k) {
            const Vec3& o = sq.node(k);
            const bool keep = o[0] > 0.0 || (o[0] == 0.0 && static_cast<int>(k) % nphi < nphi / 2);
            if (!keep) continue;
            out.ox.push_back(o[0]);
            out.oy.push_back(o[1]);
            out.oz.push_back(o[2]);
            out.w.push_back(2.0 * sq.weight(k));
        }
    } else {
        for (std::size_t k = 0; k < m; ++k) {
            const Vec3& o = sq.node(k);
            out.ox.push_back(o[0]);
            out.oy.push_back(o[1]);
            out.oz.push_back(o[2]);
            out.w.push_back(sq.weight(k));
        }
    }
    return out;
}

/// Raw trilinear evaluator over a value array backed by a VelocityGrid.
/// Nested-lerp form (exact on constants and nodes); 0 outside the box.
struct InterpGrid {
    const double* v;
    int n;
    double R, inv_h;
    std::size_t sx, sy;

    InterpGrid(const VelocityGrid& g, const double* values)
        : v(values),
          n(g.nodes_per_axis()),
          R(g.extent()),
          inv_h(1.0 / g.spacing()),
          sx(static_cast<std::size_t>(g.nodes_per_axis()) * g.nodes_per_axis()),
          sy(static_cast<std::size_t>(g.nodes_per_axis())) {}

    double at(double px, double py, double pz) const {
        if (px < -R || px > R || py < -R || py > R || pz < -R || pz > R) return 0.0;
        return at_inside(px, py, pz);
    }

    /// Caller guarantees the point is inside the box (e.g. via the energy
    /// bound |v'|^2 <= |v|^2 + |u|^2 <= R^2 for the whole sphere loop).
    double at_inside(double px, double py, double pz) const {
        const double sxf = (px + R) * inv_h;
        const double syf = (py + R) * inv_h;
        const double szf = (pz + R) * inv_h;
        int ix = static_cast<int>(sxf);
        int iy = static_cast<int>(syf);
        int iz = static_cast<int>(szf);
        if (ix > n - 2) ix = n - 2;
        if (iy > n - 2) iy = n - 2;
        if (iz > n - 2) iz = n - 2;
        const double fx = sxf - ix, fy = syf - iy, fz = szf - iz;
        const double* b = v + (static_cast<std::size_t>(ix) * sy + iy) * sy + iz;
        const double c00 = b[0] + fz * (b[1] - b[0]);
        const double c01 = b[sy] + fz * (b[sy + 1] - b[sy]);
        const double c10 = b[sx] + fz * (b[sx + 1] - b[sx]);
        const double c11 = b[sx + sy] + fz * (b[sx + sy + 1] - b[sx + sy]);
        const double c0 = c00 + fy * (c01 - c00);
        const double c1 = c10 + fy * (c11 - c10);
        return c0 + fx * (c1 - c0);
    }

    /// Corner indices and weights at p, for adjoint (scatter) accumulation.
    /// Returns false if p is outside the box.
    bool cell(double px, double py, double pz, std::size_t idx[8], double wt[8]) const {
        if (px < -R || px > R || py < -R || py > R || pz < -R || pz > R) return false;
        const double sxf = (px + R) * inv_h;
        const double syf = (py + R) * inv_h;
        const double szf = (pz + R) * inv_h;
        int ix = static_cast<int>(sxf);
        int iy = static_cast<int>(syf);
        int iz = static_cast<int>(szf);
        if (ix > n - 2) ix = n - 2;
        if (iy > n - 2) iy = n - 2;
        if (iz > n - 2) iz = n - 2;
        const double fx = sxf - ix, fy = syf - iy, fz = szf - iz;
        const std::size_t base = (static_cast<std::size_t>(ix) * sy + iy) * sy + iz;
        idx[0] = base;
        idx[1] = base + 1;
        idx[2] = base + sy;
        idx[3] = base + sy + 1;
        idx[4] = base + sx;
        idx[5] = base + sx + 1;
        idx[6] = base + sx + sy;
        idx[7] = base + sx + sy + 1;
        const double gx = 1.0 - fx, gy = 1.0 - fy, gz = 1.0 - fz;
        wt[0] = gx * gy * gz;
        wt[1] = gx * gy * fz;
        wt[2] = gx * fy * gz;
        wt[3] = gx * fy * fz;
        wt[4] = fx * gy * gz;
        wt[5] = fx * gy * fz;
        wt[6] = fx * fy * gz;
        wt[7] = fx * fy * fz;
        return true;
    }
};

/// |v-u|^(gamma-1), specialized for the endpoints of the hard-potential range.
struct RelativeSpeedPower {
    double gamma;
    explicit RelativeSpeedPower(double g) : gamma(g) {}
    double operator()(double d2) const {
        if (gamma == 1.0) return 1.0;
        if (gamma == 0.0) return 1.0 / std::sqrt(d2);
        return std::pow(d2, 0.5 * (gamma - 1.0));
    }
};

}  // namespace kmx::detail
