#include "kmx/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace kmx {

namespace {

/// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
/// Nodes are computed for one half and mirrored so that x[k] == -x[n-1-k]
/// bitwise (the antipodal folding in the collision kernels relies on it).
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int half = (n + 1) / 2;
    for (int k = 0; k < half; ++k) {
        // Chebyshev-like initial guess for the k-th root (descending order).
        double xi = std::cos(std::numbers::pi * (k + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Recurrence for P_n(xi) and P_n'(xi).
            double p0 = 1.0, p1 = xi;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * xi * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
            const double dx = p1 / dp;
            xi -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        // One more residual evaluation for the weight.
        double p0 = 1.0, p1 = xi;
        for (int j = 2; j <= n; ++j) {
            const double p2 = ((2.0 * j - 1.0) * xi * p1 - (j - 1.0) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
        const double wk = 2.0 / ((1.0 - xi * xi) * dp * dp);
        x[k] = xi;
        w[k] = wk;
        x[n - 1 - k] = -xi;
        w[n - 1 - k] = wk;
    }
    if (n % 2 == 1) x[n / 2] = 0.0;
}

}  // namespace

VelocityGrid::VelocityGrid(double extent, int nodes_per_axis)
    : extent_(extent), n_(nodes_per_axis) {
    if (!(extent > 0.0))
        throw ConfigError("velocity grid: extent R must be positive, got " +
                          std::to_string(extent));
    if (nodes_per_axis < 2)
        throw ConfigError("velocity grid: need at least 2 nodes per axis, got " +
                          std::to_string(nodes_per_axis));
    h_ = 2.0 * extent_ / (n_ - 1);
    axis_.resize(n_);
    axis_w_.resize(n_);
    for (int i = 0; i < n_; ++i) {
        axis_[i] = -extent_ + h_ * i;
        axis_w_[i] = (i == 0 || i == n_ - 1) ? 0.5 * h_ : h_;
    }
    if (n_ % 2 == 1) axis_[n_ / 2] = 0.0;
    weights_.resize(size());
    std::size_t idx = 0;
    for (int ix = 0; ix < n_; ++ix)
        for (int iy = 0; iy < n_; ++iy)
            for (int iz = 0; iz < n_; ++iz, ++idx)
                weights_[idx] = axis_w_[ix] * axis_w_[iy] * axis_w_[iz];
}

SpatialGrid SpatialGrid::homogeneous() { return SpatialGrid(SpatialMode::homogeneous, 0.0, 1); }

SpatialGrid SpatialGrid::slab1d(double length, int nodes) {
    if (!(length > 0.0)) throw ConfigError("spatial grid: slab length must be positive");
    if (nodes < 1) throw ConfigError("spatial grid: need at least 1 node");
    return SpatialGrid(SpatialMode::slab1d, length, nodes);
}

SphereQuadrature::SphereQuadrature(int n_polar, int n_azimuth)
    : n_theta_(n_polar), n_phi_(n_azimuth) {
    if (n_polar < 1 || n_azimuth < 1)
        throw ConfigError("sphere quadrature: polar and azimuthal counts must be >= 1");
    std::vector<double> c, wgl;
    gauss_legendre(n_polar, c, wgl);

    // Azimuthal table with exact negation for the +pi shift (even n_phi).
    std::vector<double> cp(n_azimuth), sp(n_azimuth);
    const int half = n_azimuth / 2;
    for (int j = 0; j < n_azimuth; ++j) {
        const double phi = 2.0 * std::numbers::pi * j / n_azimuth;
        cp[j] = std::cos(phi);
        sp[j] = std::sin(phi);
    }
    if (n_azimuth % 2 == 0) {
        for (int j = 0; j < half; ++j) {
            cp[j + half] = -cp[j];
            sp[j + half] = -sp[j];
        }
    }

    const double wphi = 2.0 * std::numbers::pi / n_azimuth;
    nodes_.reserve(static_cast<std::size_t>(n_polar) * n_azimuth);
    weights_.reserve(nodes_.capacity());
    for (int a = 0; a < n_polar; ++a) {
        const double s = std::sqrt(std::max(0.0, 1.0 - c[a] * c[a]));
        for (int j = 0; j < n_azimuth; ++j) {
            nodes_.push_back(Vec3{c[a], s * cp[j], s * sp[j]});
            weights_.push_back(wgl[a] * wphi);
        }
    }
}

GridFunction::GridFunction(std::shared_ptr<const VelocityGrid> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_->size())
        throw ContractError("grid function: value count " + std::to_string(values_.size()) +
                            " does not match grid size " + std::to_string(grid_->size()));
}

GridFunction::GridFunction(std::shared_ptr<const VelocityGrid> grid)
    : grid_(std::move(grid)), values_(grid_->size(), 0.0) {}

DistributionField::DistributionField(std::shared_ptr<const SpatialGrid> xgrid,
                                     std::shared_ptr<const VelocityGrid> vgrid)
    : xgrid_(std::move(xgrid)),
      vgrid_(std::move(vgrid)),
      values_(static_cast<std::size_t>(xgrid_->nodes()) * vgrid_->size(), 0.0) {}

DistributionField::DistributionField(std::shared_ptr<const SpatialGrid> xgrid,
                                     std::shared_ptr<const VelocityGrid> vgrid,
                                     std::vector<double> values)
    : xgrid_(std::move(xgrid)), vgrid_(std::move(vgrid)), values_(std::move(values)) {
    if (values_.size() != static_cast<std::size_t>(xgrid_->nodes()) * vgrid_->size())
        throw ContractError("distribution field: value count does not match N_x * N^3");
}

bool DistributionField::all_finite() const {
    for (double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

std::shared_ptr<const VelocityGrid> build_velocity_grid(double extent, int nodes_per_axis) {
    return std::make_shared<const VelocityGrid>(extent, nodes_per_axis);
}

std::shared_ptr<const SphereQuadrature> build_sphere_quadrature(int n_polar, int n_azimuth) {
    return std::make_shared<const SphereQuadrature>(n_polar, n_azimuth);
}

double interpolate(const VelocityGrid& grid, std::span<const double> values, const Vec3& p) {
    const double R = grid.extent();
    const int n = grid.nodes_per_axis();
    const double inv_h = 1.0 / grid.spacing();
    double s[3];
    for (int d = 0; d < 3; ++d) {
        if (p[d] < -R || p[d] > R) return 0.0;
        s[d] = (p[d] + R) * inv_h;
    }
    int i0[3];
    double f[3];
    for (int d = 0; d < 3; ++d) {
        int i = static_cast<int>(s[d]);
        if (i > n - 2) i = n - 2;
        i0[d] = i;
        f[d] = s[d] - i;
    }
    const std::size_t base = grid.flat_index(i0[0], i0[1], i0[2]);
    const std::size_t sx = static_cast<std::size_t>(n) * n;
    const std::size_t sy = n;
    const double* v = values.data() + base;
    const double c000 = v[0], c001 = v[1];
    const double c010 = v[sy], c011 = v[sy + 1];
    const double c100 = v[sx], c101 = v[sx + 1];
    const double c110 = v[sx + sy], c111 = v[sx + sy + 1];
    const double fz = f[2], fy = f[1], fx = f[0];
    const double c00 = c000 + fz * (c001 - c000);
    const double c01 = c010 + fz * (c011 - c010);
    const double c10 = c100 + fz * (c101 - c100);
    const double c11 = c110 + fz * (c111 - c110);
    const double c0 = c00 + fy * (c01 - c00);
    const double c1 = c10 + fy * (c11 - c10);
    return c0 + fx * (c1 - c0);
}

double interpolate(const GridFunction& g, const Vec3& p) {
    return interpolate(g.grid(), g.values(), p);
}

double integrate_v(const VelocityGrid& grid, std::span<const double> values,
                   const std::function<double(const Vec3&)>& weight) {
    double acc = 0.0;
    const std::size_t n = grid.size();
    if (!weight) {
        for (std::size_t i = 0; i < n; ++i) acc += values[i] * grid.weight(i);
    } else {
        for (std::size_t i = 0; i < n; ++i)
            acc += weight(grid.node(i)) * values[i] * grid.weight(i);
    }
    return acc;
}

double integrate_v(const GridFunction& g, const std::function<double(const Vec3&)>& weight) {
    return integrate_v(g.grid(), g.values(), weight);
}

GridFunction maxwellian(std::shared_ptr<const VelocityGrid> grid) {
    GridFunction out(grid);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = maxwellian_at(grid->node(i));
    return out;
}

GridFunction sqrt_maxwellian(std::shared_ptr<const VelocityGrid> grid) {
    GridFunction out(grid);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = sqrt_maxwellian_at(grid->node(i));
    return out;
}

}  // namespace kmx
