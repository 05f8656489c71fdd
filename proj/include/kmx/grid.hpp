#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "kmx/errors.hpp"

namespace kmx {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm2(const Vec3& a) { return dot(a, a); }

/// Truncated uniform tensor lattice on [-R,R]^3 with trapezoidal quadrature
/// weights (boundary weights halved per axis). Immutable once built.
class VelocityGrid {
public:
    VelocityGrid(double extent, int nodes_per_axis);

    double extent() const { return extent_; }
    int nodes_per_axis() const { return n_; }
    double spacing() const { return h_; }
    std::size_t size() const { return static_cast<std::size_t>(n_) * n_ * n_; }

    double axis_coord(int i) const { return axis_[static_cast<std::size_t>(i)]; }
    double axis_weight(int i) const { return axis_w_[static_cast<std::size_t>(i)]; }

    /// Lexicographic flattening: index = (ix*N + iy)*N + iz.
    std::size_t flat_index(int ix, int iy, int iz) const {
        return (static_cast<std::size_t>(ix) * n_ + iy) * n_ + iz;
    }
    Vec3 node(std::size_t flat) const {
        const int iz = static_cast<int>(flat % n_);
        const int iy = static_cast<int>((flat / n_) % n_);
        const int ix = static_cast<int>(flat / (static_cast<std::size_t>(n_) * n_));
        return {axis_[ix], axis_[iy], axis_[iz]};
    }
    double weight(std::size_t flat) const { return weights_[flat]; }
    std::span<const double> weights() const { return weights_; }

    bool same_grid(const VelocityGrid& other) const {
        return this == &other || (n_ == other.n_ && extent_ == other.extent_);
    }

private:
    double extent_;
    int n_;
    double h_;
    std::vector<double> axis_;
    std::vector<double> axis_w_;
    std::vector<double> weights_;  // per-node product weights, size N^3
};

enum class SpatialMode { homogeneous, slab1d };

/// Physical space: either a single homogeneous point (unit measure) or a
/// periodic 1D slab with nodes x_j = j L / N_x.
class SpatialGrid {
public:
    static SpatialGrid homogeneous();
    static SpatialGrid slab1d(double length, int nodes);

    SpatialMode mode() const { return mode_; }
    int nodes() const { return nx_; }
    double length() const { return length_; }
    /// Cell measure used for x-integrals (1 in homogeneous mode).
    double cell_measure() const { return mode_ == SpatialMode::homogeneous ? 1.0 : length_ / nx_; }
    double coord(int j) const { return mode_ == SpatialMode::homogeneous ? 0.0 : length_ * j / nx_; }
    bool same_grid(const SpatialGrid& other) const {
        return mode_ == other.mode_ && nx_ == other.nx_ && length_ == other.length_;
    }

private:
    SpatialGrid(SpatialMode m, double length, int nodes) : mode_(m), length_(length), nx_(nodes) {}
    SpatialMode mode_;
    double length_;
    int nx_;
};

/// Product quadrature on S^2: Gauss-Legendre in cos(theta) against the e1
/// axis, uniform in the azimuthal angle. Node set is exactly closed under
/// omega -> -omega whenever n_phi is even (mirrored coordinates are exact
/// negations by construction).
class SphereQuadrature {
public:
    SphereQuadrature(int n_polar, int n_azimuth);

    int n_polar() const { return n_theta_; }
    int n_azimuth() const { return n_phi_; }
    std::size_t size() const { return nodes_.size(); }
    const Vec3& node(std::size_t k) const { return nodes_[k]; }
    double weight(std::size_t k) const { return weights_[k]; }
    std::span<const Vec3> nodes() const { return nodes_; }
    std::span<const double> weights() const { return weights_; }

    bool antipodal_closed() const { return n_phi_ % 2 == 0; }

private:
    int n_theta_;
    int n_phi_;
    std::vector<Vec3> nodes_;
    std::vector<double> weights_;
};

/// One real value per velocity node.
class GridFunction {
public:
    GridFunction(std::shared_ptr<const VelocityGrid> grid, std::vector<double> values);
    explicit GridFunction(std::shared_ptr<const VelocityGrid> grid);

    const VelocityGrid& grid() const { return *grid_; }
    std::shared_ptr<const VelocityGrid> grid_ptr() const { return grid_; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    std::size_t size() const { return values_.size(); }

private:
    std::shared_ptr<const VelocityGrid> grid_;
    std::vector<double> values_;
};

/// Values on x-grid x v-grid, x-major (slice j is contiguous over v).
class DistributionField {
public:
    DistributionField(std::shared_ptr<const SpatialGrid> xgrid,
                      std::shared_ptr<const VelocityGrid> vgrid);
    DistributionField(std::shared_ptr<const SpatialGrid> xgrid,
                      std::shared_ptr<const VelocityGrid> vgrid, std::vector<double> values);

    const SpatialGrid& xgrid() const { return *xgrid_; }
    const VelocityGrid& vgrid() const { return *vgrid_; }
    std::shared_ptr<const SpatialGrid> xgrid_ptr() const { return xgrid_; }
    std::shared_ptr<const VelocityGrid> vgrid_ptr() const { return vgrid_; }

    std::span<double> slice(int j) {
        return std::span<double>(values_).subspan(static_cast<std::size_t>(j) * vgrid_->size(),
                                                  vgrid_->size());
    }
    std::span<const double> slice(int j) const {
        return std::span<const double>(values_).subspan(
            static_cast<std::size_t>(j) * vgrid_->size(), vgrid_->size());
    }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    std::size_t size() const { return values_.size(); }
    bool all_finite() const;

private:
    std::shared_ptr<const SpatialGrid> xgrid_;
    std::shared_ptr<const VelocityGrid> vgrid_;
    std::vector<double> values_;
};

/// pre: R > 0, N >= 2. Weights sum to (2R)^3.
std::shared_ptr<const VelocityGrid> build_velocity_grid(double extent, int nodes_per_axis);

/// pre: n_polar >= 1, n_azimuth >= 1. Weights sum to 4*pi.
std::shared_ptr<const SphereQuadrature> build_sphere_quadrature(int n_polar, int n_azimuth);

/// Trilinear interpolation of nodal values inside [-R,R]^3; 0 outside
/// (distribution-tail truncation, not an error). Nested-lerp form: exact on
/// nodes, on affine data, and on constant fields.
double interpolate(const GridFunction& g, const Vec3& p);

/// Same, operating on a raw value span backed by `grid`.
double interpolate(const VelocityGrid& grid, std::span<const double> values, const Vec3& p);

/// Sum_i weight(v_i) g(v_i) w_i. `weight` defaults to 1.
double integrate_v(const GridFunction& g,
                   const std::function<double(const Vec3&)>& weight = nullptr);
double integrate_v(const VelocityGrid& grid, std::span<const double> values,
                   const std::function<double(const Vec3&)>& weight = nullptr);

/// Nodal samples of exp(-|v|^2) (the global equilibrium) and exp(-|v|^2/2).
GridFunction maxwellian(std::shared_ptr<const VelocityGrid> grid);
GridFunction sqrt_maxwellian(std::shared_ptr<const VelocityGrid> grid);

inline double maxwellian_at(const Vec3& v) { return std::exp(-norm2(v)); }
inline double sqrt_maxwellian_at(const Vec3& v) { return std::exp(-0.5 * norm2(v)); }

}  // namespace kmx
