#include "kmx/linearized.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "kmx/detail/quadrature_kernels.hpp"
#include "kmx/errors.hpp"
#include "kmx/parallel.hpp"

namespace kmx {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double rel_speed_pow(double d2, double gamma) {
    if (gamma == 1.0) return std::sqrt(d2);
    if (gamma == 0.0) return 1.0;
    if (gamma == -1.0) return 1.0 / std::sqrt(d2);
    return std::pow(d2, 0.5 * gamma);
}

inline double weight_w(const Vec3& v) { return 1.0 + std::sqrt(norm2(v)); }

}  // namespace

GridFunction apply_K(const GridFunction& f, const CollisionParams& params,
                     const SphereQuadrature& sphere, const EvalOptions& opts) {
    GridFunction sq = sqrt_maxwellian(f.grid_ptr());
    GridFunction a = gamma_gain(f, sq, params, sphere, opts);
    GridFunction b = gamma_gain(sq, f, params, sphere, opts);
    GridFunction c = gamma_loss(sq, f, params, sphere, opts);
    GridFunction out(f.grid_ptr());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i] - c[i];
    return out;
}

KernelMatrix::KernelMatrix(std::shared_ptr<const VelocityGrid> grid, std::vector<double> entries)
    : grid_(std::move(grid)), entries_(std::move(entries)) {
    if (entries_.size() != grid_->size() * grid_->size())
        throw ContractError("kernel matrix: entry count does not match N^3 x N^3");
    for (double e : entries_)
        if (!std::isfinite(e)) throw ContractError("kernel matrix: non-finite entry");
}

double KernelMatrix::symmetry_defect() const {
    const std::size_t n = dim();
    double mx = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double kij = entry(i, j);
            const double d = std::abs(kij - entry(j, i)) / (1.0 + std::abs(kij));
            mx = std::max(mx, d);
        }
    return mx;
}

GridFunction KernelMatrix::apply(const GridFunction& f) const {
    if (!f.grid().same_grid(*grid_))
        throw ContractError("kernel matrix apply: grid mismatch");
    const std::size_t n = dim();
    std::vector<double> fw(n);
    for (std::size_t j = 0; j < n; ++j) fw[j] = f[j] * grid_->weight(j);
    GridFunction out(f.grid_ptr());
    for (std::size_t i = 0; i < n; ++i) {
        const double* row_i = entries_.data() + i * n;
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += row_i[j] * fw[j];
        out[i] = acc;
    }
    return out;
}

KernelMatrix extract_kernel_matrix(std::shared_ptr<const VelocityGrid> grid,
                                   const CollisionParams& params, const SphereQuadrature& sphere,
                                   const EvalOptions& opts, std::size_t cap_nodes) {
    params.validate();
    const std::size_t n = grid->size();
    if (n > cap_nodes)
        throw ResourceError("kernel matrix extraction: N^3 = " + std::to_string(n) +
                            " exceeds the cap " + std::to_string(cap_nodes));
    const VelocityGrid& g = *grid;
    const detail::FoldedSphere fs = detail::fold_sphere(sphere);
    GridFunction sq = sqrt_maxwellian(grid);
    const detail::InterpGrid S(g, sq.values().data());

    std::vector<double> x(n), y(n), z(n), r2(n), w(n), half_mu(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 v = g.node(i);
        x[i] = v[0];
        y[i] = v[1];
        z[i] = v[2];
        r2[i] = norm2(v);
        w[i] = g.weight(i);
        half_mu[i] = sqrt_maxwellian_at(v);
    }

    const double gamma = params.gamma;
    std::vector<double> entries(n * n, 0.0);

    parallel_for(n, opts.threads, [&](std::size_t i) {
        double* row = entries.data() + i * n;
        const double vx = x[i], vy = y[i], vz = z[i];
        for (std::size_t j = 0; j < n; ++j) {
            const double rx = x[j] - vx, ry = y[j] - vy, rz = z[j] - vz;
            const double d2 = rx * rx + ry * ry + rz * rz;
            if (d2 == 0.0) continue;
            const double pre =
                params.cb * w[j] * half_mu[j] * (gamma == 1.0 ? 1.0 : rel_speed_pow(d2, gamma - 1.0));
            for (std::size_t k = 0; k < fs.size(); ++k) {
                const double ox = fs.ox[k], oy = fs.oy[k], oz = fs.oz[k];
                const double t = rx * ox + ry * oy + rz * oz;
                const double coeff = pre * fs.w[k] * std::abs(t);
                const double px = vx + t * ox, py = vy + t * oy, pz = vz + t * oz;
                const double qx = x[j] - t * ox, qy = y[j] - t * oy, qz = z[j] - t * oz;
                std::size_t idx[8];
                double wt[8];
                // Gamma_gain(f, sqrt_mu): f interpolated at v'.
                if (S.cell(px, py, pz, idx, wt)) {
                    const double su = S.at(qx, qy, qz);
                    const double c = coeff * su;
                    for (int m = 0; m < 8; ++m) row[idx[m]] += c * wt[m];
                }
                // Gamma_gain(sqrt_mu, f): f interpolated at u'.
                if (S.cell(qx, qy, qz, idx, wt)) {
                    const double sv = S.at(px, py, pz);
                    const double c = coeff * sv;
                    for (int m = 0; m < 8; ++m) row[idx[m]] += c * wt[m];
                }
            }
        }
        // Gamma_loss(sqrt_mu, f) acts diagonally in u.
        for (std::size_t j = 0; j < n; ++j) {
            const double rx = x[j] - vx, ry = y[j] - vy, rz = z[j] - vz;
            const double d2 = rx * rx + ry * ry + rz * rz;
            if (d2 == 0.0) continue;
            row[j] -= kTwoPi * params.cb * half_mu[i] * w[j] * rel_speed_pow(d2, gamma) *
                      half_mu[j];
        }
        // Fold out the u-quadrature weight: entries approximate the kernel density.
        for (std::size_t j = 0; j < n; ++j) row[j] /= w[j];
    });
    return KernelMatrix(grid, std::move(entries));
}

KernelBoundReport check_kernel_bounds(const KernelMatrix& K, double l) {
    const VelocityGrid& g = K.grid();
    const std::size_t n = K.dim();
    KernelBoundReport rep;
    rep.l = l;

    bool any_nonzero = false;
    for (std::size_t i = 0; i < n && !any_nonzero; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (K.entry(i, j) != 0.0) {
                any_nonzero = true;
                break;
            }
    if (!any_nonzero)
        throw DiagnosticError("kernel bound check: all kernel entries are zero, nothing to fit");

    std::vector<double> r2(n), wl(n);
    for (std::size_t i = 0; i < n; ++i) {
        r2[i] = norm2(g.node(i));
        wl[i] = std::pow(weight_w(g.node(i)), l);
    }
    const double band = 2.0 * g.spacing();

    rep.profile.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double prof = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double kij = K.entry(i, j);
            const double aij = std::abs(kij);
            prof += aij * (wl[i] / wl[j]) * g.weight(j);
            if (j == i) continue;
            const Vec3 vi = g.node(i);
            const Vec3 uj = g.node(j);
            const double dx = vi[0] - uj[0], dy = vi[1] - uj[1], dz = vi[2] - uj[2];
            const double d2 = dx * dx + dy * dy + dz * dz;
            const double d = std::sqrt(d2);
            const double s1 = d * std::exp(-(r2[i] + r2[j]) / 8.0);
            const double diffr2 = r2[i] - r2[j];
            const double s2 = std::exp(-d2 / 8.0 - diffr2 * diffr2 / (8.0 * d2)) / d;
            const double ratio = aij / (s1 + s2);
            rep.c_joint = std::max(rep.c_joint, ratio);
            if (d <= band) rep.near_band_ratio = std::max(rep.near_band_ratio, ratio);
            if (s1 >= s2)
                rep.c1 = std::max(rep.c1, ratio);
            else
                rep.c2 = std::max(rep.c2, ratio);
        }
        rep.profile[i] = prof;
    }
    rep.pointwise_ok = std::isfinite(rep.c_joint);

    rep.profile_finite = true;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(rep.profile[i])) rep.profile_finite = false;
        rep.profile_max = std::max(rep.profile_max, rep.profile[i]);
        if (rep.profile[i] <= 0.0) continue;
        const double lx = std::log(1.0 + std::sqrt(r2[i]));
        const double ly = std::log(rep.profile[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++m;
    }
    if (m < 2) throw DiagnosticError("kernel bound check: degenerate profile, cannot fit decay");
    const double denom = m * sxx - sx * sx;
    rep.decay_exponent = (m * sxy - sx * sy) / denom;
    rep.decay_intercept = (sy - rep.decay_exponent * sx) / m;
    rep.decay_ok = rep.profile_finite && rep.decay_exponent <= -0.8;
    return rep;
}

DistributionField compute_g(const DistributionField& f, const CollisionParams& params,
                            const SphereQuadrature& sphere, const EvalOptions& opts) {
    params.validate();
    const VelocityGrid& vg = f.vgrid();
    const std::size_t n = vg.size();
    auto nu = compute_nu(f.vgrid_ptr(), params, sphere, opts);

    std::vector<double> x(n), y(n), z(n), wh(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 v = vg.node(i);
        x[i] = v[0];
        y[i] = v[1];
        z[i] = v[2];
        wh[i] = vg.weight(i) * sqrt_maxwellian_at(v);
    }

    DistributionField out(f.xgrid_ptr(), f.vgrid_ptr());
    const double gamma = params.gamma;
    for (int jx = 0; jx < f.xgrid().nodes(); ++jx) {
        const auto fj = f.slice(jx);
        auto oj = out.slice(jx);
        parallel_for(n, opts.threads, [&](std::size_t i) {
            const double vx = x[i], vy = y[i], vz = z[i];
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double dx = x[j] - vx, dy = y[j] - vy, dz = z[j] - vz;
                const double d2 = dx * dx + dy * dy + dz * dz;
                if (d2 == 0.0) continue;
                acc += wh[j] * fj[j] * rel_speed_pow(d2, gamma);
            }
            oj[i] = (*nu)[i] + kTwoPi * params.cb * acc;
        });
    }
    return out;
}

GLowerBoundReport check_g_lower_bound(std::span<const DistributionField> fields, double dt,
                                      const CollisionParams& params,
                                      const SphereQuadrature& sphere, int sample_count,
                                      std::uint64_t seed, const EvalOptions& opts) {
    GLowerBoundReport rep;
    if (fields.empty()) throw ContractError("g lower bound check: empty trajectory");
    const std::size_t steps = fields.size();
    const VelocityGrid& vg = fields[0].vgrid();
    const SpatialGrid& xg = fields[0].xgrid();
    auto nu = compute_nu(fields[0].vgrid_ptr(), params, sphere, opts);

    std::vector<DistributionField> gs;
    gs.reserve(steps);
    for (const auto& f : fields) gs.push_back(compute_g(f, params, sphere, opts));

    const bool slab = xg.mode() == SpatialMode::slab1d;
    const int nx = xg.nodes();
    const double cell = slab ? xg.length() / nx : 1.0;

    auto g_at = [&](std::size_t step, int jx_ref, double shift_x, std::size_t iv) {
        if (!slab) return gs[step].slice(0)[iv];
        double s = (xg.coord(jx_ref) + shift_x) / cell;
        s -= std::floor(s / nx) * nx;
        int i0 = static_cast<int>(s);
        if (i0 >= nx) i0 = 0;
        const double fr = s - i0;
        const int i1 = (i0 + 1) % nx;
        return (1.0 - fr) * gs[step].slice(i0)[iv] + fr * gs[step].slice(i1)[iv];
    };

    std::uint64_t state = seed ? seed : 0x9e3779b97f4a7c15ULL;
    auto next = [&state]() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return state;
    };

    for (int s = 0; s < sample_count; ++s) {
        const std::size_t iv = next() % vg.size();
        const int jx = static_cast<int>(next() % static_cast<std::uint64_t>(nx));
        std::size_t ka = next() % steps;
        std::size_t kb = next() % steps;
        if (ka == kb) kb = (kb + 1) % steps;
        const std::size_t ks = std::min(ka, kb);
        const std::size_t kt = std::max(ka, kb);
        const double v1 = vg.node(iv)[0];
        const double tt = dt * kt;

        // trapezoid of g(s1, x - v1 (t - s1), v) over stored steps ks..kt
        double integral = 0.0;
        for (std::size_t m = ks; m < kt; ++m) {
            const double sa = dt * m, sb = dt * (m + 1);
            const double ga = g_at(m, jx, -v1 * (tt - sa), iv);
            const double gb = g_at(m + 1, jx, -v1 * (tt - sb), iv);
            integral += 0.5 * dt * (ga + gb);
        }
        const double lhs = -integral;
        const double rhs = -0.5 * (*nu)[iv] * (tt - dt * ks);
        const double margin = lhs - rhs;
        ++rep.samples;
        if (margin <= 1e-12 * (1.0 + std::abs(rhs))) ++rep.satisfied;
        rep.worst_margin = std::max(rep.worst_margin, margin);
    }
    rep.fraction = rep.samples ? static_cast<double>(rep.satisfied) / rep.samples : 1.0;
    return rep;
}

}  // namespace kmx
