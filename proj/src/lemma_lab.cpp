#include "kmx/lemma_lab.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kmx/errors.hpp"
#include "kmx/norms.hpp"

namespace kmx {

namespace {

struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed + 0x9e3779b97f4a7c15ULL) {
        next();
        next();
    }
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform(double lo, double hi) {
        const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }
};

double l1_norm(const GridFunction& g) {
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) acc += g.grid().weight(i) * std::abs(g[i]);
    return acc;
}

ConstantReport base_report(const std::string& id, const SampleFamily& family, double r, double l,
                           const CollisionParams& params, const VelocityGrid& grid) {
    ConstantReport rep;
    rep.inequality = id;
    rep.r = r;
    rep.l = l;
    rep.gamma = params.gamma;
    rep.grid_n = grid.nodes_per_axis();
    rep.grid_extent = grid.extent();
    rep.samples_requested = family.count;
    return rep;
}

}  // namespace

GridFunction draw_sample(const SampleFamily& family, int index, int draw,
                         std::shared_ptr<const VelocityGrid> grid) {
    // One stream per (seed, index, draw) so samples are independent of
    // evaluation order.
    Rng rng(family.seed * 0x100000001b3ULL + static_cast<std::uint64_t>(index) * 2654435761ULL +
            static_cast<std::uint64_t>(draw) * 0x9e3779b9ULL);
    GridFunction g(grid);
    const std::size_t n = grid->size();
    const double amp = rng.uniform(family.amp_lo, family.amp_hi);
    switch (family.kind) {
        case SampleKind::maxwellian_modulated: {
            const double alpha = rng.uniform(0.3, 1.2);
            const Vec3 c{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
            const double depth = rng.uniform(0.0, 0.9);
            const double k = rng.uniform(0.5, 2.0);
            double dx = rng.uniform(-1.0, 1.0), dy = rng.uniform(-1.0, 1.0),
                   dz = rng.uniform(-1.0, 1.0);
            const double dn = std::sqrt(dx * dx + dy * dy + dz * dz) + 1e-12;
            dx /= dn;
            dy /= dn;
            dz /= dn;
            for (std::size_t i = 0; i < n; ++i) {
                const Vec3 v = grid->node(i);
                const double r2 = (v[0] - c[0]) * (v[0] - c[0]) + (v[1] - c[1]) * (v[1] - c[1]) +
                                  (v[2] - c[2]) * (v[2] - c[2]);
                const double phase = k * (dx * v[0] + dy * v[1] + dz * v[2]);
                g[i] = amp * (1.0 + depth * std::cos(phase)) * std::exp(-alpha * r2);
            }
            break;
        }
        case SampleKind::compact_bump: {
            const double rho = family.support_scale * rng.uniform(1.0, 2.5);
            const Vec3 c{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
            const double inv_rho2 = 1.0 / (rho * rho);
            for (std::size_t i = 0; i < n; ++i) {
                const Vec3 v = grid->node(i);
                const double r2 = (v[0] - c[0]) * (v[0] - c[0]) + (v[1] - c[1]) * (v[1] - c[1]) +
                                  (v[2] - c[2]) * (v[2] - c[2]);
                const double s = 1.0 - r2 * inv_rho2;
                g[i] = s > 0.0 ? amp * s * s : 0.0;
            }
            break;
        }
        case SampleKind::random_positive: {
            const int bumps = 4;
            double a[4], alpha[4];
            Vec3 c[4];
            for (int b = 0; b < bumps; ++b) {
                a[b] = rng.uniform(-1.0, 1.0);
                alpha[b] = rng.uniform(0.3, 1.0);
                c[b] = Vec3{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
                            rng.uniform(-2.0, 2.0)};
            }
            for (std::size_t i = 0; i < n; ++i) {
                const Vec3 v = grid->node(i);
                double acc = 0.0;
                for (int b = 0; b < bumps; ++b) {
                    const double r2 = (v[0] - c[b][0]) * (v[0] - c[b][0]) +
                                      (v[1] - c[b][1]) * (v[1] - c[b][1]) +
                                      (v[2] - c[b][2]) * (v[2] - c[b][2]);
                    acc += a[b] * std::exp(-alpha[b] * r2);
                }
                g[i] = amp * std::abs(acc);
            }
            break;
        }
    }
    return g;
}

ConstantReport estimate_gain_constant(const SampleFamily& family, double r, double l,
                                      const CollisionParams& params,
                                      std::shared_ptr<const VelocityGrid> grid,
                                      const SphereQuadrature& sphere, const EvalOptions& opts) {
    params.validate();
    const double boundary = 4.0 / (3.0 - params.gamma);
    if (r < boundary - 1e-12)
        throw DomainError("gain-constant estimate requires r >= 4/(3-gamma) = " +
                          std::to_string(boundary) +
                          "; use the low-r variant (reduced output weight) below that");
    const double rp = conjugate_exponent(r);
    if (!(l > 3.0 / rp))
        throw DomainError("gain-constant estimate requires l > 3/r' = " +
                          std::to_string(3.0 / rp));

    ConstantReport rep = base_report("gain_lr", family, r, l, params, *grid);
    const NormSpec spec{r, l, NormOrder::lr_v_linf_tx};
    for (int s = 0; s < family.count; ++s) {
        GridFunction g = draw_sample(family, s, 0, grid);
        GridFunction h = draw_sample(family, s, 1, grid);
        const double den = mixed_norm(g, spec) * mixed_norm(h, spec);
        if (den == 0.0) {
            ++rep.skipped;
            continue;
        }
        GridFunction gain = gamma_gain(g, h, params, sphere, opts);
        rep.ratios.push_back(mixed_norm(gain, spec) / den);
    }
    for (double x : rep.ratios) rep.max_ratio = std::max(rep.max_ratio, x);
    return rep;
}

double lowr_output_weight(double r, double l, double gamma) {
    return l - 0.5 * (gamma + 1.0) + 2.0 / conjugate_exponent(r);
}

ConstantReport estimate_gain_constant_lowr(const SampleFamily& family, double r, double l,
                                           const CollisionParams& params,
                                           std::shared_ptr<const VelocityGrid> grid,
                                           const SphereQuadrature& sphere,
                                           const EvalOptions& opts) {
    params.validate();
    const double boundary = 4.0 / (3.0 - params.gamma);
    if (!(r > 1.0) || r >= boundary)
        throw DomainError("low-r gain estimate requires r in (1, 4/(3-gamma)) = (1, " +
                          std::to_string(boundary) + "); use the plain variant above");
    const double rp = conjugate_exponent(r);
    if (!(l > 1.0 / rp + 0.5 * (params.gamma + 1.0)))
        throw DomainError("low-r gain estimate requires l > 1/r' + (gamma+1)/2 = " +
                          std::to_string(1.0 / rp + 0.5 * (params.gamma + 1.0)));

    ConstantReport rep = base_report("gain_low_r", family, r, l, params, *grid);
    const NormSpec in_spec{r, l, NormOrder::lr_v_linf_tx};
    const NormSpec out_spec{r, lowr_output_weight(r, l, params.gamma), NormOrder::lr_v_linf_tx};
    for (int s = 0; s < family.count; ++s) {
        GridFunction g = draw_sample(family, s, 0, grid);
        GridFunction h = draw_sample(family, s, 1, grid);
        const double den = mixed_norm(g, in_spec) * mixed_norm(h, in_spec);
        if (den == 0.0) {
            ++rep.skipped;
            continue;
        }
        GridFunction gain = gamma_gain(g, h, params, sphere, opts);
        rep.ratios.push_back(mixed_norm(gain, out_spec) / den);
    }
    for (double x : rep.ratios) rep.max_ratio = std::max(rep.max_ratio, x);
    return rep;
}

NonlinearBoundReports estimate_nonlinear_bounds(const SampleFamily& family, double r, double l,
                                                double n, double eta,
                                                const CollisionParams& params,
                                                std::shared_ptr<const VelocityGrid> grid,
                                                const SphereQuadrature& sphere,
                                                const EvalOptions& opts) {
    params.validate();
    if (!(n > 3.0))
        throw DomainError("nonlinear bounds need n > 3, got " + std::to_string(n));
    if (!(r > 1.0)) throw DomainError("nonlinear bounds need r > 1");
    const double rp = conjugate_exponent(r);
    if (!(l > 3.0 / rp))
        throw DomainError("nonlinear bounds need l > 3/r' = " + std::to_string(3.0 / rp));
    const double np = n / (n - 1.0);
    const double inv_r = (r == kInfExponent) ? 0.0 : 1.0 / r;

    NonlinearBoundReports out;
    out.loss = base_report("nonlinear_loss", family, r, l, params, *grid);
    out.gain = base_report("nonlinear_gain", family, r, l, params, *grid);
    out.loss.n_exponent = out.gain.n_exponent = n;
    out.gain.eta = eta;

    const NormSpec in_spec{r, l, NormOrder::lr_v_linf_tx};
    const NormSpec out_spec{r, l - params.gamma, NormOrder::lr_v_linf_tx};

    std::vector<double> lhs_all, t1_all, t2_all;
    for (int s = 0; s < family.count; ++s) {
        GridFunction g = draw_sample(family, s, 0, grid);
        const double g1 = l1_norm(g);
        const double gl = mixed_norm(g, in_spec);
        if (g1 == 0.0 || gl == 0.0) {
            ++out.loss.skipped;
            ++out.gain.skipped;
            continue;
        }
        GridFunction loss = gamma_loss(g, g, params, sphere, opts);
        out.loss.ratios.push_back(mixed_norm(loss, out_spec) / (g1 * gl));

        GridFunction gain = gamma_gain(g, g, params, sphere, opts);
        const double lhs = mixed_norm(gain, out_spec);
        const double t1 = std::pow(g1, 1.0 / (n * rp)) *
                          std::pow(gl, 1.0 + inv_r + 1.0 / (np * rp));
        const double t2 = std::pow(gl, 2.0) + std::pow(gl, 1.0 + inv_r);
        lhs_all.push_back(lhs);
        t1_all.push_back(t1);
        t2_all.push_back(t2);
        out.gain.ratios.push_back(lhs / t1);
    }
    for (double x : out.loss.ratios) out.loss.max_ratio = std::max(out.loss.max_ratio, x);
    for (double x : out.gain.ratios) out.gain.max_ratio = std::max(out.gain.max_ratio, x);

    // (C1, C2) covering every sample, minimizing C1 + C2: C1 is a decreasing
    // piecewise-linear function of C2, scanned coarsely then refined.
    if (!lhs_all.empty()) {
        auto c1_of = [&](double c2) {
            double c1 = 0.0;
            for (std::size_t s = 0; s < lhs_all.size(); ++s)
                c1 = std::max(c1, (lhs_all[s] - c2 * eta * t2_all[s]) / t1_all[s]);
            return std::max(c1, 0.0);
        };
        double c2_hi = 0.0;
        for (std::size_t s = 0; s < lhs_all.size(); ++s)
            c2_hi = std::max(c2_hi, lhs_all[s] / (eta * t2_all[s]));
        double best_c2 = 0.0, best_obj = c1_of(0.0);
        const int coarse = 256;
        for (int i = 1; i <= coarse; ++i) {
            const double c2 = c2_hi * i / coarse;
            const double obj = c1_of(c2) + c2;
            if (obj < best_obj) {
                best_obj = obj;
                best_c2 = c2;
            }
        }
        double lo = std::max(0.0, best_c2 - c2_hi / coarse);
        double hi = std::min(c2_hi, best_c2 + c2_hi / coarse);
        for (int i = 0; i <= coarse; ++i) {
            const double c2 = lo + (hi - lo) * i / coarse;
            const double obj = c1_of(c2) + c2;
            if (obj < best_obj) {
                best_obj = obj;
                best_c2 = c2;
            }
        }
        out.gain.c2 = best_c2;
        out.gain.c1 = c1_of(best_c2);
    }
    return out;
}

NuGrowthReport estimate_nu_growth(double gamma, double cb, double extent, int grid_n,
                                  int grid_n_refined, const EvalOptions& opts) {
    CollisionParams params{gamma, cb};
    params.validate();
    NuGrowthReport rep;
    rep.gamma = gamma;
    rep.grid_n = grid_n;
    rep.grid_n_refined = grid_n_refined;
    SphereQuadrature sphere(2, 4);  // unused by the loss fast path

    auto interval = [&](int N, double& lo, double& hi) {
        auto grid = build_velocity_grid(extent, N);
        auto nu = compute_nu(grid, params, sphere, opts);
        lo = std::numeric_limits<double>::infinity();
        hi = 0.0;
        for (std::size_t i = 0; i < nu->size(); ++i) {
            const double w = std::pow(1.0 + std::sqrt(norm2(grid->node(i))), gamma);
            const double ratio = (*nu)[i] / w;
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
    };
    interval(grid_n, rep.c_lo, rep.c_hi);
    interval(grid_n_refined, rep.c_lo_refined, rep.c_hi_refined);
    rep.drift = std::max(std::abs(rep.c_lo_refined - rep.c_lo) / rep.c_lo,
                         std::abs(rep.c_hi_refined - rep.c_hi) / rep.c_hi);
    rep.stable_within_10pct = rep.drift <= 0.10;
    return rep;
}

}  // namespace kmx
