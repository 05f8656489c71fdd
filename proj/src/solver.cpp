#include "kmx/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kmx/linearized.hpp"

namespace kmx {

namespace {

/// xorshift with splitmix-style seeding; all draws below go through these so
/// fields are reproducible bit-for-bit across standard libraries.
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

/// Largest nonnegative a with mu + a * sqrt(mu) * shape >= 0 at every node,
/// given the shape evaluated per (x,v) node.
double positivity_cap(const DistributionField& shape) {
    const VelocityGrid& vg = shape.vgrid();
    double cap = std::numeric_limits<double>::infinity();
    for (int j = 0; j < shape.xgrid().nodes(); ++j) {
        const auto s = shape.slice(j);
        for (std::size_t i = 0; i < vg.size(); ++i) {
            if (s[i] >= 0.0) continue;
            cap = std::min(cap, sqrt_maxwellian_at(vg.node(i)) / (-s[i]));
        }
    }
    return cap;
}

DistributionField make_shape(const InitialDataSpec& spec,
                             std::shared_ptr<const SpatialGrid> xgrid,
                             std::shared_ptr<const VelocityGrid> vgrid) {
    DistributionField shape(xgrid, vgrid);
    const VelocityGrid& vg = *vgrid;
    const SpatialGrid& xg = *xgrid;
    const std::size_t n = vg.size();
    const bool slab = xg.mode() == SpatialMode::slab1d;

    switch (spec.kind) {
        case InitKind::zero:
            break;
        case InitKind::gaussian_bump: {
            const double inv_w2 = 1.0 / (spec.width * spec.width);
            for (int j = 0; j < xg.nodes(); ++j) {
                const double xmod =
                    slab ? 1.0 + spec.x_modulation *
                                     std::cos(2.0 * std::numbers::pi * xg.coord(j) / xg.length())
                         : 1.0;
                auto s = shape.slice(j);
                for (std::size_t i = 0; i < n; ++i) {
                    const Vec3 v = vg.node(i);
                    const double dx = v[0] - spec.center[0];
                    const double dy = v[1] - spec.center[1];
                    const double dz = v[2] - spec.center[2];
                    s[i] = xmod * std::exp(-(dx * dx + dy * dy + dz * dz) * inv_w2);
                }
            }
            break;
        }
        case InitKind::two_temperature: {
            // f0 = (exp(-|v|^2/(2 T1)) - exp(-|v|^2/(2 T2))) / sqrt(mu); both
            // temperatures below 1 keep the ratio decaying on the grid.
            for (int j = 0; j < xg.nodes(); ++j) {
                auto s = shape.slice(j);
                for (std::size_t i = 0; i < n; ++i) {
                    const double r2 = norm2(vg.node(i));
                    s[i] = (std::exp(-r2 / (2.0 * spec.temp1)) - std::exp(-r2 / (2.0 * spec.temp2))) /
                           sqrt_maxwellian_at(vg.node(i));
                }
            }
            break;
        }
        case InitKind::random_smooth: {
            Rng rng(spec.seed);
            const int bumps = 4;
            std::vector<double> amp(bumps), alpha(bumps);
            std::vector<Vec3> c(bumps);
            for (int b = 0; b < bumps; ++b) {
                amp[b] = rng.uniform(-1.0, 1.0);
                alpha[b] = rng.uniform(0.4, 1.2);
                c[b] = Vec3{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5),
                            rng.uniform(-1.5, 1.5)};
            }
            const double xphase = rng.uniform(0.0, 2.0 * std::numbers::pi);
            const double xdepth = slab ? rng.uniform(0.0, 0.5) : 0.0;
            for (int j = 0; j < xg.nodes(); ++j) {
                const double xmod =
                    slab ? 1.0 + xdepth * std::cos(2.0 * std::numbers::pi * xg.coord(j) /
                                                       xg.length() +
                                                   xphase)
                         : 1.0;
                auto s = shape.slice(j);
                for (std::size_t i = 0; i < n; ++i) {
                    const Vec3 v = vg.node(i);
                    double acc = 0.0;
                    for (int b = 0; b < bumps; ++b) {
                        const double dx = v[0] - c[b][0];
                        const double dy = v[1] - c[b][1];
                        const double dz = v[2] - c[b][2];
                        acc += amp[b] * std::exp(-alpha[b] * (dx * dx + dy * dy + dz * dz));
                    }
                    s[i] = xmod * acc;
                }
            }
            break;
        }
    }
    return shape;
}

/// Per-slice collision source K f + Gamma_gain(f,f) [- Gamma_loss(f,f)].
DistributionField collision_source(const DistributionField& f, const CollisionParams& params,
                                   const SphereQuadrature& sphere, bool include_loss,
                                   const EvalOptions& eval) {
    DistributionField out(f.xgrid_ptr(), f.vgrid_ptr());
    for (int j = 0; j < f.xgrid().nodes(); ++j) {
        GridFunction fj(f.vgrid_ptr(),
                        std::vector<double>(f.slice(j).begin(), f.slice(j).end()));
        GridFunction kf = apply_K(fj, params, sphere, eval);
        GridFunction gain = gamma_gain(fj, fj, params, sphere, eval);
        auto o = out.slice(j);
        if (include_loss) {
            GridFunction loss = gamma_loss(fj, fj, params, sphere, eval);
            for (std::size_t i = 0; i < kf.size(); ++i) o[i] = kf[i] + gain[i] - loss[i];
        } else {
            for (std::size_t i = 0; i < kf.size(); ++i) o[i] = kf[i] + gain[i];
        }
    }
    return out;
}

}  // namespace

InitialDataResult build_initial_data(const InitialDataSpec& spec,
                                     std::shared_ptr<const SpatialGrid> xgrid,
                                     std::shared_ptr<const VelocityGrid> vgrid) {
    DistributionField shape = make_shape(spec, xgrid, vgrid);
    InitialDataResult res{DistributionField(xgrid, vgrid), false, spec.amplitude};
    if (spec.kind == InitKind::zero || spec.amplitude == 0.0) {
        res.amplitude_used = 0.0;
        return res;
    }
    double a = spec.amplitude;
    const double cap = positivity_cap(shape);
    if (std::abs(a) > cap) {
        a = (a > 0.0 ? cap : -cap) * 0.999;
        res.clamped = true;
    }
    res.amplitude_used = a;
    auto vals = res.f0.values();
    const auto sv = shape.values();
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = a * sv[i];
    return res;
}

DistributionField free_stream(const DistributionField& f, double dt) {
    if (f.xgrid().mode() == SpatialMode::homogeneous) return f;
    const SpatialGrid& xg = f.xgrid();
    const VelocityGrid& vg = f.vgrid();
    const int nx = xg.nodes();
    const double cell = xg.length() / nx;
    DistributionField out(f.xgrid_ptr(), f.vgrid_ptr());
    for (std::size_t i = 0; i < vg.size(); ++i) {
        const double shift = vg.node(i)[0] * dt / cell;  // transport along v1 only
        for (int j = 0; j < nx; ++j) {
            double s = static_cast<double>(j) - shift;
            s -= std::floor(s / nx) * nx;
            int i0 = static_cast<int>(s);
            if (i0 >= nx) i0 = 0;
            const double fr = s - i0;
            const int i1 = (i0 + 1) % nx;
            out.slice(j)[i] = f.slice(i0)[i] + fr * (f.slice(i1)[i] - f.slice(i0)[i]);
        }
    }
    return out;
}

DistributionField march_step(const DistributionField& state, double dt,
                             const CollisionParams& params, const SphereQuadrature& sphere,
                             const MarchOptions& opts) {
    params.validate();
    auto nu = compute_nu(state.vgrid_ptr(), params, sphere, opts.eval);
    double nu_max = 0.0;
    for (std::size_t i = 0; i < nu->size(); ++i) nu_max = std::max(nu_max, (*nu)[i]);
    if (dt > opts.dt_cap_factor / nu_max)
        throw StabilityError("march step: dt = " + std::to_string(dt) +
                             " exceeds the stability cap " +
                             std::to_string(opts.dt_cap_factor / nu_max));

    const std::size_t n = state.vgrid().size();
    DistributionField streamed = free_stream(state, dt);

    if (opts.disable_collision) {
        // Pure damped streaming: exp(-nu dt) f(x - v1 dt, v).
        DistributionField out(state.xgrid_ptr(), state.vgrid_ptr());
        for (int j = 0; j < state.xgrid().nodes(); ++j) {
            auto o = out.slice(j);
            const auto s = streamed.slice(j);
            for (std::size_t i = 0; i < n; ++i) o[i] = std::exp(-(*nu)[i] * dt) * s[i];
        }
        return out;
    }

    if (opts.scheme == MarchScheme::nu_integrator) {
        DistributionField src = collision_source(state, params, sphere, true, opts.eval);
        DistributionField ssrc = free_stream(src, dt);
        DistributionField out(state.xgrid_ptr(), state.vgrid_ptr());
        std::vector<double> damp(n);
        for (std::size_t i = 0; i < n; ++i) damp[i] = std::exp(-(*nu)[i] * dt);
        for (int j = 0; j < state.xgrid().nodes(); ++j) {
            auto o = out.slice(j);
            const auto s = streamed.slice(j);
            const auto q = ssrc.slice(j);
            for (std::size_t i = 0; i < n; ++i) o[i] = damp[i] * (s[i] + dt * q[i]);
        }
        return out;
    }

    // g_integrator: damping from the state-dependent weight, loss term
    // absorbed into it, source reduced to K f + Gamma_gain(f,f). The weight is
    // taken at the departure point of the characteristic.
    DistributionField gf = compute_g(state, params, sphere, opts.eval);
    DistributionField gdep = free_stream(gf, dt);
    DistributionField src = collision_source(state, params, sphere, false, opts.eval);
    DistributionField ssrc = free_stream(src, dt);
    DistributionField out(state.xgrid_ptr(), state.vgrid_ptr());
    for (int j = 0; j < state.xgrid().nodes(); ++j) {
        auto o = out.slice(j);
        const auto s = streamed.slice(j);
        const auto q = ssrc.slice(j);
        const auto gd = gdep.slice(j);
        for (std::size_t i = 0; i < n; ++i) o[i] = std::exp(-gd[i] * dt) * (s[i] + dt * q[i]);
    }
    return out;
}

namespace {

DiagnosticsRecord make_record(const DistributionField& f, double t,
                              const std::vector<NormSpec>& norms, bool with_smallness,
                              double t_star, const CollisionParams& params,
                              const SphereQuadrature& sphere) {
    DiagnosticsRecord rec;
    rec.t = t;
    const ExcessMoments m = excess_moments(f);
    rec.excess_mass = m.mass;
    rec.excess_energy = m.energy;
    const EntropyResult h = entropy(f);
    rec.entropy = h.value;
    rec.entropy_clamped = h.clamped_nodes;
    rec.min_F = positivity_min(f);
    rec.norms.reserve(norms.size());
    for (const auto& spec : norms) rec.norms.push_back(mixed_norm(f, spec));
    if (with_smallness) {
        const SmallnessReport s = smallness_functionals(f, t_star, params, sphere);
        rec.has_smallness = true;
        rec.smallness_a = s.a_sup;
        rec.smallness_b = s.b_sup;
    }
    return rec;
}

}  // namespace

Trajectory run_march(const MarchRunConfig& config) {
    config.params.validate();
    Trajectory traj;
    traj.dt = config.dt;
    InitialDataResult init = build_initial_data(config.init, config.xgrid, config.vgrid);
    traj.fields.push_back(std::move(init.f0));
    traj.records.push_back(make_record(traj.fields[0], 0.0, config.norms,
                                       config.smallness_stride > 0, config.t_star, config.params,
                                       *config.sphere));
    for (int k = 0; k < config.steps; ++k) {
        DistributionField next = march_step(traj.fields.back(), config.dt, config.params,
                                            *config.sphere, config.options);
        if (!next.all_finite()) {
            traj.aborted = true;
            traj.abort_step = k + 1;
            break;
        }
        const bool smallness =
            config.smallness_stride > 0 && ((k + 1) % config.smallness_stride == 0);
        traj.fields.push_back(std::move(next));
        traj.records.push_back(make_record(traj.fields.back(), config.dt * (k + 1), config.norms,
                                           smallness, config.t_star, config.params,
                                           *config.sphere));
    }
    return traj;
}

PicardReport run_picard(const PicardRunConfig& config) {
    config.params.validate();
    if (!(config.t_star > 0.0) || config.time_steps < 1)
        throw ConfigError("picard: need T* > 0 and at least one stored time step");
    const int K = config.time_steps;
    const double dt = config.t_star / K;
    const auto& xg = *config.xgrid;
    const VelocityGrid& vg = *config.vgrid;
    const std::size_t n = vg.size();
    const int nx = xg.nodes();
    const bool slab = xg.mode() == SpatialMode::slab1d;
    const double cell = slab ? xg.length() / nx : 1.0;

    InitialDataResult init = build_initial_data(config.init, config.xgrid, config.vgrid);
    const DistributionField& f0 = init.f0;

    NormSpec dist_spec{config.norm_r, 0.5 * config.norm_l, NormOrder::linf_t_lr_v_linf_x};
    NormSpec ball_spec{config.norm_r, config.norm_l, NormOrder::linf_t_lr_v_linf_x};

    // f^0 = 0 on the whole stored grid.
    std::vector<DistributionField> cur(static_cast<std::size_t>(K) + 1,
                                       DistributionField(config.xgrid, config.vgrid));

    std::vector<double> vx1(n);
    for (std::size_t i = 0; i < n; ++i) vx1[i] = vg.node(i)[0];

    auto char_value = [&](const DistributionField& f, int jx, double shift_x, std::size_t iv) {
        if (!slab) return f.slice(0)[iv];
        double s = (xg.coord(jx) + shift_x) / cell;
        s -= std::floor(s / nx) * nx;
        int i0 = static_cast<int>(s);
        if (i0 >= nx) i0 = 0;
        const double fr = s - i0;
        const int i1 = (i0 + 1) % nx;
        return f.slice(i0)[iv] + fr * (f.slice(i1)[iv] - f.slice(i0)[iv]);
    };

    PicardReport report;
    int grow_streak = 0;
    for (int it = 0; it < config.n_max; ++it) {
        // Damping weights and sources of the current iterate, per stored step.
        std::vector<DistributionField> gw, src;
        gw.reserve(K + 1);
        src.reserve(K + 1);
        for (int k = 0; k <= K; ++k) {
            gw.push_back(compute_g(cur[k], config.params, *config.sphere, config.eval));
            src.push_back(collision_source(cur[k], config.params, *config.sphere, false,
                                           config.eval));
        }

        std::vector<DistributionField> nxt;
        nxt.reserve(K + 1);
        nxt.push_back(f0);  // f^{n+1}(0) = f0
        for (int k = 1; k <= K; ++k) {
            DistributionField fk(config.xgrid, config.vgrid);
            const double tk = dt * k;
            for (int jx = 0; jx < nx; ++jx) {
                auto o = fk.slice(jx);
                for (std::size_t iv = 0; iv < n; ++iv) {
                    const double v1 = vx1[iv];
                    // Damping integrals I_j = int_{t_j}^{t_k} g(s1, x - v1(t_k - s1), v),
                    // accumulated backwards by trapezoid on the stored grid.
                    double acc = 0.0;
                    double integral_j1 = 0.0;  // I_{j+1}
                    double g_j1 = char_value(gw[k], jx, 0.0, iv);
                    for (int j = k - 1; j >= 0; --j) {
                        const double gj = char_value(gw[j], jx, -v1 * (tk - dt * j), iv);
                        const double integral_j = integral_j1 + 0.5 * dt * (gj + g_j1);
                        const double tw = (j == 0) ? 0.5 * dt : dt;
                        acc += tw * std::exp(-integral_j) *
                               char_value(src[j], jx, -v1 * (tk - dt * j), iv);
                        integral_j1 = integral_j;
                        g_j1 = gj;
                    }
                    // j = k endpoint of the source trapezoid (damping factor 1).
                    acc += 0.5 * dt * char_value(src[k], jx, 0.0, iv);
                    const double f0v = char_value(f0, jx, -v1 * tk, iv);
                    o[iv] = std::exp(-integral_j1) * f0v + acc;
                }
            }
            nxt.push_back(std::move(fk));
        }

        // Distance between iterates, sup over the stored grid.
        std::vector<DistributionField> diff;
        diff.reserve(K + 1);
        for (int k = 0; k <= K; ++k) {
            DistributionField d(config.xgrid, config.vgrid);
            auto dv = d.values();
            const auto a = nxt[k].values();
            const auto b = cur[k].values();
            for (std::size_t i = 0; i < dv.size(); ++i) dv[i] = a[i] - b[i];
            diff.push_back(std::move(d));
        }
        const double dist = mixed_norm(std::span<const DistributionField>(diff), dist_spec);
        cur = std::move(nxt);
        report.iterations = it + 1;
        report.iterate_norms.push_back(
            mixed_norm(std::span<const DistributionField>(cur), ball_spec));
        if (!report.distances.empty()) {
            const double prev = report.distances.back();
            report.ratios.push_back(prev > 0.0 ? dist / prev
                                               : std::numeric_limits<double>::quiet_NaN());
            grow_streak = dist > prev ? grow_streak + 1 : 0;
            if (grow_streak >= 3) report.non_contraction_reported = true;
        }
        report.distances.push_back(dist);
        if (dist <= config.tol) {
            report.converged = true;
            break;
        }
    }

    report.trajectory.dt = dt;
    report.trajectory.fields = std::move(cur);
    for (int k = 0; k <= K; ++k)
        report.trajectory.records.push_back(make_record(report.trajectory.fields[k], dt * k, {},
                                                        false, config.t_star, config.params,
                                                        *config.sphere));
    return report;
}

}  // namespace kmx
