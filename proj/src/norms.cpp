#include "kmx/norms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kmx {

namespace {

double weight_w(const Vec3& v) { return 1.0 + std::sqrt(norm2(v)); }

/// L^r over v of per-node magnitudes s (>= 0), weighted by w^l and the grid
/// quadrature weights; L^inf is the plain node max of w^l s.
double weighted_lr(const VelocityGrid& grid, std::span<const double> s, double r, double l) {
    const std::size_t n = grid.size();
    if (r == kInfExponent) {
        double mx = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            mx = std::max(mx, std::pow(weight_w(grid.node(i)), l) * s[i]);
        return mx;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = std::pow(weight_w(grid.node(i)), l) * s[i];
        acc += grid.weight(i) * std::pow(a, r);
    }
    return std::pow(acc, 1.0 / r);
}

void sup_over_x(const DistributionField& f, std::vector<double>& s, bool accumulate) {
    const std::size_t n = f.vgrid().size();
    if (!accumulate) s.assign(n, 0.0);
    for (int j = 0; j < f.xgrid().nodes(); ++j) {
        const auto slice = f.slice(j);
        for (std::size_t i = 0; i < n; ++i) s[i] = std::max(s[i], std::abs(slice[i]));
    }
}

}  // namespace

void NormSpec::validate() const {
    if (!(r > 1.0))
        throw ConfigError("norm spec: r must lie in (1, inf], got " + std::to_string(r));
}

std::string NormSpec::label() const {
    std::ostringstream os;
    os << "r";
    if (r == kInfExponent)
        os << "inf";
    else
        os << r;
    os << "_l" << l << (order == NormOrder::lr_v_linf_tx ? "_vtx" : "_tvx");
    return os.str();
}

double conjugate_exponent(double r) {
    if (r == kInfExponent) return 1.0;
    if (!(r > 1.0))
        throw DomainError("conjugate exponent needs r in (1, inf], got " + std::to_string(r));
    return r / (r - 1.0);
}

double mixed_norm(const GridFunction& g, const NormSpec& spec) {
    spec.validate();
    std::vector<double> s(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) s[i] = std::abs(g[i]);
    return weighted_lr(g.grid(), s, spec.r, spec.l);
}

double mixed_norm(const DistributionField& f, const NormSpec& spec) {
    spec.validate();
    std::vector<double> s;
    sup_over_x(f, s, false);
    return weighted_lr(f.vgrid(), s, spec.r, spec.l);
}

double mixed_norm(std::span<const DistributionField> fields, const NormSpec& spec) {
    spec.validate();
    if (fields.empty()) return 0.0;
    if (spec.order == NormOrder::lr_v_linf_tx) {
        std::vector<double> s;
        sup_over_x(fields[0], s, false);
        for (std::size_t k = 1; k < fields.size(); ++k) sup_over_x(fields[k], s, true);
        return weighted_lr(fields[0].vgrid(), s, spec.r, spec.l);
    }
    double mx = 0.0;
    for (const auto& f : fields) mx = std::max(mx, mixed_norm(f, spec));
    return mx;
}

ParameterReport validate_parameters(double r, double l, double gamma) {
    ParameterReport rep;
    rep.r = r;
    rep.l = l;
    rep.gamma = gamma;
    rep.r_conjugate = conjugate_exponent(r);
    const double rp = rep.r_conjugate;
    rep.local_threshold =
        std::max({3.0 / rp, 1.0 / rp + 0.5 * (gamma + 1.0), 2.0 * gamma});
    rep.local_ok = l > rep.local_threshold;
    rep.global_threshold = 3.0 / rp + gamma;
    rep.global_ok = rep.local_ok && l > rep.global_threshold;
    rep.low_r_boundary = 4.0 / (3.0 - gamma);
    rep.smallness_required = r < rep.low_r_boundary;
    return rep;
}

SmallnessReport smallness_functionals(const DistributionField& f0, double t_star,
                                      const CollisionParams& params,
                                      const SphereQuadrature& sphere,
                                      const SmallnessConfig& cfg) {
    SmallnessReport rep;
    rep.t_star = t_star;
    rep.t_max = cfg.t_max_factor * t_star;
    const VelocityGrid& vg = f0.vgrid();
    const SpatialGrid& xg = f0.xgrid();
    const std::size_t n = vg.size();
    auto nu = compute_nu(f0.vgrid_ptr(), params, sphere);

    std::vector<double> quarter_gauss(n), vx1(n);
    double nu_min = (*nu)[0];
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 v = vg.node(i);
        quarter_gauss[i] = std::exp(-0.25 * norm2(v));
        vx1[i] = v[0];
        nu_min = std::min(nu_min, (*nu)[i]);
    }

    const bool slab = xg.mode() == SpatialMode::slab1d;
    const double L = xg.length();
    const int nx = xg.nodes();

    // int over v of weightfn(v,t) |f0(x - v1 t, v)| dv at one (t, x-node),
    // with linear periodic interpolation along the characteristic foot.
    auto char_integral = [&](double t, int jx, std::span<const double> wfn) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double val;
            if (!slab) {
                val = f0.slice(0)[i];
            } else {
                const double xd = xg.coord(jx) - vx1[i] * t;
                double s = xd / (L / nx);
                s -= std::floor(s / nx) * nx;
                int i0 = static_cast<int>(s);
                if (i0 >= nx) i0 = 0;
                const double fr = s - i0;
                const int i1 = (i0 + 1) % nx;
                val = (1.0 - fr) * f0.slice(i0)[i] + fr * f0.slice(i1)[i];
            }
            acc += wfn[i] * std::abs(val) * vg.weight(i);
        }
        return acc;
    };

    for (int ti = 0; ti < cfg.t_samples; ++ti) {
        const double t = cfg.t_samples > 1 ? t_star * ti / (cfg.t_samples - 1) : 0.0;
        for (int jx = 0; jx < nx; ++jx)
            rep.a_sup = std::max(rep.a_sup, char_integral(t, jx, quarter_gauss));
    }

    std::vector<double> damp(n);
    for (int ti = 0; ti < cfg.t_tail_samples; ++ti) {
        const double frac = cfg.t_tail_samples > 1
                                ? static_cast<double>(ti) / (cfg.t_tail_samples - 1)
                                : 0.0;
        const double t = t_star * std::pow(cfg.t_max_factor, frac);
        for (std::size_t i = 0; i < n; ++i) damp[i] = std::exp(-(*nu)[i] * t);
        for (int jx = 0; jx < nx; ++jx)
            rep.b_sup = std::max(rep.b_sup, char_integral(t, jx, damp));
    }

    std::vector<double> ones(n, 1.0);
    double l1_sup = 0.0;
    for (int jx = 0; jx < nx; ++jx) l1_sup = std::max(l1_sup, char_integral(0.0, jx, ones));
    rep.b_tail_bound = std::exp(-nu_min * rep.t_max) * l1_sup;
    return rep;
}

}  // namespace kmx
