#include "kmx/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace kmx {

ExcessMoments excess_moments(const DistributionField& f) {
    const VelocityGrid& vg = f.vgrid();
    const std::size_t n = vg.size();
    std::vector<double> sq(n), e2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 v = vg.node(i);
        sq[i] = sqrt_maxwellian_at(v) * vg.weight(i);
        e2[i] = norm2(v);
    }
    ExcessMoments m;
    const double xm = f.xgrid().cell_measure();
    for (int j = 0; j < f.xgrid().nodes(); ++j) {
        const auto slice = f.slice(j);
        double m0 = 0.0, m2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = sq[i] * slice[i];  // (F - mu) dv = sqrt(mu) f dv
            m0 += d;
            m2 += e2[i] * d;
        }
        m.mass += xm * m0;
        m.energy += xm * m2;
    }
    return m;
}

EntropyResult entropy(const DistributionField& f) {
    const VelocityGrid& vg = f.vgrid();
    const std::size_t n = vg.size();
    std::vector<double> mu(n), sq(n), mulnmu(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 v = vg.node(i);
        const double r2 = norm2(v);
        mu[i] = std::exp(-r2);
        sq[i] = std::exp(-0.5 * r2);
        mulnmu[i] = mu[i] * (-r2);  // mu ln mu evaluated without log underflow
    }
    EntropyResult res;
    const double xm = f.xgrid().cell_measure();
    for (int j = 0; j < f.xgrid().nodes(); ++j) {
        const auto slice = f.slice(j);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double F = mu[i] + sq[i] * slice[i];
            if (F < 0.0) {
                F = 0.0;
                ++res.clamped_nodes;
            }
            const double flnf = F > 0.0 ? F * std::log(F) : 0.0;
            acc += vg.weight(i) * (flnf - mulnmu[i]);
        }
        res.value += xm * acc;
    }
    return res;
}

double positivity_min(const DistributionField& f) {
    const VelocityGrid& vg = f.vgrid();
    const std::size_t n = vg.size();
    std::vector<double> mu(n), sq(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 v = vg.node(i);
        mu[i] = maxwellian_at(v);
        sq[i] = sqrt_maxwellian_at(v);
    }
    double mn = std::numeric_limits<double>::infinity();
    for (int j = 0; j < f.xgrid().nodes(); ++j) {
        const auto slice = f.slice(j);
        for (std::size_t i = 0; i < n; ++i) mn = std::min(mn, mu[i] + sq[i] * slice[i]);
    }
    return mn;
}

EntropyBudgetReport excess_entropy_budget(std::span<const DistributionField> fields, double dt,
                                          double eps_h_coeff, double quad_tol,
                                          double m_exponent) {
    EntropyBudgetReport rep;
    rep.m_exponent = m_exponent;
    rep.eps_h = eps_h_coeff * (dt * dt + quad_tol);
    rep.entropy_series.reserve(fields.size());
    for (const auto& f : fields) rep.entropy_series.push_back(entropy(f).value);
    for (std::size_t k = 0; k + 1 < rep.entropy_series.size(); ++k) {
        const double inc = rep.entropy_series[k + 1] - rep.entropy_series[k];
        rep.worst_increase = std::max(rep.worst_increase, inc);
        if (inc > rep.eps_h) {
            rep.monotone_within_eps = false;
            ++rep.violations;
        }
    }
    if (!fields.empty()) {
        const ExcessMoments m0 = excess_moments(fields[0]);
        rep.excess_mass0 = m0.mass;
        rep.excess_energy0 = m0.energy;
        rep.entropy0 = rep.entropy_series[0];
        rep.combined_raw = std::abs(m0.mass) + std::abs(m0.energy) + std::abs(rep.entropy0);
        rep.combined_pow = std::pow(rep.combined_raw, 1.0 / m_exponent);
    }
    return rep;
}

}  // namespace kmx
