#include "moclab/forward_map.hpp"

#include "moclab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include <math.h>  // pchip.hpp in Boost 1.74 calls isnan unqualified
#include <boost/math/interpolators/pchip.hpp>

namespace moclab {

LpProfile constant_profile(double c)
{
    LpProfile p;
    const double lc = std::log(c);
    p.log_theta = [lc](double) { return lc; };
    p.p0 = 1.0;
    p.vorticity_realizable = true;
    p.name = "constant";
    return p;
}

EpsMin lambda_from_theta(const LpProfile& profile, double r)
{
    const double hi = profile.eps_hi();
    auto g = [&profile, r](double eps) { return 2.0 * eps * r + profile.log_alpha(eps); };
    const num::Minimum m = num::minimize_scan(g, kEpsLo, hi, kEpsScan, true);
    return {m.value, m.x, m.at_upper};
}

Moc mu_from_theta(const LpProfile& profile, const std::vector<double>& x_grid)
{
    if (x_grid.empty())
        throw Error(ErrorKind::DomainExceeded, "empty x grid");
    bool interior = false;
    for (double x : x_grid) {
        if (!(x > 0 && x < 1))
            throw Error(ErrorKind::DomainExceeded, "x grid must lie in (0, 1)");
        if (!lambda_from_theta(profile, -std::log(x)).at_upper)
            interior = true;
    }
    if (!interior)
        throw Error(ErrorKind::FlatAlpha, "minimizer sits at eps = " +
                                              std::to_string(profile.eps_hi()) + " on the whole grid");
    auto lam = [profile](double r) { return lambda_from_theta(profile, r).lambda; };
    auto lam1 = [profile](double r) { return 2.0 * lambda_from_theta(profile, r).eps; };
    auto lam2 = [lam1](double r) { return num::d1(lam1, r, num::rel_step(r)); };
    return Moc::from_lambda(lam, 0.0, lam1, lam2, 2);
}

double log_alpha_prime(const LpProfile& profile, double eps)
{
    const double u = std::log(eps);
    auto f = [&profile](double v) { return profile.log_alpha(std::exp(v)); };
    return num::d1(f, u, 1e-4) / eps;
}

EpsilonMap epsilon_minimizer(const LpProfile& profile, const std::vector<double>& r_grid)
{
    const double hi = profile.eps_hi();
    // (log alpha)' must increase strictly across the scan.
    double prev = -std::numeric_limits<double>::infinity();
    const auto scan = num::log_grid(kEpsLo * 1.0001, hi / 1.0001, 16);
    for (double e : scan) {
        const double d = log_alpha_prime(profile, e);
        if (!(d > prev))
            throw Error(ErrorKind::NotStrictlyConvex,
                        "(log alpha)' not increasing near eps = " + std::to_string(e));
        prev = d;
    }

    const double u_lo = std::log(kEpsLo);
    const double u_hi = std::log(hi);
    auto solve = [profile, u_lo, u_hi](double r) {
        auto f = [&profile, r](double u) { return log_alpha_prime(profile, std::exp(u)) + 2.0 * r; };
        if (f(u_hi) <= 0.0)
            return std::exp(u_hi);
        if (f(u_lo) >= 0.0)
            return std::exp(u_lo);
        return std::exp(num::bisect(f, u_lo, u_hi, 1e-15, 200).x);
    };

    EpsilonMap map;
    map.eps_of_r = solve;
    std::vector<double> le;
    std::vector<double> lr;
    for (double r : r_grid) {
        if (!(r > 0))
            throw Error(ErrorKind::DomainExceeded, "epsilon map needs r > 0");
        const double e = solve(r);
        if (!map.eps.empty() && !(e < map.eps.back()))
            continue;  // boundary-clamped or flat: outside the validity interval
        map.r.push_back(r);
        map.eps.push_back(e);
    }
    if (map.r.size() < 4)
        throw Error(ErrorKind::NotStrictlyConvex, "fewer than 4 interior minimizers on the grid");
    map.r_lo = map.r.front();
    map.r_hi = map.r.back();
    for (std::size_t i = map.r.size(); i-- > 0;) {
        le.push_back(std::log(map.eps[i]));
        lr.push_back(std::log(map.r[i]));
    }
    auto interp = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(
        std::move(le), std::move(lr));
    map.eta = [interp](double eps) { return std::exp((*interp)(std::log(eps))); };
    return map;
}

// ---------------------------------------------------------------------------

double gamma_r_from_mu(const Moc& mu, double t, double r, const num::OdeOptions& opts)
{
    if (t == 0.0)
        return r;
    const double r_lo = mu.r_lo();
    auto rhs = [&mu, r_lo](double, double y) { return -std::exp(mu.lambda(std::max(y, r_lo))); };
    auto guard = [r_lo](double, double y) { return y > r_lo; };
    const num::OdeResult res = num::solve_ode(rhs, r, 0.0, t, opts, guard);
    if (res.aborted)
        throw Error(ErrorKind::BlowThroughDomain,
                    "Gamma leaves the domain at t = " + std::to_string(res.t));
    return res.y;
}

double gamma_from_mu(const Moc& mu, double t, double x)
{
    if (!(x > 0) || !(x < mu.domain_hi()))
        throw Error(ErrorKind::DomainExceeded, "gamma_from_mu needs x in (0, domain_hi)");
    if (t < 0)
        throw Error(ErrorKind::DomainExceeded, "gamma_from_mu needs t >= 0");
    return std::exp(-gamma_r_from_mu(mu, t, -std::log(x)));
}

FlowFamily flow_from_mu(const Moc& mu)
{
    FlowFamily f;
    f.source = FlowSource::FromMu;
    f.mu_ref = mu;
    f.gamma_r = [mu](double t, double r) { return gamma_r_from_mu(mu, t, r); };
    return f;
}

double flow_time_r(const Moc& mu, double r_x, double r_y)
{
    if (r_y <= r_x)
        return osgood_integral_r(mu, r_y, r_x);
    return -osgood_integral_r(mu, r_x, r_y);
}

double flow_time(const Moc& mu, double x, double y)
{
    return flow_time_r(mu, -std::log(x), -std::log(y));
}

TransportReport verify_transport_r(const Moc& mu, const FlowFamily& flow,
                                   const std::vector<double>& t_grid,
                                   const std::vector<double>& r_grid)
{
    TransportReport rep;
    for (double t : t_grid) {
        for (double r : r_grid) {
            const double big_r = flow.gamma_r(t, r);
            const double rp = num::d1([&](double s) { return flow.gamma_r(t, s); }, r,
                                      num::rel_step(r));
            const double rt = num::d1([&](double s) { return flow.gamma_r(s, r); }, t,
                                      num::rel_step(t));
            const double lr = mu.lambda(r);
            const double space = std::fabs(std::expm1(std::log(rp) + lr - mu.lambda(big_r)));
            const double time = std::fabs(1.0 + std::exp(lr) * rp / rt);
            const double worst = std::max(space, time);
            if (!(worst <= std::max(rep.max_space_residual, rep.max_time_residual))) {
                rep.worst_t = t;
                rep.worst_x = std::exp(-r);
            }
            rep.max_space_residual = std::max(rep.max_space_residual, space);
            rep.max_time_residual = std::max(rep.max_time_residual, time);
            if (std::isnan(space) || std::isnan(time))
                rep.max_space_residual = std::numeric_limits<double>::infinity();
            ++rep.points;
        }
    }
    return rep;
}

TransportReport verify_transport(const Moc& mu, const FlowFamily& flow,
                                 const std::vector<double>& t_grid,
                                 const std::vector<double>& x_grid)
{
    std::vector<double> r;
    r.reserve(x_grid.size());
    for (double x : x_grid)
        r.push_back(-std::log(x));
    return verify_transport_r(mu, flow, t_grid, r);
}

}  // namespace moclab
