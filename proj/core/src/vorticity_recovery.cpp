#include "moclab/vorticity_recovery.hpp"

#include "moclab/error.hpp"
#include "moclab/euler_lower_bound.hpp"

#include <algorithm>
#include <string>

namespace moclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double PhiProfile::d1(double p) const
{
    if (phi1)
        return phi1(p);
    return num::d1(phi, p, num::rel_step(p));
}

double PhiProfile::d2(double p) const
{
    if (phi2)
        return phi2(p);
    if (phi1)
        return num::d1(phi1, p, num::rel_step(p));
    return num::d2(phi, p, num::rel_step(p, 1e-3));
}

double PhiProfile::d3(double p) const
{
    if (phi3)
        return phi3(p);
    return num::d1([this](double s) { return d2(s); }, p, num::rel_step(p, 1e-3));
}

PhiProfile phi_from_log_theta(Fn log_theta, double p_min)
{
    PhiProfile out;
    out.phi = [log_theta](double p) { return p * log_theta(p); };
    out.p_min = p_min;
    return out;
}

DistributionProfile indicator_distribution(double height)
{
    if (!(height > 0))
        throw Error(ErrorKind::ConfigError, "indicator height must be positive");
    DistributionProfile d;
    d.rho = [height](double x) { return x <= height ? 0.0 : kInf; };
    d.rho1 = [](double) { return 0.0; };
    d.x_max = height;
    const double lh = std::log(height);
    d.phi.phi = [lh](double p) { return p * lh; };
    d.phi.phi1 = [lh](double) { return lh; };
    d.phi.phi2 = [](double) { return 0.0; };
    d.phi.phi3 = [](double) { return 0.0; };
    return d;
}

DistributionProfile recover_rho(const PhiProfile& phi, double q, std::optional<double> rho_q,
                                const RecoverOptions& opts)
{
    if (!(q > phi.p_min))
        throw Error(ErrorKind::ConfigError, "q must exceed the profile's p_min");
    for (double p : num::log_grid(q, q * opts.scan_hi_factor, opts.scan_per_decade)) {
        const double f2 = phi.d2(p);
        if (!(f2 > 0))
            throw Error(ErrorKind::DegenerateBeta,
                        "phi'' <= 0 at p = " + std::to_string(p) + ": beta is not increasing");
        if (f2 >= 1.0 / p)
            throw Error(ErrorKind::ConditionOneFailed,
                        "phi'' >= 1/p at p = " + std::to_string(p));
    }

    DistributionProfile d;
    d.phi = phi;
    d.q = q;
    const double legendre_q = q * phi.d1(q) - phi.phi(q);
    d.rho_q = rho_q.value_or(legendre_q);
    d.cq = d.rho_q - legendre_q;
    const double beta_q = std::exp(phi.d1(q));
    const double cq = d.cq;
    const double rq = d.rho_q;
    const double log_q = std::log(q);

    d.beta = [phi](double p) { return std::exp(phi.d1(p)); };
    // log p with phi'(p) = log x, for x >= beta(q); +inf when p leaves double range
    d.log_beta_inverse = [phi, log_q, beta_q](double x) {
        if (x <= beta_q)
            return log_q;
        const double lx = std::log(x);
        auto f = [&phi, lx](double l) { return phi.d1(std::exp(l)) - lx; };
        double lo = log_q;
        double hi = log_q + 1.0;
        while (f(hi) < 0) {
            lo = hi;
            hi = log_q + 2.0 * (hi - log_q);
            if (hi > 700.0)
                return kInf;
        }
        return num::find_root(f, lo, hi, 1e-15);
    };
    auto lbi = d.log_beta_inverse;
    d.rho = [phi, lbi, beta_q, q, rq, cq](double x) {
        if (x <= beta_q)
            return rq + q / beta_q * (x - beta_q);
        const double l = lbi(x);
        if (!std::isfinite(l))
            return kInf;
        const double p = std::exp(l);
        return cq + p * phi.d1(p) - phi.phi(p);
    };
    d.rho1 = [lbi, beta_q, q](double x) {
        if (x <= beta_q)
            return q / beta_q;
        const double l = lbi(x);
        return std::isfinite(l) ? std::exp(l) / x : kInf;
    };
    return d;
}

MellinResult mellin_forward(const DistributionProfile& dist, double p)
{
    if (!(p > 0))
        throw Error(ErrorKind::ConfigError, "p must be positive");
    const double u_top = std::isfinite(dist.x_max) ? std::log(dist.x_max) : 40.0;
    auto E = [&dist, p, u_top](double u) {
        if (u > u_top)
            return -kInf;
        const double r = dist.rho(std::exp(u));
        return std::isfinite(r) ? p * u - r : -kInf;
    };

    // coarse scan for the peak, then Brent on the neighbouring bracket
    const int n = 800;
    const double u_bot = std::min(-40.0, u_top - 80.0);
    const std::vector<double> us = num::linspace(u_bot, u_top, n);
    std::size_t best = 0;
    double e_best = -kInf;
    for (std::size_t i = 0; i < us.size(); ++i) {
        const double e = E(us[i]);
        if (e > e_best) {
            e_best = e;
            best = i;
        }
    }
    if (!std::isfinite(e_best))
        throw Error(ErrorKind::TailDivergence, "Mellin integrand vanishes on the scan");
    double u_peak = us[best];
    if (best > 0 && best + 1 < us.size()) {
        const num::Minimum m = num::minimize_bracket([&E](double u) { return -E(u); }, us[best - 1],
                                                     us[best + 1]);
        if (-m.value >= e_best) {
            u_peak = m.x;
            e_best = -m.value;
        }
    }
    auto f = [&E, e_best](double u) {
        const double v = E(u) - e_best;
        return std::isfinite(v) ? std::exp(v) : 0.0;
    };

    // knots outward from the peak until the log-integrand is 80 below it; beyond that rho is
    // so large that its rounding noise defeats any relative quadrature tolerance
    std::vector<double> right{u_peak};
    for (double w = 1e-3; right.back() < u_top; w *= 1.5) {
        right.push_back(std::min(right.back() + w, u_top));
        if (!(E(right.back()) >= e_best - 80.0))
            break;
        if (right.size() > 400)
            throw Error(ErrorKind::TailDivergence, "Mellin right tail did not settle");
    }
    std::vector<double> knots{u_peak};
    for (double w = 1e-3;; w *= 1.5) {
        knots.push_back(knots.back() - w);
        if (!(E(knots.back()) >= e_best - 80.0))
            break;
        if (knots.size() > 400)
            throw Error(ErrorKind::TailDivergence, "Mellin left tail did not settle");
    }
    const double window = std::max(right.back() - u_peak, u_peak - knots.back());
    std::reverse(knots.begin(), knots.end());
    knots.insert(knots.end(), right.begin() + 1, right.end());
    // rho'' jumps where the linear extension meets the Legendre branch
    if (dist.beta && dist.q > 0) {
        const double u_kink = std::log(dist.beta(dist.q));
        const auto it = std::upper_bound(knots.begin(), knots.end(), u_kink);
        if (it != knots.begin() && it != knots.end() && *(it - 1) != u_kink)
            knots.insert(it, u_kink);
    }
    const double total = num::integrate_pieces(f, knots, 1e-12);
    MellinResult out;
    out.log_integral = e_best + std::log(total);
    out.log_theta = (std::log(p) + out.log_integral) / p;
    out.u_peak = u_peak;
    out.window = window;
    return out;
}

LaplaceResult laplace_theta(const DistributionProfile& dist, double p)
{
    if (!dist.beta)
        throw Error(ErrorKind::DerivativeUnavailable, "Laplace approximation needs beta");
    const double s = p - 1.0;
    if (!(s >= dist.q))
        throw Error(ErrorKind::DomainExceeded, "Laplace approximation needs p - 1 >= q");
    LaplaceResult out;
    out.x_p = dist.beta(s);
    out.dx_p = out.x_p * dist.phi.d2(s);
    const double rho = dist.rho(out.x_p);
    out.log_theta = (std::log(p) + 0.5 * std::log(2.0 * M_PI) + 0.5 * std::log(out.dx_p)) / p +
                    (1.0 - 0.5 / p) * std::log(out.x_p) - rho / p;
    return out;
}

ConditionsReport check_conditions(const PhiProfile& phi, const std::vector<double>& p_grid,
                                  double delta)
{
    ConditionsReport rep;
    rep.delta = delta;
    rep.convex = true;
    rep.condition1 = true;
    rep.condition2 = true;
    double prev1 = kInf;
    double prev2 = kInf;
    for (double p : p_grid) {
        const double f1 = phi.d1(p);
        const double f2 = phi.d2(p);
        const double f3 = phi.d3(p);
        const double damp = std::exp(-f1);
        rep.p.push_back(p);
        rep.margin1.push_back(1.0 / p - f2);
        rep.margin1_rel.push_back(1.0 - p * f2);
        const double q1 = p * f3 / f2 * damp;
        const double q2 = f3 / (f2 * f2) * damp;
        rep.q1.push_back(q1);
        rep.q2.push_back(q2);
        rep.xp_ratio.push_back(f2 + f3 / f2);
        if (!(f2 > 0))
            rep.convex = false;
        if (!(1.0 - p * f2 >= delta) && rep.condition1) {
            rep.condition1 = false;
            rep.first_failure1 = p;
        }
        const double a1 = std::fabs(q1);
        const double a2 = std::fabs(q2);
        const bool grew = a1 > prev1 * (1.0 + 1e-6) || a2 > prev2 * (1.0 + 1e-6) ||
                          !std::isfinite(a1) || !std::isfinite(a2);
        if (grew && rep.condition2) {
            rep.condition2 = false;
            rep.first_failure2 = p;
        }
        prev1 = a1;
        prev2 = a2;
    }
    return rep;
}

SquareSymmetricVorticity profile_to_square_symmetric(const DistributionProfile& dist)
{
    const double rho0 = dist.rho(0.0);
    if (!std::isfinite(rho0))
        throw Error(ErrorKind::DomainExceeded, "distribution vanishes at 0");
    SquareSymmetricVorticity w;
    w.r_max = 0.5 * std::exp(-0.5 * rho0);
    const double x_max = dist.x_max;
    auto rho = dist.rho;
    // largest y with rho(y) < T, T = -log(4 s^2)
    auto level = [rho, rho0, x_max](double T) {
        if (!(rho0 < T))
            return 0.0;
        double lo = 0.0;
        double hi = 1.0;
        double r_prev = rho0;
        for (;;) {
            if (hi >= x_max) {
                hi = x_max;
                if (rho(hi) < T)
                    return x_max;
                break;
            }
            const double r = rho(hi);
            if (r < r_prev - 1e-9 * (1.0 + std::fabs(r_prev)))
                throw Error(ErrorKind::NonMonotone, "rho decreases near y = " + std::to_string(hi));
            if (r >= T)
                break;
            r_prev = r;
            lo = hi;
            hi *= 2.0;
            if (hi > 1e300)
                throw Error(ErrorKind::TailDivergence, "level set does not close");
        }
        if (!std::isfinite(rho(hi))) {
            // indicator-like jump to +inf: only the sign is usable
            auto g = [&rho, T](double y) { return rho(y) < T ? -1.0 : 1.0; };
            return num::bisect(g, lo, hi, 1e-14 * hi, 200).x;
        }
        return num::find_root([&rho, T](double y) { return rho(y) - T; }, lo, hi, 1e-15);
    };
    w.axis_profile = [level](double s) { return level(-std::log(4.0 * s * s)); };
    w.log_axis_u = [level](double u) {
        // s = e^{-u}: -log(4 s^2) = 2u - log 4
        const double y = level(2.0 * u - std::log(4.0));
        return y > 0 ? std::log(y) : -kInf;
    };
    w.name = "recovered";
    return w;
}

}  // namespace moclab
