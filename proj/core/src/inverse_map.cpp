#include "moclab/inverse_map.hpp"

#include "moclab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <math.h>  // pchip.hpp in Boost 1.74 calls isnan unqualified
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss.hpp>

namespace moclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double gauss30(const Fn& f, double a, double b)
{
    return boost::math::quadrature::gauss<double, 30>::integrate(f, a, b);
}

// Finds r in a decreasing function's preimage: phi(r) = s, phi decreasing.
double invert_decreasing(const Fn& phi, double s, double lo, double hi)
{
    return num::find_root([&](double r) { return phi(r) - s; }, lo, hi, 1e-15, 200);
}

}  // namespace

// ---------------------------------------------------------------------------
// iteration groups from generating functions

double cig_r(const GeneratingFunction& h, double t, double r)
{
    const double s = h.Hinv(r) + t;
    if (!(s < h.s_hi))
        throw Error(ErrorKind::RangeExceeded,
                    "t + h^{-1}(x) = " + std::to_string(s) + " beyond certified " +
                        std::to_string(h.s_hi));
    return h.H(s);
}

double cig_from_generating(const GeneratingFunction& h, double t, double x)
{
    if (!(x > 0))
        throw Error(ErrorKind::DomainExceeded, "cig needs x > 0");
    return std::exp(-cig_r(h, t, -std::log(x)));
}

Moc mu_from_generating(const GeneratingFunction& h)
{
    auto lam = [h](double r) { return h.lambda(r); };
    // lambda' = 1 - g'(s) e^{-g(s) - H(s)} with s = Hinv(r)
    auto lam1 = [h](double r) {
        const double s = h.Hinv(r);
        const double gp = num::d1(h.g, s, num::rel_step(s));
        return 1.0 - gp * std::exp(-h.g(s) - r);
    };
    return Moc::from_lambda(lam, h.H(h.s_hi), lam1, {}, 2);
}

FlowFamily flow_from_generating(const GeneratingFunction& h)
{
    FlowFamily f;
    f.source = FlowSource::FromGeneratingFunction;
    f.mu_ref = mu_from_generating(h);
    f.gamma_r = [h](double t, double r) { return cig_r(h, t, r); };
    return f;
}

namespace {

// Cumulative integral of e^{-lambda} from r_a0 up to geometric knots.
struct PhiKnots {
    Moc mu;
    double r_a0;
    double b0;
    double r_floor;  // lowest r reachable above the anchor
    std::vector<double> r;
    std::vector<double> c;

    double phi(double rr) const
    {
        if (rr >= r_a0) {
            auto it = std::upper_bound(r.begin(), r.end(), rr);
            const std::size_t k = static_cast<std::size_t>(it - r.begin()) - 1;
            return b0 - c[k] - osgood_integral_r(mu, r[k], rr);
        }
        return b0 + osgood_integral_r(mu, rr, r_a0);
    }

    double inverse(double s) const
    {
        auto f = [this](double rr) { return phi(rr); };
        if (s > b0) {
            const double top = phi(r_floor);
            if (!(s < top))
                throw Error(ErrorKind::RangeExceeded, "s above the certified range of h");
            return invert_decreasing(f, s, r_floor, r_a0);
        }
        const double need = b0 - s;
        auto it = std::lower_bound(c.begin(), c.end(), need);
        if (it == c.end()) {
            // continue doubling beyond the precomputed knots
            double lo = r.back();
            double acc = c.back();
            while (true) {
                const double hi = 2.0 * lo;
                const double piece = osgood_integral_r(mu, lo, hi);
                if (acc + piece >= need)
                    return invert_decreasing(f, s, lo, hi);
                acc += piece;
                lo = hi;
                if (!std::isfinite(lo))
                    throw Error(ErrorKind::RangeExceeded, "h^{-1} target out of reach");
            }
        }
        const std::size_t k = static_cast<std::size_t>(it - c.begin());
        if (k == 0)
            return r_a0;
        return invert_decreasing(f, s, r[k - 1], r[k]);
    }
};

}  // namespace

GeneratingFunction generating_from_mu(const Moc& mu, double a0, double b0)
{
    if (!(a0 > 0) || !(a0 < mu.domain_hi()))
        throw Error(ErrorKind::DomainExceeded, "anchor a0 outside (0, domain_hi)");
    const double r_a0 = -std::log(a0);
    const double shell_start = std::max(r_a0, 1.0);
    const OsgoodCertificate cert = osgood_shells(mu, shell_start, 20, 0.1);
    if (!cert.divergent)
        throw Error(ErrorKind::NonOsgood, "Osgood shells decay; h^{-1}(0) would be finite");

    auto knots = std::make_shared<PhiKnots>();
    knots->mu = mu;
    knots->r_a0 = r_a0;
    knots->b0 = b0;
    const double r_lo = mu.r_lo();
    knots->r_floor = std::isfinite(r_lo) ? r_lo + 1e-9 * std::max(1.0, std::fabs(r_lo)) : r_a0 - 50.0;
    knots->r.push_back(r_a0);
    knots->c.push_back(0.0);
    double rr = r_a0;
    for (int k = 0; k < 64; ++k) {
        const double next = rr >= 1.0 ? 2.0 * rr : rr + 1.0;
        knots->c.push_back(knots->c.back() + osgood_integral_r(mu, rr, next));
        knots->r.push_back(next);
        rr = next;
    }

    GeneratingFunction h;
    h.Hinv = [knots](double r) { return knots->phi(r); };
    h.H = [knots](double s) { return knots->inverse(s); };
    h.g = [knots, mu](double s) {
        const double r = knots->inverse(s);
        return mu.lambda(r) - r;
    };
    h.s_hi = knots->phi(knots->r_floor);
    h.anchor_x = a0;
    h.anchor_s = b0;
    return h;
}

// ---------------------------------------------------------------------------
// acceptable f

double AcceptableMoc::F_of(double r) const
{
    if (F)
        return F(r);
    return -std::log(f(std::exp(-r)));
}

double AcceptableMoc::Fprime_of(double r) const
{
    if (Fprime)
        return Fprime(r);
    const double x = std::exp(-r);
    return x * fprime(x) / f(x);
}

double AcceptableMoc::Finv_of(double r) const
{
    if (Finv)
        return Finv(r);
    // F(rho) < rho, so the preimage lies above r.
    double hi = std::max(2.0 * r, r + 1.0);
    while (F_of(hi) < r) {
        hi = 2.0 * hi;
        if (!std::isfinite(hi))
            throw Error(ErrorKind::DomainExceeded, "F^{-1} out of reach");
    }
    return num::find_root([this, r](double v) { return F_of(v) - r; }, r, hi, 1e-15, 200);
}

double AcceptableMoc::log_fprime_r(double r) const
{
    return std::log(Fprime_of(r)) + r - F_of(r);
}

AcceptableMoc acceptable_from_x(Fn f, Fn fprime, double J)
{
    AcceptableMoc a;
    a.f = std::move(f);
    a.fprime = std::move(fprime);
    a.J = J;
    return a;
}

AcceptableMoc acceptable_from_r(Fn F, Fn Fprime, Fn Finv, double J)
{
    AcceptableMoc a;
    a.F = F;
    a.Fprime = Fprime;
    a.Finv = std::move(Finv);
    a.J = J;
    a.f = [F](double x) { return std::exp(-F(-std::log(x))); };
    a.fprime = [F, Fprime](double x) {
        const double r = -std::log(x);
        return std::exp(r - F(r)) * Fprime(r);
    };
    return a;
}

namespace {

double ramp(double s, double u)
{
    if (std::fabs(s) < 1e-12)
        return u;
    return std::expm1(s * u) / std::expm1(s);
}

double ramp_d(double s, double u)
{
    if (std::fabs(s) < 1e-12)
        return 1.0;
    return s * std::exp(s * u) / std::expm1(s);
}

struct Seed {
    double a, b, r_a, r_b, log_mu_a, L, s, c;

    double exponent(double u) const { return L * ramp(s, u) + c * u * (1.0 - u); }

    double lambda(double r) const
    {
        const double x = std::exp(-r);
        const double u = std::clamp((x - a) / (b - a), 0.0, 1.0);
        return r + log_mu_a + exponent(u);
    }
};

}  // namespace

SingleTimeResult mu_from_gamma_single_time(const AcceptableMoc& f, double t0, double a,
                                           std::optional<double> mu_a, const SingleTimeOptions& opts)
{
    if (!(t0 > 0))
        throw Error(ErrorKind::DomainExceeded, "t0 must be positive");
    if (!(a > 0) || !(a < f.J))
        throw Error(ErrorKind::NotAcceptable, "a must lie in (0, J)");
    const double r_a = -std::log(a);
    const double r_b = f.F_of(r_a);
    const double b = std::exp(-r_b);
    const double L = f.log_fprime_r(r_a);
    if (!(b > a) || !(L > 0))
        throw Error(ErrorKind::NotAcceptable, "need f(a) > a and f'(a) > 1");
    const double fp = std::exp(L);
    const double lo = (b - a) / (fp * t0);
    const double hi = (b - a) / t0;
    const double m_a = mu_a ? *mu_a : std::sqrt(lo * hi);
    if (!(m_a > lo && m_a < hi))
        throw Error(ErrorKind::BadMuA, "mu(a) = " + std::to_string(m_a) + " outside (" +
                                           std::to_string(lo) + ", " + std::to_string(hi) + ")");

    double c1_rhs = 0.0;
    if (opts.c1_match) {
        // mu'(f(a)) = f''(a) mu(a) / f'(a) + mu'(a)
        const double h = a * 1e-4;
        const double fpp = num::d1(f.fprime, a, h);
        c1_rhs = fpp * (b - a) / fp;
    }

    Seed seed{a, b, r_a, r_b, std::log(m_a), L, 0.0, 0.0};
    auto configure = [&](double s) {
        seed.s = s;
        seed.c = 0.0;
        if (opts.c1_match)
            seed.c = (fp * L * ramp_d(s, 1.0) - L * ramp_d(s, 0.0) - c1_rhs) / (fp + 1.0);
    };
    auto seed_integral = [&](double s) {
        configure(s);
        auto integrand = [&](double u) { return std::exp(-seed.exponent(u)); };
        return (b - a) / m_a * num::integrate(integrand, 0.0, 1.0, 1e-14);
    };

    double s_lo = -1.0;
    double s_hi = 1.0;
    while (seed_integral(s_lo) > t0) {
        s_lo *= 2.0;
        if (s_lo < -512.0)
            throw Error(ErrorKind::SeedShapeFailure, "cannot bracket the shape parameter below");
    }
    while (seed_integral(s_hi) < t0) {
        s_hi *= 2.0;
        if (s_hi > 512.0)
            throw Error(ErrorKind::SeedShapeFailure, "cannot bracket the shape parameter above");
    }
    const num::BisectResult br = num::bisect([&](double s) { return seed_integral(s) - t0; }, s_lo,
                                             s_hi, 0.0, opts.max_bisections);
    const double achieved = seed_integral(br.x);
    if (std::fabs(achieved - t0) > 1e-10 * t0)
        throw Error(ErrorKind::SeedShapeFailure,
                    "seed integral " + std::to_string(achieved) + " misses t0 after " +
                        std::to_string(br.iterations) + " bisections");
    configure(br.x);

    const Seed fixed = seed;
    const AcceptableMoc fm = f;
    auto lam = [fixed, fm](double r) {
        double acc = 0.0;
        double rho = r;
        int guard = 0;
        while (rho > fixed.r_a) {
            const double lf = fm.log_fprime_r(rho);
            if (!(lf > 0))
                throw Error(ErrorKind::NotAcceptable, "f' <= 1 on the orbit");
            acc -= std::log(fm.Fprime_of(rho));
            rho = fm.F_of(rho);
            if (++guard > 100000)
                throw Error(ErrorKind::NotAcceptable, "orbit does not reach the seed interval");
        }
        while (rho < fixed.r_b) {
            const double up = fm.Finv_of(rho);
            const double lf = fm.log_fprime_r(up);
            if (!(lf > 0) || !(std::exp(-up) < fm.J))
                throw Error(ErrorKind::NotAcceptable, "f' <= 1 on the orbit");
            acc += std::log(fm.Fprime_of(up));
            rho = up;
            if (++guard > 100000)
                throw Error(ErrorKind::NotAcceptable, "orbit does not reach the seed interval");
        }
        return fixed.lambda(rho) + acc;
    };

    SingleTimeResult res;
    const double r_lo = std::isfinite(f.J) ? -std::log(f.J) : -kInf;
    res.mu = Moc::from_lambda(lam, r_lo, {}, {}, opts.c1_match ? 1 : 0);
    res.a = a;
    res.fa = b;
    res.mu_a = m_a;
    res.shape = br.x;
    res.seed_integral = achieved;
    res.bisections = br.iterations;
    res.mu_a_bounds = {lo, hi};
    return res;
}

// ---------------------------------------------------------------------------
// concave iteration groups

namespace {

struct BarState {
    GeneratingFunction h;
    double s_top;

    double gbar(double s) const { return gauss30(h.g, s, s + 1.0); }
    double gbar_prime(double s) const { return h.g(s + 1.0) - h.g(s); }

    // log of the integral over (-inf, s] of e^{gbar - gbar(s)}. Panels have width
    // 1/gbar' at their right end; gbar' grows to the left, so contributions decay at
    // least geometrically and a fixed Gauss rule per panel is enough.
    double log_tail(double s, double gs) const
    {
        using Panel = boost::math::quadrature::gauss<double, 15>;
        auto integrand = [this, gs](double v) {
            const double e = std::exp(gbar(v) - gs);
            return std::isfinite(e) ? e : 0.0;
        };
        double right = s;
        double sum = 0.0;
        for (int k = 0; k < 100000; ++k) {
            const double slope = gbar_prime(right);
            if (!std::isfinite(slope))
                break;  // h has underflowed to zero further left
            const double w = slope > 1.0 ? 1.0 / slope : 1.0;
            if (w < 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(right)))
                throw Error(ErrorKind::RangeExceeded,
                            "h-bar tail varies below double resolution in s near " + std::to_string(right));
            const double piece = Panel::integrate(integrand, right - w, right);
            sum += piece;
            right -= w;
            if (k >= 2 && !(piece > 1e-17 * sum))
                return std::log(sum);
        }
        if (sum > 0)
            return std::log(sum);
        throw Error(ErrorKind::QuadratureNonconvergent, "h-bar tail does not settle");
    }

    double Hbar(double s) const
    {
        const double gs = gbar(s);
        return -(gs + log_tail(s, gs));
    }

    // lambda of mu-bar at s together with T = h-bar / e^{gbar}
    double Hbar_inv(double r) const
    {
        auto f = [this](double s) { return Hbar(s); };
        double hi;
        double lo;
        try {
            const double s0 = h.Hinv(r);
            hi = std::min(s0, s_top);
            lo = s0 - 1.0;
        } catch (const Error&) {
            hi = s_top;
            lo = s_top - 1.0;
        }
        if (f(hi) > r)
            throw Error(ErrorKind::RangeExceeded, "r below the certified range of h-bar");
        double step = 1.0;
        while (f(lo) < r) {
            hi = lo;
            lo -= step;
            step *= 2.0;
            if (step > 1e6)
                throw Error(ErrorKind::RangeExceeded, "h-bar^{-1} out of reach");
        }
        return invert_decreasing(f, r, lo, hi);
    }
};

}  // namespace

ConcaveCig concavify_cig(const GeneratingFunction& h, const ConcavifyOptions& opts)
{
    const double s_top = h.s_hi - 1.0;
    // keep the scan where h is representable: H(s - 1) finite and below 1e300
    double s_lo = s_top - opts.s_span;
    auto representable = [&h](double s) {
        try {
            const double v = h.H(s);
            return std::isfinite(v) && v < 1e300 && std::isfinite(h.g(s));
        } catch (const Error&) {
            return false;
        }
    };
    while (!representable(s_lo - 1.0) && s_lo < s_top - 1.0)
        s_lo += 0.25;
    ConcaveCig out;
    out.s_lo = s_lo;
    out.s_top = s_top;
    out.worst_g_ineq = kInf;
    out.worst_gp_ineq = -kInf;
    const auto scan = num::linspace(s_lo, s_top, opts.scan_points);
    for (double s : scan) {
        const double gi = h.g(s) - h.g(s - 1.0);
        const double gp0 = num::d1(h.g, s, num::rel_step(s));
        const double gp1 = num::d1(h.g, s - 1.0, num::rel_step(s - 1.0));
        const double gpi = gp0 - gp1;
        out.worst_g_ineq = std::min(out.worst_g_ineq, gi);
        out.worst_gp_ineq = std::max(out.worst_gp_ineq, gpi / (std::fabs(gp0) + std::fabs(gp1)));
        if (!(gi > 0))
            throw Error(ErrorKind::PrerequisiteFailed, "gIneq: g(s) <= g(s-1) at s = " + std::to_string(s));
        if (!(gp0 > 0))
            throw Error(ErrorKind::PrerequisiteFailed, "g' <= 0 at s = " + std::to_string(s));
        if (gpi > 1e-8 * (std::fabs(gp0) + std::fabs(gp1)))
            throw Error(ErrorKind::PrerequisiteFailed,
                        "gpIneq: g'(s) > g'(s-1) at s = " + std::to_string(s));
    }

    auto st = std::make_shared<BarState>(BarState{h, s_top});
    GeneratingFunction hb;
    hb.g = [st](double s) { return st->gbar(s); };
    hb.H = [st](double s) { return st->Hbar(s); };
    hb.Hinv = [st](double r) { return st->Hbar_inv(r); };
    hb.s_hi = s_top;
    hb.anchor_x = h.anchor_x;
    hb.anchor_s = h.anchor_s;
    out.hbar = hb;

    auto lam = [st](double r) { return std::log(2.0) + r + st->gbar(st->Hbar_inv(r)); };
    auto lam1 = [st](double r) {
        const double s = st->Hbar_inv(r);
        const double gs = st->gbar(s);
        return 1.0 - st->gbar_prime(s) * std::exp(st->log_tail(s, gs));
    };
    out.mu = Moc::from_lambda(lam, st->Hbar(s_top), lam1, {}, 2);
    out.r_cert = std::max(st->Hbar(s_top - 2.0), h.H(h.s_hi - 1.0));
    return out;
}

double concave_cig_j_r(const ConcaveCig& c, double r)
{
    return cig_r(c.hbar, 2.0, r);
}

// ---------------------------------------------------------------------------
// theta from mu

namespace {

// r with lambda'(r) = target, lambda' decreasing.
double eta_for(const Moc& mu, double target, double r_start)
{
    double lo = r_start;
    if (!(mu.lambda1(lo) >= target))
        throw Error(ErrorKind::EpsilonNotInvertible,
                    "lambda'/2 never reaches " + std::to_string(target / 2) + " on the tail");
    double hi = 2.0 * lo;
    while (mu.lambda1(hi) > target) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi))
            throw Error(ErrorKind::EpsilonNotInvertible, "eps(r) does not decrease to the target");
    }
    return num::find_root([&](double r) { return mu.lambda1(r) - target; }, lo, hi, 1e-14, 200);
}

}  // namespace

double log_alpha_with_eta(const Moc& mu, const Fn& eta, double eps)
{
    const double r = eta(eps);
    return mu.lambda(r) - 2.0 * r * eps;
}

ThetaFromMu theta_from_mu(const Moc& mu, const std::vector<double>& p_grid)
{
    if (p_grid.empty())
        throw Error(ErrorKind::DomainExceeded, "empty p grid");
    const double r_start = (std::isfinite(mu.r_lo()) ? std::max(mu.r_lo(), 1.0) : 1.0) * (1.0 + 1e-6);

    ThetaFromMu out;
    for (double p : p_grid) {
        if (!(p > 1))
            throw Error(ErrorKind::DomainExceeded, "p must exceed 1");
        const double r = eta_for(mu, 2.0 / p, r_start);
        out.p.push_back(p);
        out.eta.push_back(r);
        out.log_theta.push_back(mu.lambda(r) - 2.0 * r / p - std::log(p));
    }

    // certify lambda'' < 0 and eps decreasing across the tail that was used
    const double r0 = *std::min_element(out.eta.begin(), out.eta.end());
    const double r1 = *std::max_element(out.eta.begin(), out.eta.end());
    const auto scan = num::log_grid(r0, std::max(r1, r0 * 1.0001), 32);
    const Certificate conc = certify_lambda_strictly_concave(mu, scan);
    if (!conc.holds)
        throw Error(ErrorKind::LambdaNotConcave,
                    "lambda'' >= 0 at r = " + std::to_string(conc.witness.value_or(r0)));
    double prev = kInf;
    for (double r : scan) {
        const double e = 0.5 * mu.lambda1(r);
        if (!(e < prev))
            throw Error(ErrorKind::EpsilonNotInvertible, "eps(r) not decreasing at r = " + std::to_string(r));
        prev = e;
    }

    const double p_min = *std::min_element(out.p.begin(), out.p.end());
    out.profile.p0 = p_min;
    out.profile.name = "from-mu";
    out.profile.log_theta = [mu, r_start](double p) {
        const double r = eta_for(mu, 2.0 / p, r_start);
        return mu.lambda(r) - 2.0 * r / p - std::log(p);
    };
    return out;
}

// ---------------------------------------------------------------------------
// Legendre transform

double legendre_transform(const std::vector<double>& eps, const std::vector<double>& f, double x)
{
    const std::size_t n = eps.size();
    if (n < 4 || f.size() != n)
        throw Error(ErrorKind::NotConvex, "need at least 4 samples");
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double s0 = (f[i] - f[i - 1]) / (eps[i] - eps[i - 1]);
        const double s1 = (f[i + 1] - f[i]) / (eps[i + 1] - eps[i]);
        if (s1 < s0 - 1e-12 * (std::fabs(s0) + std::fabs(s1) + 1.0))
            throw Error(ErrorKind::NotConvex, "samples not convex near eps = " + std::to_string(eps[i]));
    }
    std::size_t best = 0;
    double best_v = -kInf;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = x * eps[i] - f[i];
        if (v > best_v) {
            best_v = v;
            best = i;
        }
    }
    boost::math::interpolators::pchip<std::vector<double>> interp{std::vector<double>(eps),
                                                                  std::vector<double>(f)};
    const std::size_t i0 = best == 0 ? 0 : best - 1;
    const std::size_t i1 = std::min(best + 1, n - 1);
    const num::Minimum m =
        num::minimize_bracket([&](double e) { return interp(e) - x * e; }, eps[i0], eps[i1]);
    return std::max(best_v, -m.value);
}

double legendre_transform(const Fn& f, double lo, double hi, double x, int n)
{
    const auto grid = num::linspace(lo, hi, n);
    std::vector<double> fv;
    fv.reserve(grid.size());
    for (double e : grid)
        fv.push_back(f(e));
    // convexity check on the samples, then refine against f itself
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        const double sd = fv[i - 1] - 2.0 * fv[i] + fv[i + 1];
        if (sd < -1e-12 * (std::fabs(fv[i]) + 1.0))
            throw Error(ErrorKind::NotConvex, "f not convex near " + std::to_string(grid[i]));
    }
    const num::Minimum m = num::minimize_scan([&](double e) { return f(e) - x * e; }, lo, hi, n, false);
    return -m.value;
}

double log_alpha_legendre(const Moc& mu, double x, double r_lo, double r_hi)
{
    const num::Minimum m = num::minimize_scan(
        [&](double r) { return 2.0 * x * r - mu.lambda(r); }, r_lo, r_hi, 512, r_lo > 0);
    return -m.value;
}

}  // namespace moclab
