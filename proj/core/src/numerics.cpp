#include "moclab/numerics.hpp"

#include "moclab/error.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

namespace moclab::num {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

struct OdeAbort {
    double t;
    double y;
};

}  // namespace

QuadEstimate integrate_estimate(const Fn& f, double a, double b, double rel_tol, int max_depth)
{
    if (a == b)
        return {0.0, 0.0, 0.0};
    double err = 0.0;
    double l1 = 0.0;
    if (!std::isfinite(a) || !std::isfinite(b)) {
        const double v = GK::integrate(f, a, b, static_cast<unsigned>(max_depth), rel_tol, &err, &l1);
        return {v, err, l1};
    }
    // Boost 1.74 compares an unscaled leaf error against a scaled tolerance, so short intervals
    // recurse to max_depth. Integrating over the reference interval keeps both on one scale.
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    auto g = [&f, mid, half](double t) { return f(mid + half * t); };
    const double v = GK::integrate(g, -1.0, 1.0, static_cast<unsigned>(max_depth), rel_tol, &err, &l1);
    const double scale = std::fabs(half);
    return {half * v, scale * err, scale * l1};
}

double integrate(const Fn& f, double a, double b, double rel_tol, int max_depth)
{
    const QuadEstimate q = integrate_estimate(f, a, b, rel_tol, max_depth);
    if (!std::isfinite(q.value))
        throw Error(ErrorKind::QuadratureNonconvergent, "non-finite integral");
    // GK reports a conservative bound; allow a modest slack before declaring failure.
    // integrands living entirely near the underflow threshold are treated as zero mass
    if (q.error > 100.0 * rel_tol * q.l1 + 1e-280) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "error estimate %.3g exceeds tolerance (L1 %.3g on [%.6g, %.6g])",
                      q.error, q.l1, a, b);
        throw Error(ErrorKind::QuadratureNonconvergent, buf);
    }
    return q.value;
}

double integrate_pieces(const Fn& f, const std::vector<double>& knots, double rel_tol, int max_depth)
{
    double value = 0.0;
    double error = 0.0;
    double l1 = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const QuadEstimate q = integrate_estimate(f, knots[i], knots[i + 1], rel_tol, max_depth);
        value += q.value;
        error += q.error;
        l1 += q.l1;
    }
    if (!std::isfinite(value))
        throw Error(ErrorKind::QuadratureNonconvergent, "non-finite integral");
    if (error > 100.0 * rel_tol * l1 + 1e-280) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "error estimate %.3g exceeds tolerance (L1 %.3g over %zu pieces)",
                      error, l1, knots.size() - 1);
        throw Error(ErrorKind::QuadratureNonconvergent, buf);
    }
    return value;
}

double integrate_endpoint_singular(const Fn& f, double a, double b, double rel_tol)
{
    if (a == b)
        return 0.0;
    static boost::math::quadrature::tanh_sinh<double> ts;  // integrate() is non-const in Boost 1.74
    double err = 0.0;
    double l1 = 0.0;
    std::size_t levels = 0;
    auto g = [&f](double x) { return f(x); };
    const double v = ts.integrate(g, a, b, rel_tol, &err, &l1, &levels);
    if (!std::isfinite(v) || err > 100.0 * rel_tol * l1 + 1e-280) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "tanh-sinh error %.3g exceeds tolerance (L1 %.3g on [%.6g, %.6g])",
                      err, l1, a, b);
        throw Error(ErrorKind::QuadratureNonconvergent, buf);
    }
    return v;
}

double find_root(const Fn& f, double lo, double hi, double rel_tol, int max_iter)
{
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0)
        return lo;
    if (fhi == 0.0)
        return hi;
    if ((flo > 0) == (fhi > 0))
        throw Error(ErrorKind::DomainExceeded, "root not bracketed");
    std::uintmax_t iters = static_cast<std::uintmax_t>(max_iter);
    auto tol = [rel_tol](double a, double b) {
        return std::fabs(a - b) <= rel_tol * std::max(std::fabs(a), std::fabs(b));
    };
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
    return 0.5 * (r.first + r.second);
}

BisectResult bisect(const Fn& f, double lo, double hi, double x_tol, int max_iter)
{
    double flo = f(lo);
    int it = 0;
    double mid = 0.5 * (lo + hi);
    for (; it < max_iter && hi - lo > x_tol; ++it) {
        mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0)
            return {mid, it + 1};
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return {0.5 * (lo + hi), it};
}

Minimum minimize_bracket(const Fn& g, double lo, double hi)
{
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::brent_find_minima(g, lo, hi, std::numeric_limits<double>::digits,
                                                         iters);
    return {r.first, r.second, false, false};
}

Minimum minimize_scan(const Fn& g, double lo, double hi, int n_scan, bool log_spaced)
{
    n_scan = std::max(n_scan, 3);
    std::vector<double> xs(static_cast<std::size_t>(n_scan));
    for (int i = 0; i < n_scan; ++i) {
        const double s = static_cast<double>(i) / (n_scan - 1);
        xs[i] = log_spaced ? lo * std::pow(hi / lo, s) : lo + (hi - lo) * s;
    }
    xs.front() = lo;
    xs.back() = hi;
    std::size_t best = 0;
    double best_v = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double v = g(xs[i]);
        if (v < best_v) {
            best_v = v;
            best = i;
        }
    }
    const std::size_t i0 = best == 0 ? 0 : best - 1;
    const std::size_t i1 = std::min(best + 1, xs.size() - 1);
    Minimum m = minimize_bracket(g, xs[i0], xs[i1]);
    if (best_v < m.value) {
        m.x = xs[best];
        m.value = best_v;
    }
    // Boundary minimizers are legitimate (closed end of the search interval).
    const double g_hi = g(hi);
    if (g_hi <= m.value) {
        m.x = hi;
        m.value = g_hi;
    }
    m.at_lower = m.x <= xs[1] && best == 0;
    m.at_upper = m.x == hi;
    return m;
}

double rel_step(double x, double rel)
{
    return std::max(std::fabs(x), 1.0) * rel;
}

double d1(const Fn& f, double x, double h)
{
    const double dh = (f(x + h) - f(x - h)) / (2 * h);
    const double dh2 = (f(x + h / 2) - f(x - h / 2)) / h;
    return (4 * dh2 - dh) / 3;
}

double d2(const Fn& f, double x, double h)
{
    return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
}

std::vector<double> linspace(double lo, double hi, int n)
{
    std::vector<double> out;
    if (n <= 0)
        return out;
    if (n == 1)
        return {lo};
    out.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    out.back() = hi;
    return out;
}

std::vector<double> log_grid(double lo, double hi, int per_decade)
{
    if (!(lo > 0) || !(hi >= lo) || per_decade <= 0)
        return {};
    const double decades = std::log10(hi / lo);
    const int n = std::max(2, static_cast<int>(std::ceil(decades * per_decade - 1e-9)) + 1);
    std::vector<double> out(static_cast<std::size_t>(n));
    const double llo = std::log(lo);
    const double lhi = std::log(hi);
    for (int i = 0; i < n; ++i)
        out[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) / (n - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

double log_add_exp(double a, double b)
{
    if (a == -std::numeric_limits<double>::infinity())
        return b;
    if (b == -std::numeric_limits<double>::infinity())
        return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::fabs(a - b)));
}

std::vector<double> relative_second_differences(const std::vector<double>& r,
                                                const std::vector<double>& lambda)
{
    std::vector<double> out;
    if (r.size() < 3 || r.size() != lambda.size())
        return out;
    out.reserve(r.size() - 2);
    for (std::size_t i = 1; i + 1 < r.size(); ++i) {
        const double da = r[i - 1] - r[i];
        const double db = r[i + 1] - r[i];
        // x_j / x_i - 1 and v_j / v_i - 1, both small on fine grids
        const double xa = std::expm1(-da);
        const double xb = std::expm1(-db);
        const double va = std::expm1((lambda[i - 1] - lambda[i]) - da);
        const double vb = std::expm1((lambda[i + 1] - lambda[i]) - db);
        const double w = xb / (xb - xa);
        out.push_back(w * va + (1.0 - w) * vb);
    }
    return out;
}

namespace {

namespace odeint = boost::numeric::odeint;
using Stepper = odeint::runge_kutta_dopri5<double, double, double, double, odeint::vector_space_algebra>;

}  // namespace

OdeResult solve_ode(const OdeRhs& rhs, double y0, double t0, double t1, const OdeOptions& opts,
                    const OdeGuard& guard)
{
    if (t0 == t1)
        return {t0, y0, false, 0};
    auto sys = [&rhs](const double& y, double& dydt, double t) { dydt = rhs(t, y); };
    double y = y0;
    long steps = 0;
    auto observer = [&](const double& yy, double t) {
        ++steps;
        if (guard && !guard(t, yy))
            throw OdeAbort{t, yy};
    };
    auto stepper = odeint::make_controlled(opts.abs_tol, opts.rel_tol, Stepper());
    const double dt = (t1 > t0 ? 1.0 : -1.0) * std::min(opts.first_step, std::fabs(t1 - t0));
    try {
        odeint::integrate_adaptive(stepper, sys, y, t0, t1, dt, observer);
    } catch (const OdeAbort& a) {
        return {a.t, a.y, true, steps};
    }
    return {t1, y, false, steps};
}

std::vector<double> solve_ode_at(const OdeRhs& rhs, double y0, const std::vector<double>& times,
                                 const OdeOptions& opts, const OdeGuard& guard)
{
    std::vector<double> out;
    if (times.empty())
        return out;
    out.reserve(times.size());
    out.push_back(y0);
    double y = y0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        const OdeResult r = solve_ode(rhs, y, times[i - 1], times[i], opts, guard);
        if (r.aborted)
            break;
        y = r.y;
        out.push_back(y);
    }
    return out;
}

}  // namespace moclab::num
