#include "moclab/moc.hpp"

#include "moclab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace moclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double checked(double v, const char* what)
{
    if (!std::isfinite(v))
        throw Error(ErrorKind::NonPositiveMoc, std::string("non-finite ") + what);
    return v;
}

}  // namespace

Moc Moc::from_function(Fn value, double domain_hi, Fn deriv1, Fn deriv2, int smoothness_class)
{
    Moc m;
    m.value_ = std::move(value);
    m.d1_ = std::move(deriv1);
    m.d2_ = std::move(deriv2);
    m.domain_hi_ = domain_hi;
    m.r_lo_ = domain_hi > 0 ? -std::log(domain_hi) : kInf;
    m.smoothness_ = smoothness_class;
    m.lambda_native_ = false;
    return m;
}

Moc Moc::from_lambda(Fn lambda, double r_lo, Fn lambda1, Fn lambda2, int smoothness_class)
{
    Moc m;
    m.lam_ = std::move(lambda);
    m.lam1_ = std::move(lambda1);
    m.lam2_ = std::move(lambda2);
    m.r_lo_ = r_lo;
    m.domain_hi_ = std::exp(-r_lo);
    m.smoothness_ = smoothness_class;
    m.lambda_native_ = true;
    return m;
}

double Moc::operator()(double x) const
{
    if (x <= 0)
        return 0.0;
    if (!lambda_native_)
        return value_(x);
    const double r = -std::log(x);
    return std::exp(lam_(r) - r);
}

bool Moc::has_analytic_deriv1() const
{
    return lambda_native_ ? static_cast<bool>(lam1_) : static_cast<bool>(d1_);
}

bool Moc::has_analytic_deriv2() const
{
    return lambda_native_ ? static_cast<bool>(lam1_) && static_cast<bool>(lam2_)
                          : static_cast<bool>(d2_);
}

double Moc::deriv1(double x) const
{
    if (!lambda_native_) {
        if (d1_)
            return d1_(x);
        return num::d1([this](double s) { return value_(s); }, x, x * 1e-4);
    }
    const double r = -std::log(x);
    return (*this)(x) * (1.0 - lambda1(r)) / x;
}

double Moc::deriv2(double x) const
{
    if (!lambda_native_) {
        if (d2_)
            return d2_(x);
        return num::d2([this](double s) { return value_(s); }, x, x * 1e-4);
    }
    const double r = -std::log(x);
    const double l1 = lambda1(r);
    return (*this)(x) * (l1 * l1 - l1 + lambda2(r)) / (x * x);
}

double Moc::lambda(double r) const
{
    if (lambda_native_)
        return lam_(r);
    const double x = std::exp(-r);
    if (!(x > 0))
        throw Error(ErrorKind::DomainExceeded, "x = exp(-r) underflows at r = " + std::to_string(r));
    const double v = value_(x);
    if (!(v > 0))
        throw Error(ErrorKind::NonPositiveMoc, "mu(x) <= 0 at x = " + std::to_string(x));
    return r + std::log(v);
}

double Moc::lambda1(double r) const
{
    if (lam1_)
        return lam1_(r);
    if (!lambda_native_ && d1_) {
        const double x = std::exp(-r);
        return 1.0 - x * d1_(x) / value_(x);
    }
    return num::d1([this](double s) { return lambda(s); }, r, num::rel_step(r));
}

double Moc::lambda2(double r) const
{
    if (lam2_)
        return lam2_(r);
    if (!lambda_native_ && d1_ && d2_) {
        const double x = std::exp(-r);
        const double v = value_(x);
        const double l1 = 1.0 - x * d1_(x) / v;
        return x * x * d2_(x) / v - l1 * l1 + l1;
    }
    if (lam1_)
        return num::d1([this](double s) { return lam1_(s); }, r, num::rel_step(r));
    return num::d2([this](double s) { return lambda(s); }, r, num::rel_step(r));
}

// ---------------------------------------------------------------------------

double osgood_integral_r(const Moc& mu, double r_a, double r_b)
{
    if (!(r_a < r_b))
        return 0.0;
    auto integrand = [&mu](double r) {
        const double l = mu.lambda(r);
        if (std::isnan(l))
            throw Error(ErrorKind::NonPositiveMoc, "mu <= 0 inside the interval");
        return std::exp(-l);
    };
    // Pieces of bounded ratio (or bounded length near r = 0) keep the quadrature well scaled.
    double total = 0.0;
    double a = r_a;
    while (a < r_b) {
        double b = a > 1.0 ? 2.0 * a : a + 1.0;
        b = std::min(b, r_b);
        total += num::integrate(integrand, a, b, 1e-12);
        a = b;
    }
    return total;
}

double osgood_integral(const Moc& mu, double x_lo, double x_hi)
{
    if (!(x_lo > 0) || !(x_lo < x_hi) || x_hi > mu.domain_hi())
        throw Error(ErrorKind::DomainExceeded, "osgood_integral needs 0 < x_lo < x_hi <= domain_hi");
    return osgood_integral_r(mu, -std::log(x_hi), -std::log(x_lo));
}

OsgoodCertificate osgood_shells(const Moc& mu, double r_start, int n_shells, double kappa)
{
    if (!(r_start > 0))
        throw Error(ErrorKind::DomainExceeded, "osgood shells need r_start > 0");
    OsgoodCertificate c;
    double r = r_start;
    double sum = 0.0;
    for (int k = 0; k < n_shells; ++k) {
        const double v = osgood_integral_r(mu, r, 2.0 * r);
        sum += v;
        c.shell_start.push_back(r);
        c.shell_integral.push_back(v);
        c.partial_sum.push_back(sum);
        r *= 2.0;
    }
    c.lower_bound = c.shell_integral.empty() ? 0.0 : kappa * c.shell_integral.front();
    c.divergent = !c.shell_integral.empty() && c.lower_bound > 0 &&
                  std::all_of(c.shell_integral.begin(), c.shell_integral.end(),
                              [&c](double v) { return v >= c.lower_bound; });
    return c;
}

namespace {

// J(r) = S_mu / mu at x = e^{-r}, i.e. the integral over u >= 0 of e^{lambda(r+u) - lambda(r) - u}.
double dini_ratio_r(const Moc& mu, double r)
{
    const double l0 = mu.lambda(r);
    auto f = [&](double u) { return std::exp(mu.lambda(r + u) - l0 - u); };
    double total = 0.0;
    double a = 0.0;
    double b = 1.0;
    while (true) {
        total += num::integrate(f, a, b, 1e-13);
        // For concave lambda the tangent line at r + b bounds the remaining tail.
        const double slope = mu.lambda1(r + b);
        if (slope < 1.0) {
            const double tail = std::exp(mu.lambda(r + b) - l0 - b) / (1.0 - slope);
            if (tail <= 1e-14 * total)
                return total;
        }
        if (b > 1e6)
            throw Error(ErrorKind::DiniDivergence,
                        "partial integrals fail to settle at r = " + std::to_string(r));
        a = b;
        b *= 2.0;
    }
}

}  // namespace

double dini_log_value_r(const Moc& mu, double r)
{
    return mu.lambda(r) - r + std::log(dini_ratio_r(mu, r));
}

Moc dini_transform(const Moc& mu)
{
    auto lam = [mu](double r) { return mu.lambda(r) + std::log(dini_ratio_r(mu, r)); };
    // S' = mu / x, so lambda_S' = 1 - mu / S.
    auto lam1 = [mu](double r) { return 1.0 - 1.0 / dini_ratio_r(mu, r); };
    return Moc::from_lambda(lam, mu.r_lo(), lam1, {}, mu.smoothness_class() + 1);
}

LambdaCurve lambda_of(const Moc& mu, const std::vector<double>& r_grid)
{
    LambdaCurve c;
    c.analytic_deriv1 = mu.has_analytic_deriv1();
    c.eval = [mu](double r) { return mu.lambda(r); };
    c.d1 = [mu](double r) { return mu.lambda1(r); };
    c.d2 = [mu](double r) { return mu.lambda2(r); };
    for (double r : r_grid) {
        if (!(r > mu.r_lo()))
            throw Error(ErrorKind::DomainExceeded,
                        "r = " + std::to_string(r) + " maps outside (0, domain_hi)");
        c.r.push_back(r);
        c.value.push_back(mu.lambda(r));
        c.deriv1.push_back(mu.lambda1(r));
        c.deriv2.push_back(mu.lambda2(r));
    }
    return c;
}

double a_ratio_r(const Moc& mu, double r)
{
    double a;
    if (!mu.lambda_native() && mu.has_analytic_deriv1()) {
        const double x = std::exp(-r);
        a = x * mu.deriv1(x) / mu(x);
    } else {
        a = 1.0 - mu.lambda1(r);
    }
    if (!std::isfinite(a))
        throw Error(ErrorKind::DerivativeUnavailable, "A(x) not finite at r = " + std::to_string(r));
    return a;
}

double a_ratio(const Moc& mu, double x)
{
    if (!(x > 0) || !(mu(x) > 0))
        throw Error(ErrorKind::DomainExceeded, "a_ratio needs x > 0 and mu(x) > 0");
    return a_ratio_r(mu, -std::log(x));
}

namespace {

bool same_sign_within(double a, double b, double tol_a, double tol_b)
{
    const bool za = std::fabs(a) <= tol_a;
    const bool zb = std::fabs(b) <= tol_b;
    if (za || zb)
        return true;
    return (a > 0) == (b > 0);
}

}  // namespace

YudoMargins yudocond_margin_r(const Moc& mu, const std::vector<double>& r_grid)
{
    YudoMargins y;
    for (double r : r_grid) {
        const double x = std::exp(-r);
        const double l1 = mu.lambda1(r);
        const double l2 = mu.lambda2(r);
        // Independent route: plain finite differences of lambda.
        const Fn lam = [&mu](double s) { return mu.lambda(s); };
        const double h = num::rel_step(r);
        const double f1 = num::d1(lam, r, h);
        const double f2 = num::d2(lam, r, h);
        const double lambda_form = f2 + f1 * f1;
        double normalized;
        double raw;
        if (x > 0 && !mu.lambda_native()) {
            const double v = mu(x);
            raw = x * x * mu.deriv2(x) - x * mu.deriv1(x) + v;
            normalized = raw / v;
        } else {
            normalized = l2 + l1 * l1;
            raw = x > 0 ? normalized * mu(x) : 0.0;
        }
        const double scale = l1 * l1 + std::fabs(l2);
        y.r.push_back(r);
        y.margin.push_back(raw);
        y.normalized.push_back(normalized);
        y.lambda_form.push_back(lambda_form);
        if (!same_sign_within(normalized, lambda_form, 1e-10 * scale + 1e-300, 1e-6 * scale + 1e-300))
            y.signs_agree = false;
    }
    return y;
}

YudoMargins yudocond_margin(const Moc& mu, const std::vector<double>& x_grid)
{
    std::vector<double> r;
    r.reserve(x_grid.size());
    for (double x : x_grid) {
        if (!(x > 0))
            throw Error(ErrorKind::DomainExceeded, "yudocond_margin needs x > 0");
        r.push_back(-std::log(x));
    }
    return yudocond_margin_r(mu, r);
}

std::vector<double> r_grid(double r_start, double decades, int per_decade)
{
    std::vector<double> r;
    if (per_decade <= 0 || !(decades > 0))
        return r;
    const int n = static_cast<int>(std::ceil(decades * per_decade - 1e-9)) + 1;
    const double dr = std::log(10.0) / per_decade;
    r.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        r.push_back(r_start + dr * i);
    return r;
}

namespace {

std::vector<double> lambdas(const Moc& mu, const std::vector<double>& r)
{
    std::vector<double> l;
    l.reserve(r.size());
    for (double v : r)
        l.push_back(checked(mu.lambda(v), "lambda"));
    return l;
}

}  // namespace

Certificate certify_increasing(const Moc& mu, const std::vector<double>& r)
{
    Certificate c;
    c.grid = r;
    const auto l = lambdas(mu, r);
    c.holds = true;
    c.worst_margin = kInf;
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
        // log mu(x_i) - log mu(x_{i+1}) with x_{i+1} < x_i when r increases
        const double dir = r[i + 1] > r[i] ? 1.0 : -1.0;
        const double m = dir * ((l[i] - l[i + 1]) + (r[i + 1] - r[i]));
        c.worst_margin = std::min(c.worst_margin, m);
        if (!(m > 0) && c.holds) {
            c.holds = false;
            c.witness = r[i];
        }
    }
    return c;
}

Certificate certify_concave(const Moc& mu, const std::vector<double>& r, double tol)
{
    Certificate c;
    c.grid = r;
    const auto sd = num::relative_second_differences(r, lambdas(mu, r));
    c.holds = true;
    c.worst_margin = -kInf;
    for (std::size_t i = 0; i < sd.size(); ++i) {
        c.worst_margin = std::max(c.worst_margin, sd[i]);
        if (sd[i] > tol && c.holds) {
            c.holds = false;
            c.witness = r[i + 1];
        }
    }
    return c;
}

Certificate certify_strongly_strictly_concave(const Moc& mu, const std::vector<double>& r)
{
    Certificate c = certify_concave(mu, r, 0.0);
    if (!c.holds)
        return c;
    // Also require x^2 mu'' / mu = lambda'^2 - lambda' + lambda'' < 0 pointwise.
    for (double v : r) {
        const double l1 = mu.lambda1(v);
        const double m = l1 * l1 - l1 + mu.lambda2(v);
        if (!(m < 0)) {
            c.holds = false;
            c.witness = v;
            c.worst_margin = std::max(c.worst_margin, m);
            break;
        }
    }
    return c;
}

Certificate certify_lambda_strictly_concave(const Moc& mu, const std::vector<double>& r)
{
    Certificate c;
    c.grid = r;
    c.holds = true;
    c.worst_margin = -kInf;
    for (double v : r) {
        const double l2 = mu.lambda2(v);
        c.worst_margin = std::max(c.worst_margin, l2);
        if (!(l2 < 0) && c.holds) {
            c.holds = false;
            c.witness = v;
        }
    }
    return c;
}

DiagnosticsReport diagnose(const Moc& mu, const DiagnosticsOptions& opts)
{
    DiagnosticsReport rep;
    double r0 = opts.r_start;
    if (!(r0 > 0)) {
        const double lo = std::isfinite(mu.r_lo()) ? std::max(mu.r_lo(), 1.0) : 1.0;
        r0 = lo * (1.0 + 1e-9) + 1e-9;
    }
    const auto grid = r_grid(r0, opts.decades, opts.per_decade);

    rep.is_strictly_increasing = certify_increasing(mu, grid);
    rep.is_concave = certify_concave(mu, grid, opts.concavity_tol);
    rep.is_strongly_strictly_concave = certify_strongly_strictly_concave(mu, grid);
    rep.lambda_strictly_concave = certify_lambda_strictly_concave(mu, grid);
    rep.osgood = osgood_shells(mu, r0, opts.osgood_shells, opts.osgood_kappa);

    rep.dini_finite = true;
    for (std::size_t i = 0; i < grid.size(); i += static_cast<std::size_t>(opts.per_decade)) {
        const double r = grid[i];
        try {
            const double j = dini_ratio_r(mu, r);
            rep.dini_r.push_back(r);
            rep.dini_log_value.push_back(mu.lambda(r) - r + std::log(j));
            rep.dini_ratio.push_back(j);
        } catch (const Error&) {
            rep.dini_finite = false;
            break;
        }
    }

    for (double r : grid) {
        rep.a_r.push_back(r);
        rep.a_curve.push_back(a_ratio_r(mu, r));
    }
    rep.yudocond = yudocond_margin_r(mu, grid);
    return rep;
}

}  // namespace moclab
