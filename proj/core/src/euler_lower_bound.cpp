#include "moclab/euler_lower_bound.hpp"

#include "moclab/error.hpp"
#include "moclab/families.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <array>
#include <queue>
#include <string>

namespace moclab {

namespace {

constexpr double kPi = M_PI;

bool finite_support(const SquareSymmetricVorticity& w)
{
    return std::isfinite(w.r_max) && w.r_max > 0;
}

// omega0(e^{-u}), staying in log form when the profile provides it.
double axis_at_u(const SquareSymmetricVorticity& w, double u)
{
    if (std::isfinite(w.r_max) && u < -std::log(w.r_max))
        return 0.0;
    if (w.log_axis_u) {
        const double l = w.log_axis_u(u);
        return std::isfinite(l) ? std::exp(l) : 0.0;
    }
    return w.axis(std::exp(-u));
}

double log_axis_at_u(const SquareSymmetricVorticity& w, double u)
{
    if (std::isfinite(w.r_max) && u < -std::log(w.r_max))
        return -std::numeric_limits<double>::infinity();
    if (w.log_axis_u)
        return w.log_axis_u(u);
    const double v = w.axis(std::exp(-u));
    return v > 0 ? std::log(v) : -std::numeric_limits<double>::infinity();
}

// f1 - f2 without cancellation.
double kernel_diff(double x, double y1, double y2)
{
    const double d1 = (x - y1) * (x - y1) + y2 * y2;
    const double d2 = (x + y1) * (x + y1) + y2 * y2;
    if (d1 == 0.0)
        return 0.0;
    return 4.0 * x * y1 * y2 / (d1 * d2);
}

struct GaussRule {
    std::array<double, 8> node{};
    std::array<double, 8> weight{};
};

const GaussRule& gauss8()
{
    static const GaussRule rule = [] {
        using GL = boost::math::quadrature::gauss<double, 8>;
        GaussRule g;
        const auto& a = GL::abscissa();
        const auto& w = GL::weights();
        for (std::size_t i = 0; i < a.size(); ++i) {
            g.node[i] = -a[i];
            g.weight[i] = w[i];
            g.node[7 - i] = a[i];
            g.weight[7 - i] = w[i];
        }
        return g;
    }();
    return rule;
}

// Each triangle of Q1 split by the diagonal is mapped onto (s, tau) in [0, R] x [0, 1]:
// lower: y = (s, s tau); upper: y = (s tau, s). The field depends on s alone.
struct Cell {
    double s0, s1, t0, t1;
    bool upper;
    double coarse;
    double fine;
    double err;
    std::array<double, 4> child;
};

struct CellCmp {
    bool operator()(const Cell& a, const Cell& b) const { return a.err < b.err; }
};

class ShellCubature {
public:
    ShellCubature(const SquareSymmetricVorticity& w, double x) : w_(w), x_(x) {}

    double rule(double s0, double s1, double t0, double t1, bool upper) const
    {
        const GaussRule& g = gauss8();
        const double hs = 0.5 * (s1 - s0);
        const double ht = 0.5 * (t1 - t0);
        double sum = 0.0;
        for (int i = 0; i < 8; ++i) {
            const double s = s0 + hs * (1.0 + g.node[i]);
            const double om = w_.axis(s);
            if (om == 0.0)
                continue;
            double inner = 0.0;
            for (int j = 0; j < 8; ++j) {
                const double t = t0 + ht * (1.0 + g.node[j]);
                const double y1 = upper ? s * t : s;
                const double y2 = upper ? s : s * t;
                inner += g.weight[j] * kernel_diff(x_, y1, y2);
            }
            sum += g.weight[i] * om * s * inner;
        }
        return sum * hs * ht;
    }

    Cell make(double s0, double s1, double t0, double t1, bool upper, double coarse) const
    {
        Cell c{s0, s1, t0, t1, upper, coarse, 0.0, 0.0, {}};
        const double sm = 0.5 * (s0 + s1);
        const double tm = 0.5 * (t0 + t1);
        c.child[0] = rule(s0, sm, t0, tm, upper);
        c.child[1] = rule(sm, s1, t0, tm, upper);
        c.child[2] = rule(s0, sm, tm, t1, upper);
        c.child[3] = rule(sm, s1, tm, t1, upper);
        c.fine = c.child[0] + c.child[1] + c.child[2] + c.child[3];
        c.err = std::fabs(c.fine - c.coarse);
        return c;
    }

    Cell make(double s0, double s1, double t0, double t1, bool upper) const
    {
        return make(s0, s1, t0, t1, upper, rule(s0, s1, t0, t1, upper));
    }

private:
    const SquareSymmetricVorticity& w_;
    double x_;
};

std::vector<double> clean_breaks(std::vector<double> b, double lo, double hi)
{
    b.push_back(lo);
    b.push_back(hi);
    std::sort(b.begin(), b.end());
    std::vector<double> out;
    for (double v : b) {
        if (v < lo || v > hi)
            continue;
        if (out.empty() || v - out.back() > 1e-14 * std::max(1.0, std::fabs(v)))
            out.push_back(v);
    }
    return out;
}

}  // namespace

SquareSymmetricVorticity zero_vorticity()
{
    SquareSymmetricVorticity w;
    w.axis_profile = [](double) { return 0.0; };
    w.r_max = 1.0;
    w.name = "zero";
    return w;
}

SquareSymmetricVorticity indicator_square(double r, double height)
{
    if (!(r > 0))
        throw Error(ErrorKind::ConfigError, "square side must be positive");
    SquareSymmetricVorticity w;
    w.axis_profile = [height](double) { return height; };
    w.r_max = r;
    w.log_axis_u = [height](double) { return std::log(height); };
    w.name = "indicator";
    return w;
}

SquareSymmetricVorticity constant_axis(double height)
{
    SquareSymmetricVorticity w;
    w.axis_profile = [height](double) { return height; };
    w.log_axis_u = [height](double) { return std::log(height); };
    w.name = "constant";
    return w;
}

SquareSymmetricVorticity log_singular(int m)
{
    if (m < 2 || m > 5)
        throw Error(ErrorKind::ConfigError, "log-singular profile needs m in [2, 5]");
    SquareSymmetricVorticity w;
    const double u_lo = family::iterated_exp(m - 1, 0.0);
    w.r_max = std::exp(-u_lo);
    w.log_axis_u = [m, u_lo](double u) {
        if (!(u > u_lo))
            return -std::numeric_limits<double>::infinity();
        double l = u;
        double sum = 0.0;
        for (int k = 1; k < m; ++k) {
            l = std::log(l);
            if (!(l > 0))
                return -std::numeric_limits<double>::infinity();
            sum += std::log(l);
        }
        return sum;
    };
    auto lau = w.log_axis_u;
    w.axis_profile = [lau](double s) {
        const double l = lau(-std::log(s));
        return std::isfinite(l) ? std::exp(l) : 0.0;
    };
    w.name = "log-singular-m=" + std::to_string(m);
    return w;
}

SquareSymmetricVorticity layered(Fn alpha, double r_max)
{
    if (!(r_max > 0) || !std::isfinite(r_max))
        throw Error(ErrorKind::ConfigError, "layered profile needs a finite outer radius");
    SquareSymmetricVorticity w;
    w.alpha_s = alpha;
    w.r_max = r_max;
    w.axis_profile = [alpha, r_max](double x) {
        if (x >= r_max)
            return 0.0;
        // densities may blow up at 0, so grade the pieces geometrically from x
        std::vector<double> knots{x};
        while (knots.back() * 2.0 < r_max)
            knots.push_back(knots.back() * 2.0);
        knots.push_back(r_max);
        return 2.0 * kPi * num::integrate_pieces(alpha, knots, 1e-12);
    };
    w.name = "layered";
    return w;
}

SquareSymmetricVorticity combine(double a, const SquareSymmetricVorticity& w1, double b,
                                 const SquareSymmetricVorticity& w2)
{
    SquareSymmetricVorticity w;
    w.axis_profile = [a, b, w1, w2](double s) { return a * w1.axis(s) + b * w2.axis(s); };
    w.r_max = std::max(w1.r_max, w2.r_max);
    w.breaks = w1.breaks;
    w.breaks.insert(w.breaks.end(), w2.breaks.begin(), w2.breaks.end());
    if (w1.r_max < w.r_max)
        w.breaks.push_back(w1.r_max);
    if (w2.r_max < w.r_max)
        w.breaks.push_back(w2.r_max);
    w.name = "combination";
    return w;
}

double kernel_f1(double x1, double y1, double y2)
{
    return y2 / ((x1 - y1) * (x1 - y1) + y2 * y2);
}

double kernel_f2(double x1, double y1, double y2)
{
    return y2 / ((x1 + y1) * (x1 + y1) + y2 * y2);
}

BiotSavartResult biot_savart_axis(const SquareSymmetricVorticity& w, double x1,
                                  const BiotSavartOptions& opts)
{
    if (!(x1 > 0))
        throw Error(ErrorKind::DomainExceeded, "axis point must satisfy x1 > 0");
    if (!finite_support(w))
        throw Error(ErrorKind::DomainExceeded, "Biot-Savart integral needs compact support");
    const double R = w.r_max;
    constexpr int kGrade = 16;

    std::vector<double> sb = w.breaks;
    const double anchor = std::min(x1, R);
    for (int k = 1; k <= kGrade; ++k) {
        const double f = std::ldexp(1.0, -k);
        sb.push_back(anchor * f);
        sb.push_back(x1 * (1.0 - f));
        sb.push_back(x1 * (1.0 + f));
    }
    sb.push_back(x1);
    // the kernel varies on the scale of s away from x1
    for (double b = 2.0 * x1; b < R; b *= 2.0)
        sb.push_back(b);
    sb = clean_breaks(sb, 0.0, R);

    std::vector<double> tb_lower{0.0, 1.0};
    for (int k = 1; k <= kGrade; ++k)
        tb_lower.push_back(std::ldexp(1.0, -k));
    tb_lower = clean_breaks(tb_lower, 0.0, 1.0);
    const std::vector<double> tb_upper{0.0, 0.5, 1.0};

    ShellCubature cub(w, x1);
    std::priority_queue<Cell, std::vector<Cell>, CellCmp> heap;
    double total = 0.0;
    double err = 0.0;
    auto push = [&](const Cell& c) {
        total += c.fine;
        err += c.err;
        heap.push(c);
    };
    for (std::size_t i = 0; i + 1 < sb.size(); ++i) {
        for (std::size_t j = 0; j + 1 < tb_lower.size(); ++j)
            push(cub.make(sb[i], sb[i + 1], tb_lower[j], tb_lower[j + 1], false));
        for (std::size_t j = 0; j + 1 < tb_upper.size(); ++j)
            push(cub.make(sb[i], sb[i + 1], tb_upper[j], tb_upper[j + 1], true));
    }

    int cells = static_cast<int>(heap.size());
    long since_resum = 0;
    while (err > opts.rel_tol * std::fabs(total) && err > 1e-300) {
        if (cells >= opts.max_cells)
            throw Error(ErrorKind::QuadratureNonconvergent,
                        "Biot-Savart cubature: error " + std::to_string(err) + " after " +
                            std::to_string(cells) + " cells");
        const Cell c = heap.top();
        heap.pop();
        total -= c.fine;
        err -= c.err;
        const double sm = 0.5 * (c.s0 + c.s1);
        const double tm = 0.5 * (c.t0 + c.t1);
        push(cub.make(c.s0, sm, c.t0, tm, c.upper, c.child[0]));
        push(cub.make(sm, c.s1, c.t0, tm, c.upper, c.child[1]));
        push(cub.make(c.s0, sm, tm, c.t1, c.upper, c.child[2]));
        push(cub.make(sm, c.s1, tm, c.t1, c.upper, c.child[3]));
        cells += 3;
        if (++since_resum == 512) {
            // running sums drift; rebuild them from the heap
            since_resum = 0;
            auto copy = heap;
            total = 0.0;
            err = 0.0;
            while (!copy.empty()) {
                total += copy.top().fine;
                err += copy.top().err;
                copy.pop();
            }
        }
    }
    return {total / kPi, err / kPi, cells};
}

double biot_savart_axis_shells(const SquareSymmetricVorticity& w, double x1)
{
    if (!(x1 > 0))
        throw Error(ErrorKind::DomainExceeded, "axis point must satisfy x1 > 0");
    if (!finite_support(w))
        throw Error(ErrorKind::DomainExceeded, "Biot-Savart integral needs compact support");
    const double x = x1;
    // closed-form shell integral of f1 - f2, written without cancellation near s = 0
    // dm = x - s is passed separately so pieces touching s = x keep it exact
    auto k = [x](double s, double dm) {
        const double s3 = s * s * s;
        const double dp = x + s;
        double v = std::atan(2.0 * x * s3 / (x * x * x * x + x * x * s * s + 2.0 * s * s * s * s));
        const double a = 4.0 * x * s3 / (dp * dp + s * s);
        if (std::fabs(dm) < 1e-100)
            v += 0.5 * std::log(a) - std::log(std::fabs(dm));  // dm^2 would underflow
        else
            v += 0.5 * std::log1p(a / (dm * dm));
        return v;
    };
    auto integrand = [&w, &k](double s, double dm) {
        const double om = w.axis(s);
        return om == 0.0 ? 0.0 : om * k(s, dm);
    };
    std::vector<double> b = w.breaks;
    b.push_back(x);
    b.push_back(0.5 * x);
    b.push_back(2.0 * x);
    b = clean_breaks(b, 0.0, w.r_max);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
        const double lo = b[i];
        const double hi = b[i + 1];
        if (hi == x)
            sum += num::integrate_endpoint_singular([&](double d) { return integrand(x - d, d); }, 0.0,
                                                    x - lo, 1e-12);
        else if (lo == x)
            sum += num::integrate_endpoint_singular([&](double d) { return integrand(x + d, -d); }, 0.0,
                                                    hi - x, 1e-12);
        else
            sum += num::integrate_endpoint_singular([&](double s) { return integrand(s, x - s); }, lo, hi,
                                                    1e-12);
    }
    return sum / kPi;
}

double square_patch_phi(double r, double x1)
{
    const double a = r + x1;
    const double d = std::fabs(r - x1);
    const double second = d > 0 ? 2.0 * (r - x1) * std::log(d) : 0.0;
    return 2.0 * a * std::log(a) - second;
}

double square_patch_psi(double r, double x1)
{
    auto f = [r, x1](double y) {
        const double num = (x1 - y) * (x1 - y) + r * r;
        return -std::log1p(4.0 * x1 * y / num);
    };
    return num::integrate(f, 0.0, r, 1e-13);
}

double square_patch_velocity_exact(double r, double x1)
{
    return -4.0 * x1 * std::log(x1) + square_patch_phi(r, x1) + square_patch_psi(r, x1);
}

double scaling_check(double r, double x1, const BiotSavartOptions& opts)
{
    const double vr = biot_savart_axis(indicator_square(r), x1, opts).value;
    const double v1 = biot_savart_axis(indicator_square(1.0), x1 / r, opts).value;
    return std::fabs(vr - r * v1) / std::fabs(v1);
}

LowerBoundConfig make_lower_bound_config(double lambda, double neighborhood_hi, double t_max)
{
    if (!(lambda > 0 && lambda < 1))
        throw Error(ErrorKind::ConfigError, "lambda must lie in (0, 1)");
    LowerBoundConfig cfg;
    cfg.lambda = lambda;
    cfg.c_lambda = (1.0 - lambda) / kPi;
    cfg.neighborhood_hi = neighborhood_hi;
    cfg.t_max = t_max;
    return cfg;
}

namespace {

// du/dt for u = -log x1 under dx1/dt = L(t, x1).
double lower_bound_rate_u(const SquareSymmetricVorticity& w, const LowerBoundConfig& cfg,
                          const FlowFamily* gamma, double t, double u)
{
    double om = 0.0;
    if (gamma) {
        const double r_arg = cfg.lambda * u - 0.5 * cfg.lambda * std::log(2.0);
        const double R = gamma->gamma_r(t, r_arg);
        if (std::isfinite(w.r_max) && R < -std::log(w.r_max))
            throw Error(ErrorKind::DomainExceeded, "flowed point leaves the vorticity support");
        om = axis_at_u(w, R);
    } else {
        if (t != 0.0)
            throw Error(ErrorKind::DomainExceeded, "time-dependent bound needs a flow");
        om = axis_at_u(w, cfg.lambda * u);
    }
    return -cfg.c_lambda * om * u;
}

}  // namespace

double lower_bound_velocity(const SquareSymmetricVorticity& w, const LowerBoundConfig& cfg,
                            const FlowFamily* gamma, double t, double x1)
{
    if (!(x1 > 0 && x1 < cfg.neighborhood_hi))
        throw Error(ErrorKind::DomainExceeded, "x1 outside (0, neighborhood_hi)");
    const double u = -std::log(x1);
    return -x1 * lower_bound_rate_u(w, cfg, gamma, t, u);
}

FlowLowerBound propagate_rate_u(const RateFn& du_dt, const LowerBoundConfig& cfg, double a,
                                const std::vector<double>& t_grid)
{
    if (!(a > 0 && a < cfg.neighborhood_hi))
        throw Error(ErrorKind::DomainExceeded, "starting point outside (0, neighborhood_hi)");
    if (t_grid.empty())
        throw Error(ErrorKind::ConfigError, "empty time grid");
    const double u_min = -std::log(cfg.neighborhood_hi);
    FlowLowerBound out;
    out.a = a;
    out.source = LowerBoundSource::Ode;
    num::OdeOptions opts;
    opts.rel_tol = 1e-12;
    opts.abs_tol = 1e-14;
    opts.first_step = 1e-6;
    auto guard = [u_min](double, double u) { return u > u_min; };

    double u = -std::log(a);
    double t_prev = 0.0;
    for (double t : t_grid) {
        if (t != t_prev) {
            const num::OdeResult r = num::solve_ode(du_dt, u, t_prev, t, opts, guard);
            if (r.aborted) {
                out.left_neighborhood = true;
                out.t_exit = r.t;
                break;
            }
            u = r.y;
            t_prev = t;
        }
        out.t.push_back(t);
        out.log_x.push_back(-u);
        out.x.push_back(std::exp(-u));
    }
    return out;
}

FlowLowerBound propagate_rate(const RateFn& rate, const LowerBoundConfig& cfg, double a,
                              const std::vector<double>& t_grid)
{
    auto du = [rate](double t, double u) {
        const double x = std::exp(-u);
        return -rate(t, x) / x;
    };
    return propagate_rate_u(du, cfg, a, t_grid);
}

FlowLowerBound propagate_lower_bound(const SquareSymmetricVorticity& w, const LowerBoundConfig& cfg,
                                     const FlowFamily* gamma, double a,
                                     const std::vector<double>& t_grid)
{
    auto du = [&w, &cfg, gamma](double t, double u) {
        return lower_bound_rate_u(w, cfg, gamma, t, u);
    };
    return propagate_rate_u(du, cfg, a, t_grid);
}

RateFn m2_reduced_rate_u(double K, double C)
{
    return [K, C](double t, double u) {
        if (!(u > 1.0))
            throw Error(ErrorKind::DomainExceeded, "reduced rate needs log(1/x1) > 1");
        return -K * std::exp(-C * t) * u * std::log(u);
    };
}

double m2_closed_form_log(double K, double C, double a, double t)
{
    const double gamma = std::exp(K * std::expm1(-C * t) / C);
    return -std::pow(-std::log(a), gamma);
}

double bounded_closed_form_log(double c_lambda, double a, double t)
{
    return std::log(a) * std::exp(-c_lambda * t);
}

HolderReport holder_quotient(const TrajectoryFn& log_x1, double t, double alpha,
                             const std::vector<double>& a_seq)
{
    HolderReport rep;
    rep.a = a_seq;
    std::sort(rep.a.begin(), rep.a.end(), std::greater<>());
    for (double a : rep.a)
        rep.log10_quotient.push_back((log_x1(a, t) - alpha * std::log(a)) / std::log(10.0));
    bool all = rep.a.size() >= 2;
    for (std::size_t i = 0; i + 1 < rep.a.size(); ++i) {
        const double decades = std::log10(rep.a[i] / rep.a[i + 1]);
        const double g = (rep.log10_quotient[i + 1] - rep.log10_quotient[i]) / decades;
        rep.growth_per_decade.push_back(g);
        if (!(g >= 1.0))
            all = false;
    }
    const double span = rep.a.size() >= 2 ? std::log10(rep.a.front() / rep.a.back()) : 0.0;
    rep.diverging = all && span >= 4.0 - 1e-12;
    return rep;
}

LpNormResult lp_norm(const SquareSymmetricVorticity& w, double p)
{
    if (!(p >= 1))
        throw Error(ErrorKind::ConfigError, "p must be at least 1");
    if (!finite_support(w))
        throw Error(ErrorKind::DomainExceeded, "L^p norm needs compact support");
    const double u_lo = -std::log(w.r_max);
    auto S = [&w, p](double u) { return -2.0 * u + p * log_axis_at_u(w, u); };

    // walk outward until the log-integrand has dropped far below its peak
    std::vector<double> knots{u_lo};
    double s_max = -std::numeric_limits<double>::infinity();
    double step = 1e-3;
    for (int k = 0; k < 2000; ++k) {
        const double u = knots.back() + step;
        knots.push_back(u);
        const double s = S(u);
        if (s > s_max)
            s_max = s;
        else if (std::isfinite(s_max) && s < s_max - 80.0)
            break;
        step *= 1.25;
    }
    if (!std::isfinite(s_max))
        return {-std::numeric_limits<double>::infinity(), 0.0, 0.0};
    // drop the rising edge that sits far below the peak; GK cannot resolve denormal mass
    std::size_t first = 0;
    while (first + 2 < knots.size() && !(S(knots[first + 1]) >= s_max - 80.0))
        ++first;
    knots.erase(knots.begin(), knots.begin() + static_cast<std::ptrdiff_t>(first));
    auto f = [&S, s_max](double u) {
        const double v = S(u) - s_max;
        return std::isfinite(v) ? std::exp(v) : 0.0;
    };
    const double sum = num::integrate_pieces(f, knots, 1e-12);
    LpNormResult out;
    out.log_norm = (std::log(8.0) + s_max + std::log(sum)) / p;
    out.norm = std::exp(out.log_norm);
    return out;
}

LpNormResult lp_norm_singular(int m, double p)
{
    LpNormResult out = lp_norm(log_singular(m), p);
    out.ratio = std::exp(out.log_norm - family::log_theta(m - 1, p));
    return out;
}

}  // namespace moclab
