// One line per criterion: PASS, FAIL, XFAIL (known unattainable) or XPASS.
// Exit status counts only unexpected failures.

#include "moclab/error.hpp"
#include "moclab/euler_lower_bound.hpp"
#include "moclab/families.hpp"
#include "moclab/forward_map.hpp"
#include "moclab/inverse_map.hpp"
#include "moclab/moc.hpp"
#include "moclab/vorticity_recovery.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

using namespace moclab;

namespace {

// pinned tolerances
constexpr double kTolC1Mu = 1e-6;
constexpr double kTolC1Gamma = 1e-6;
constexpr double kTolC2Std = 1e-4;
constexpr double kTolC3Band = 0.05;
constexpr double kTolC4Spread = 1e-6;
constexpr double kTolC4Shell = 1e-8;
constexpr double kTolC5Group = 1e-6;
constexpr double kTolC5Concave = 1e-9;
constexpr double kTolC6Transport = 1e-4;
constexpr double kTolC7Oracle = 1e-4;
constexpr double kTolC7Scaling = 1e-4;
constexpr double kC7BudgetSeconds = 300.0;
constexpr double kC8Factor = 10.0;
constexpr double kC9Lo = 0.9 * 0.1353352832366127;  // 0.9 e^{-2}
constexpr double kC9Hi = 1.1;
constexpr double kC10Band = 0.6931471805599453 + 0.1;
constexpr double kC10RhoLo = 0.5;
constexpr double kC10RhoHi = 2.0;
constexpr double kC11A = 1e-2;
constexpr double kC11Yudo = -1e-9;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    std::string id;
    std::string title;
    bool known_unattainable = false;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, double a)
{
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt2(const char* f, double a, double b)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

double max_abs_dev_from_mid(const std::vector<double>& v)
{
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return 0.5 * (*hi - *lo);
}

Outcome c1_mu()
{
    const LpProfile prof = constant_profile(1.0);
    const auto xs = num::log_grid(1e-8, 0.9 / M_E, 16);
    const Moc mu = mu_from_theta(prof, xs);
    double worst = 0.0;
    for (double x : xs) {
        const double exact = -2.0 * M_E * x * std::log(x);
        worst = std::max(worst, std::fabs(mu(x) - exact) / exact);
    }
    return {worst <= kTolC1Mu, fmt("max rel err %.3e", worst)};
}

Outcome c1_gamma()
{
    const LpProfile prof = constant_profile(1.0);
    const Moc mu = mu_from_theta(prof, num::log_grid(1e-8, 0.3, 8));
    const FlowFamily fl = flow_from_mu(mu);
    double worst = 0.0;
    for (double t : {0.1, 0.5, 1.0}) {
        // keep Gamma_t(x) inside r >= 1.1, where the closed form applies.
        // The x-relative error is r times the r-relative ODE error, hence r <= 1e3.
        const double r_lo = 1.1 * std::exp(2.0 * M_E * t);
        for (double r : num::log_grid(r_lo, 1e3, 8)) {
            const double R = fl.gamma_r(t, r);
            const double R_exact = r * std::exp(-2.0 * M_E * t);
            worst = std::max(worst, std::fabs(std::expm1(R_exact - R)));
        }
    }
    return {worst <= kTolC1Gamma, fmt("max rel err in Gamma %.3e", worst)};
}

Outcome c2()
{
    const Moc mu = Moc::from_lambda([](double r) { return std::log(r); }, 0.0,
                                    [](double r) { return 1.0 / r; },
                                    [](double r) { return -1.0 / (r * r); }, 100);
    const ThetaFromMu th = theta_from_mu(mu, num::log_grid(1e2, 1e6, 8));
    const double mean = std::accumulate(th.log_theta.begin(), th.log_theta.end(), 0.0) /
                        static_cast<double>(th.log_theta.size());
    double var = 0.0;
    for (double v : th.log_theta)
        var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(th.log_theta.size()));
    return {sd <= kTolC2Std, fmt("std of log theta %.3e", sd)};
}

Outcome c3()
{
    double worst = 0.0;
    for (int m : {1, 2}) {
        const LpProfile prof = family::theta(m);
        const Moc mu = mu_from_theta(prof, num::log_grid(1e-300, 1e-3, 2));
        const auto ps = num::log_grid(1e2, 1e5, 8);
        const ThetaFromMu th = theta_from_mu(mu, ps);
        std::vector<double> d;
        for (std::size_t i = 0; i < ps.size(); ++i)
            d.push_back(th.log_theta[i] - prof.log_theta(ps[i]));
        worst = std::max(worst, max_abs_dev_from_mid(d));
    }
    return {worst <= kTolC3Band, fmt("half-spread of log ratio %.3e", worst)};
}

Outcome c4_case(const AcceptableMoc& f, double a, const char* label)
{
    const double t0 = 1.0;
    const SingleTimeResult res = mu_from_gamma_single_time(f, t0, a);
    std::vector<double> I;
    for (double x : num::log_grid(1e-10, 1e-2, 4))
        I.push_back(osgood_integral(res.mu, x, f.f(x)));
    const auto [lo, hi] = std::minmax_element(I.begin(), I.end());
    const double spread = *hi - *lo;
    double shell = 0.0;
    for (double x = 1e-10; f.f(x) <= 1e-2; x = f.f(x))
        shell = std::max(shell, std::fabs(osgood_integral(res.mu, x, f.f(x)) - t0));
    const bool ok = spread <= kTolC4Spread * t0 && shell <= kTolC4Shell;
    return {ok, std::string(label) + fmt2(": spread %.3e, worst shell %.3e", spread, shell)};
}

Outcome c4()
{
    const Outcome a = c4_case(family::f_time(1, 1.0), 1e-3, "f_1^1");
    const AcceptableMoc sq = acceptable_from_r([](double r) { return 0.5 * r; },
                                               [](double) { return 0.5; },
                                               [](double r) { return 2.0 * r; }, 1.0);
    const Outcome b = c4_case(sq, 1e-3, "sqrt");
    return {a.pass && b.pass, a.detail + "; " + b.detail};
}

Outcome c5_group()
{
    double worst = 0.0;
    auto probe = [&worst](const FlowFamily& fl, double r0) {
        for (double s : {0.1, 0.3, 0.7})
            for (double t : {0.2, 0.5}) {
                for (double r : num::log_grid(r0, r0 * 1e3, 4)) {
                    const double lhs = fl.gamma_r(s, fl.gamma_r(t, r));
                    const double rhs = fl.gamma_r(s + t, r);
                    worst = std::max(worst, std::fabs(std::expm1(rhs - lhs)));
                }
            }
    };
    probe(family::flow(1), 20.0);
    probe(family::flow(2), 1e5);
    probe(flow_from_mu(family::mu(1)), 20.0);
    return {worst <= kTolC5Group, fmt("max rel deviation %.3e", worst)};
}

Outcome c5_concavify()
{
    std::string detail;
    bool ok = true;
    // m >= 2 varies below double resolution in s; see the decision log
    for (int m : {1}) {
        const GeneratingFunction h = family::h(m);
        const ConcaveCig c = concavify_cig(h);
        const double r0 = std::max(c.r_cert, 1.0) * 1.01;
        const auto rs = num::log_grid(r0, r0 * 1e4, 64);
        const Certificate conc = certify_concave(c.mu, rs, kTolC5Concave);
        double worst_olf = -1e300;
        for (double r : rs)
            worst_olf = std::max(worst_olf, concave_cig_j_r(c, r) - cig_r(h, 1.0, r));
        double worst_sand = -1e300;
        for (double s : num::linspace(c.s_lo + 1.0, c.s_top - 2.0, 200)) {
            const double Hb = c.hbar.H(s);
            if (Hb < r0)
                continue;
            worst_sand = std::max(worst_sand, Hb - h.H(s));
            worst_sand = std::max(worst_sand, h.H(s) - c.hbar.H(s - 1.0));
        }
        const bool mok = conc.holds && worst_olf < 0 && worst_sand < 0;
        ok = ok && mok;
        detail += "m=" + std::to_string(m) + fmt(": concave margin %.2e", conc.worst_margin) +
                  fmt2(", olf2 %.2e, sandwich %.2e; ", worst_olf, worst_sand);
    }
    return {ok, detail};
}

Outcome c6()
{
    double worst = 0.0;
    for (int m : {1, 2, 3}) {
        // the flowed point must stay certified: log^m r > 1 + t. For m = 3 and t = 1 that
        // needs r beyond double range, so m = 3 stops at t = 0.5.
        const std::vector<double> ts = m == 3 ? std::vector<double>{0.1, 0.5}
                                              : std::vector<double>{0.1, 0.5, 1.0};
        const double r0 = family::iterated_exp(m, 1.1 + ts.back());
        const TransportReport rep = verify_transport_r(family::mu(m), family::flow(m), ts,
                                                       num::log_grid(r0, r0 * 1e6, 8));
        worst = std::max({worst, rep.max_space_residual, rep.max_time_residual});
    }
    return {worst <= kTolC6Transport, fmt("max residual %.3e", worst)};
}

Outcome c7()
{
    const auto t0 = std::chrono::steady_clock::now();
    const SquareSymmetricVorticity w = indicator_square(1.0);
    double worst_bc = 1e300;
    double worst_oracle = 0.0;
    for (double x : {1e-3, 1e-4, 1e-5}) {
        const double v = biot_savart_axis(w, x).value;
        worst_bc = std::min(worst_bc, v / (2.0 * x * std::log(1.0 / x)));
        const double exact = square_patch_velocity_exact(1.0, x);
        worst_oracle = std::max(worst_oracle, std::fabs(v - exact) / exact);
    }
    double worst_scale = 0.0;
    for (double r : {0.5, 0.1})
        for (double x : {1e-3, 1e-4})
            worst_scale = std::max(worst_scale, scaling_check(r, x));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = worst_bc >= 1.0 && worst_oracle <= kTolC7Oracle &&
                    worst_scale <= kTolC7Scaling && secs <= kC7BudgetSeconds;
    return {ok, fmt("min v/(2x log(1/x)) %.4f", worst_bc) +
                    fmt2(", oracle rel err %.2e, scaling %.2e", worst_oracle, worst_scale) +
                    fmt(", %.1f s", secs)};
}

Outcome c8_bounded()
{
    const LowerBoundConfig cfg = make_lower_bound_config(0.5, 1e-2, 1.0);
    const SquareSymmetricVorticity w = constant_axis(1.0);
    const double t = 1.0;
    const double alpha = 1.2 * std::exp(-cfg.c_lambda * t);
    // bounded-vorticity flow, Gamma_t(x) = x^{exp(-2et)}
    FlowFamily bounded;
    bounded.gamma_r = [](double tt, double r) { return r * std::exp(-2.0 * M_E * tt); };
    auto traj = [&](double a, double tt) {
        return propagate_lower_bound(w, cfg, &bounded, a, {0.0, tt}).log_x.back();
    };
    std::vector<double> as;
    for (int k = 4; k <= 12; ++k)
        as.push_back(std::pow(10.0, -k));
    const HolderReport rep = holder_quotient(traj, t, alpha, as);
    const double g = *std::min_element(rep.growth_per_decade.begin(), rep.growth_per_decade.end());
    return {g >= std::log10(kC8Factor),
            fmt("slowest growth %.3fx per decade", std::pow(10.0, g))};
}

Outcome c8_m2()
{
    const LowerBoundConfig cfg = make_lower_bound_config(0.5, 1e-2, 1.0);
    const double K = cfg.c_lambda;
    const double t = 0.5;
    const RateFn rate = m2_reduced_rate_u(K, 1.0);
    auto traj = [&](double a, double tt) {
        return propagate_rate_u(rate, cfg, a, {0.0, tt}).log_x.back();
    };
    std::vector<double> as;
    for (int k = 4; k <= 12; ++k)
        as.push_back(std::pow(10.0, -k));
    const HolderReport rep = holder_quotient(traj, t, 0.1, as);
    const double g = *std::min_element(rep.growth_per_decade.begin(), rep.growth_per_decade.end());
    return {rep.diverging, fmt("slowest growth %.3e decades per decade", g)};
}

Outcome c9()
{
    double lo = 1e300;
    double hi = -1e300;
    for (double p : {50.0, 100.0, 200.0, 400.0}) {
        const double ratio = lp_norm_singular(2, p).ratio;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    return {lo >= kC9Lo && hi <= kC9Hi, fmt2("ratio range [%.4f, %.4f]", lo, hi)};
}

Outcome c10_theta()
{
    const DistributionProfile d = recover_rho(family::phi(1), 50.0);
    double worst = 0.0;
    for (double p : num::log_grid(1e2, 1e3, 16)) {
        const double rec = mellin_forward(d, p).log_theta;
        worst = std::max(worst, std::fabs(rec - family::log_theta(1, p)));
    }
    return {worst <= kC10Band, fmt("max |log ratio| %.4f", worst)};
}

Outcome c10_rho()
{
    const DistributionProfile d = recover_rho(family::phi(1), 50.0);
    const double x_lo = d.beta(d.q);
    const double x_hi = d.beta(d.q * 1e4);
    double lo = 1e300;
    double hi = -1e300;
    for (double x : num::linspace(x_lo, x_hi, 64)) {
        const double v = d.rho(x) * x / std::exp(x);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo >= kC10RhoLo && hi <= kC10RhoHi,
            fmt2("rho x / e^x in [%.4f, %.4f]", lo, hi) + fmt(" on x up to %.2f", x_hi)};
}

Outcome c11_structural()
{
    bool ok = true;
    std::string detail;
    for (int m : {1, 2, 3}) {
        DiagnosticsOptions opts;
        opts.per_decade = 64;
        const DiagnosticsReport rep = diagnose(family::mu(m), opts);
        double yudo = 1e300;
        for (double v : rep.yudocond.normalized)
            yudo = std::min(yudo, v);
        const bool mok = rep.osgood.divergent && rep.dini_finite && yudo >= kC11Yudo &&
                         rep.lambda_strictly_concave.holds;
        ok = ok && mok;
        detail += "m=" + std::to_string(m) + (rep.osgood.divergent ? " osgood" : " NO-osgood") +
                  (rep.dini_finite ? " dini" : " NO-dini") + fmt(" yudo %.2e", yudo) +
                  (rep.lambda_strictly_concave.holds ? " concave; " : " NOT-concave; ");
    }
    return {ok, detail};
}

Outcome c11_a()
{
    double worst = 0.0;
    std::string detail;
    bool all_certified = true;
    for (int m : {1, 2, 3}) {
        try {
            const double d = std::fabs(1.0 - a_ratio(family::mu(m), 1e-12));
            worst = std::max(worst, d);
            detail += "m=" + std::to_string(m) + fmt(" %.4f; ", d);
        } catch (const Error&) {
            // mu_3 is certified only for r > exp(exp(e)), far below x = 1e-12
            all_certified = false;
            detail += "m=" + std::to_string(m) + " uncertified at 1e-12; ";
        }
    }
    return {all_certified && worst <= kC11A, "|A(1e-12) - 1|: " + detail};
}

}  // namespace

int main()
{
    const std::vector<Criterion> criteria = {
        {"C1a", "bounded vorticity: mu from theta = 1", false, c1_mu},
        {"C1b", "bounded vorticity: flow x^{exp(-2et)}", false, c1_gamma},
        {"C2", "theta from mu = -x log x is constant", false, c2},
        {"C3", "round trip theta_m -> mu -> theta, m = 1, 2", false, c3},
        {"C4", "single-time construction: flow time constant", false, c4},
        {"C5a", "CIG group law", false, c5_group},
        {"C5b", "concavified CIG: concavity, f-bar^2 > f, sandwich", false, c5_concavify},
        {"C6", "transport identity for builtin families", false, c6},
        {"C7", "Biot-Savart battery", false, c7},
        {"C8a", "Holder quotient, bounded case, 10x per decade", true, c8_bounded},
        {"C8b", "Holder quotient, m = 2, alpha = 0.1, t = 0.5", true, c8_m2},
        {"C9", "L^p norm of the m = 2 profile over log p", false, c9},
        {"C10a", "saddle-point recovery of theta_1", false, c10_theta},
        {"C10b", "recovered rho x / e^x in [0.5, 2]", true, c10_rho},
        {"C11a", "diagnostics of mu_m, m = 1..3", false, c11_structural},
        {"C11b", "A(1e-12) within 1e-2 of 1", true, c11_a},
    };
    int unexpected = 0;
    for (const Criterion& c : criteria) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const char* tag = o.pass ? (c.known_unattainable ? "XPASS" : "PASS")
                                 : (c.known_unattainable ? "XFAIL" : "FAIL");
        if (!o.pass && !c.known_unattainable)
            ++unexpected;
        std::printf("%-5s %-5s %s | %s [%.2fs]\n", tag, c.id.c_str(), c.title.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d unexpected failure(s)\n", unexpected);
    return unexpected == 0 ? 0 : 1;
}
