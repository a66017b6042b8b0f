#pragma once

#include "moclab/forward_map.hpp"
#include "moclab/moc.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

namespace moclab {

// h: R -> (0, inf) strictly increasing, held through H(s) = -log h(s) so that
// h far below the smallest double stays representable.
struct GeneratingFunction {
    Fn H;     // s -> -log h(s), strictly decreasing
    Fn Hinv;  // r -> h^{-1}(e^{-r})
    Fn g;     // log h'(s)
    double s_hi = 0.0;  // certified range is s < s_hi
    double anchor_x = 0.0;
    double anchor_s = 0.0;

    double h(double s) const { return std::exp(-H(s)); }
    double h_inv(double x) const { return Hinv(-std::log(x)); }
    // mu = h' o h^{-1} in log coordinates: lambda(r) = r + g(Hinv(r))
    double lambda(double r) const { return r + g(Hinv(r)); }
};

// f^t(x) = h(t + h^{-1}(x)).
double cig_from_generating(const GeneratingFunction& h, double t, double x);
double cig_r(const GeneratingFunction& h, double t, double r);

FlowFamily flow_from_generating(const GeneratingFunction& h);

// h^{-1}(x) = b0 + integral from a0 to x of ds / mu(s).
GeneratingFunction generating_from_mu(const Moc& mu, double a0, double b0);

// Moc of the iteration group generated by h, i.e. h' o h^{-1}.
Moc mu_from_generating(const GeneratingFunction& h);

// f with f(x) > x and f' > 1 on (0, J). The log-coordinate form
// F(r) = -log f(e^{-r}) is optional; it is derived from f when absent.
struct AcceptableMoc {
    Fn f;
    Fn fprime;
    Fn F;
    Fn Fprime;
    Fn Finv;
    double J = std::numeric_limits<double>::infinity();

    double F_of(double r) const;
    double Fprime_of(double r) const;
    double Finv_of(double r) const;
    // log f'(e^{-r})
    double log_fprime_r(double r) const;
};

AcceptableMoc acceptable_from_x(Fn f, Fn fprime, double J = std::numeric_limits<double>::infinity());
AcceptableMoc acceptable_from_r(Fn F, Fn Fprime, Fn Finv,
                                double J = std::numeric_limits<double>::infinity());

struct SingleTimeOptions {
    bool c1_match = false;
    int max_bisections = 50;
};

struct SingleTimeResult {
    Moc mu;
    double a = 0.0;
    double fa = 0.0;
    double mu_a = 0.0;
    double shape = 0.0;      // seed shape parameter s
    double seed_integral = 0.0;
    int bisections = 0;
    std::pair<double, double> mu_a_bounds;
};

// Builds mu with integral from x to f(x) of ds / mu(s) = t0 for every x > 0.
SingleTimeResult mu_from_gamma_single_time(const AcceptableMoc& f, double t0, double a,
                                           std::optional<double> mu_a = std::nullopt,
                                           const SingleTimeOptions& opts = {});

struct ConcaveCig {
    GeneratingFunction hbar;   // h-bar with log h-bar' = g-bar
    Moc mu;                    // 2 mu-bar, the Moc of j^t = f-bar^{2t}
    double r_cert = 0.0;       // olf2 and the sandwich are certified for r > r_cert
    double s_lo = 0.0;         // scan range used for the prerequisites
    double s_top = 0.0;
    double worst_g_ineq = 0.0;   // min of g(s) - g(s-1)
    double worst_gp_ineq = 0.0;  // max of g'(s) - g'(s-1)
};

struct ConcavifyOptions {
    double s_span = 12.0;  // prerequisites scanned on [s_hi - 1 - s_span, s_hi - 1]
    int scan_points = 400;
};

ConcaveCig concavify_cig(const GeneratingFunction& h, const ConcavifyOptions& opts = {});

// j(x) = f-bar^2(x) in log coordinates.
double concave_cig_j_r(const ConcaveCig& c, double r);

struct ThetaFromMu {
    LpProfile profile;
    std::vector<double> p;
    std::vector<double> log_theta;
    std::vector<double> eta;  // r = eta(1/p)
};

// alpha(eps) = exp(lambda(eta) - 2 eta eps) with eta the inverse of eps(r) = lambda'(r)/2.
ThetaFromMu theta_from_mu(const Moc& mu, const std::vector<double>& p_grid);

// log alpha(eps) built from an arbitrary guess eta for the inverse.
double log_alpha_with_eta(const Moc& mu, const Fn& eta, double eps);

// f*(x) = sup_eps (x eps - f(eps)) over samples, refined by Brent on a monotone interpolant.
double legendre_transform(const std::vector<double>& eps, const std::vector<double>& f, double x);
// Same for a callable f on [lo, hi] sampled at n points.
double legendre_transform(const Fn& f, double lo, double hi, double x, int n = 512);

// log alpha(x) = sup_r (lambda(r) - 2 x r), computed on [r_lo, r_hi].
double log_alpha_legendre(const Moc& mu, double x, double r_lo, double r_hi);

}  // namespace moclab
