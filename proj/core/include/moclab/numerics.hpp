#pragma once

#include <functional>
#include <vector>

namespace moclab {

using Fn = std::function<double(double)>;

namespace num {

// Adaptive Gauss-Kronrod quadrature on [a, b]. b may be +infinity.
// Throws QuadratureNonconvergent when the error estimate stays above
// rel_tol * L1 after max_depth bisections.
double integrate(const Fn& f, double a, double b, double rel_tol = 1e-12, int max_depth = 25);

// Same as integrate() but never throws; returns the estimate and its error bound.
struct QuadEstimate {
    double value;
    double error;
    double l1;
};
QuadEstimate integrate_estimate(const Fn& f, double a, double b, double rel_tol = 1e-12,
                                int max_depth = 25);

// Sum of integrals over consecutive knots; the tolerance applies to the total, so
// pieces carrying negligible mass do not need to converge on their own.
double integrate_pieces(const Fn& f, const std::vector<double>& knots, double rel_tol = 1e-12,
                        int max_depth = 25);

// Double-exponential (tanh-sinh) quadrature for integrable endpoint singularities.
double integrate_endpoint_singular(const Fn& f, double a, double b, double rel_tol = 1e-12);

// Root of f on [lo, hi]; f(lo) and f(hi) must have opposite signs.
double find_root(const Fn& f, double lo, double hi, double rel_tol = 4e-16, int max_iter = 200);

// Plain bisection with a capped iteration count.
struct BisectResult {
    double x;
    int iterations;
};
BisectResult bisect(const Fn& f, double lo, double hi, double x_tol, int max_iter);

struct Minimum {
    double x;
    double value;
    bool at_lower;
    bool at_upper;
};

// Scan n points of [lo, hi] (log-spaced when log_spaced, lo > 0), then refine
// the best bracket with a Brent (golden-section + parabolic) search.
Minimum minimize_scan(const Fn& g, double lo, double hi, int n_scan, bool log_spaced);

// Brent refinement on a given bracket.
Minimum minimize_bracket(const Fn& g, double lo, double hi);

// Central first derivative with one Richardson step.
double d1(const Fn& f, double x, double h);
// Five-point second derivative.
double d2(const Fn& f, double x, double h);

// Relative step rule used throughout: h = |x| * rel, floored at rel.
double rel_step(double x, double rel = 1e-4);

std::vector<double> linspace(double lo, double hi, int n);
// Log-spaced grid from lo to hi inclusive with ppd points per decade.
std::vector<double> log_grid(double lo, double hi, int per_decade);

double log_add_exp(double a, double b);

// Normalized second differences of v(x) = e^{lambda(r) - r} on a grid given in
// log coordinates r = -log x (strictly monotone). Only differences of r and of
// lambda enter, so huge r stay accurate. Entry i (interior) is (chord - v_i)/v_i
// with the chord interpolating the neighbours linearly in x; concave data
// yields entries <= 0.
std::vector<double> relative_second_differences(const std::vector<double>& r,
                                                const std::vector<double>& lambda);

// Scalar ODE y' = rhs(t, y) with an embedded Dormand-Prince 5(4) pair.
using OdeRhs = std::function<double(double, double)>;
// Called on every accepted step; returning false aborts with the step's state.
using OdeGuard = std::function<bool(double, double)>;

struct OdeOptions {
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;
    double first_step = 1e-4;
};

struct OdeResult {
    double t;
    double y;
    bool aborted;
    long steps;
};

OdeResult solve_ode(const OdeRhs& rhs, double y0, double t0, double t1, const OdeOptions& opts,
                    const OdeGuard& guard = {});

// Values at increasing (or decreasing) output times starting from times.front().
std::vector<double> solve_ode_at(const OdeRhs& rhs, double y0, const std::vector<double>& times,
                                 const OdeOptions& opts, const OdeGuard& guard = {});

}  // namespace num
}  // namespace moclab
