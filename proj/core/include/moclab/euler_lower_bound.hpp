#pragma once

#include "moclab/forward_map.hpp"
#include "moclab/numerics.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace moclab {

// Square-symmetric vorticity: on Q1 the value at y is axis(max(y1, y2)).
struct SquareSymmetricVorticity {
    Fn axis_profile;  // omega0(s, 0) for 0 < s <= r_max, nonincreasing
    double r_max = std::numeric_limits<double>::infinity();
    Fn log_axis_u;    // optional: u -> log omega0(e^{-u}), for profiles far below double range
    Fn alpha_s;       // optional layer density: omega0(x) = 2 pi * integral_x^{r_max} alpha
    std::vector<double> breaks;  // kinks or jumps of the axis profile inside (0, r_max)
    std::string name;

    double axis(double s) const { return s > 0 && s <= r_max ? axis_profile(s) : 0.0; }
    double value(double y1, double y2) const { return axis(std::max(std::fabs(y1), std::fabs(y2))); }
};

SquareSymmetricVorticity zero_vorticity();
// height * 1_{[0,r]^2} on Q1.
SquareSymmetricVorticity indicator_square(double r, double height = 2.0 * M_PI);
// omega0 = height everywhere (infinite support; only meaningful for the lower-bound rate).
SquareSymmetricVorticity constant_axis(double height = 1.0);
// omega0(x) = log^2(1/x) ... log^m(1/x) on (0, 1/exp^m(0)), m >= 2.
SquareSymmetricVorticity log_singular(int m);
// omega0(x) = 2 pi * integral_x^{r_max} alpha(s) ds.
SquareSymmetricVorticity layered(Fn alpha, double r_max);
// a * w1 + b * w2
SquareSymmetricVorticity combine(double a, const SquareSymmetricVorticity& w1, double b,
                                 const SquareSymmetricVorticity& w2);

// Kernel pieces of the axis velocity: f1 - f2 on Q1.
double kernel_f1(double x1, double y1, double y2);
double kernel_f2(double x1, double y1, double y2);

struct BiotSavartOptions {
    double rel_tol = 1e-9;
    int max_cells = 200000;
};

struct BiotSavartResult {
    double value = 0.0;
    double error = 0.0;
    int cells = 0;
};

// v1(x1, 0) = (1/pi) * double integral over Q1 of (f1 - f2) omega, by global adaptive
// tensor Gauss-Legendre cubature on a mesh graded toward (x1, 0).
BiotSavartResult biot_savart_axis(const SquareSymmetricVorticity& w, double x1,
                                  const BiotSavartOptions& opts = {});

// Same velocity with the integral over each square shell done in closed form,
// leaving a 1D adaptive quadrature in the shell radius.
double biot_savart_axis_shells(const SquareSymmetricVorticity& w, double x1);

// omega = 2 pi 1_{[0,r]^2}: v1 = -4 x log x + phi_r(x) + psi_r(x).
double square_patch_phi(double r, double x1);
double square_patch_psi(double r, double x1);
double square_patch_velocity_exact(double r, double x1);

// |v^r(x1) - r v^1(x1/r)| / v^1(x1/r) with both fields from biot_savart_axis.
double scaling_check(double r, double x1, const BiotSavartOptions& opts = {});

struct LowerBoundConfig {
    double lambda = 0.5;
    double c_lambda = 0.5 / M_PI;
    double neighborhood_hi = 1e-2;
    double t_max = 1.0;
};

LowerBoundConfig make_lower_bound_config(double lambda = 0.5, double neighborhood_hi = 1e-2,
                                         double t_max = 1.0);

// L(t, x1). With a flow: C omega0(Gamma_t(2^{lambda/2} x1^lambda)) x1 log(1/x1).
// Without (static, t = 0): C omega0(x1^lambda) x1 log(1/x1).
double lower_bound_velocity(const SquareSymmetricVorticity& w, const LowerBoundConfig& cfg,
                            const FlowFamily* gamma, double t, double x1);

using RateFn = std::function<double(double, double)>;  // (t, x1) -> dx1/dt

enum class LowerBoundSource { Ode, ClosedForm };

struct FlowLowerBound {
    std::vector<double> t;
    std::vector<double> x;      // x1(t)
    std::vector<double> log_x;  // log x1(t), exact even when x1 underflows
    double a = 0.0;
    LowerBoundSource source = LowerBoundSource::Ode;
    bool left_neighborhood = false;
    double t_exit = std::numeric_limits<double>::infinity();
};

// dx1/dt = L(t, x1), x1(0) = a, integrated in u = -log x1.
FlowLowerBound propagate_lower_bound(const SquareSymmetricVorticity& w, const LowerBoundConfig& cfg,
                                     const FlowFamily* gamma, double a,
                                     const std::vector<double>& t_grid);
// Same with an explicit rate; the rate may be given in u = -log x1 as du/dt for range safety.
FlowLowerBound propagate_rate(const RateFn& rate, const LowerBoundConfig& cfg, double a,
                              const std::vector<double>& t_grid);
FlowLowerBound propagate_rate_u(const RateFn& du_dt, const LowerBoundConfig& cfg, double a,
                                const std::vector<double>& t_grid);

// Reduced rate for the m = 2 profile: K e^{-C t} x theta_2(1/x), as du/dt in u = -log x.
RateFn m2_reduced_rate_u(double K, double C = 1.0);
// x1(t) = exp(-(-log a)^gamma), gamma = exp(K (e^{-C t} - 1) / C); returns log x1.
double m2_closed_form_log(double K, double C, double a, double t);
// Bounded case: x1(t) = a^{exp(-C t)}; returns log x1.
double bounded_closed_form_log(double c_lambda, double a, double t);

struct HolderReport {
    std::vector<double> a;
    std::vector<double> log10_quotient;
    std::vector<double> growth_per_decade;  // decades of quotient per decade of a
    bool diverging = false;
};

// Quotients x1(t; a) / a^alpha; diverging when each step of the decreasing a-sequence
// gains at least a factor 10 per decade of a over at least 4 decades.
using TrajectoryFn = std::function<double(double, double)>;  // (a, t) -> log x1(t; a)
HolderReport holder_quotient(const TrajectoryFn& log_x1, double t, double alpha,
                             const std::vector<double>& a_seq);

struct LpNormResult {
    double log_norm = 0.0;
    double norm = 0.0;
    double ratio = 0.0;  // norm / theta_{m-1}(p) for the singular profile
};

// ||omega||_p over the plane, 8 * integral of s omega0(s)^p ds in u = -log s.
LpNormResult lp_norm(const SquareSymmetricVorticity& w, double p);
LpNormResult lp_norm_singular(int m, double p);

}  // namespace moclab
