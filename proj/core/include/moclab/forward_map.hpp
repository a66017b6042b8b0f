#pragma once

#include "moclab/moc.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace moclab {

// theta(p) for p >= p0, stored as log theta so that huge and tiny values stay finite.
struct LpProfile {
    Fn log_theta;
    double p0 = 1.0;
    bool vorticity_realizable = false;
    std::string name;

    double theta(double p) const { return std::exp(log_theta(p)); }
    double phi(double p) const { return p * log_theta(p); }
    // alpha(eps) = theta(1/eps) / eps
    double log_alpha(double eps) const { return log_theta(1.0 / eps) - std::log(eps); }
    double alpha(double eps) const { return std::exp(log_alpha(eps)); }
    // Right end of the epsilon range: min(1/2, 1/p0).
    double eps_hi() const { return p0 > 2.0 ? 1.0 / p0 : 0.5; }
};

LpProfile constant_profile(double c = 1.0);

constexpr double kEpsLo = 1e-9;
constexpr int kEpsScan = 256;

// lambda(r) = min over eps of 2 eps r + log alpha(eps), with the minimizer.
struct EpsMin {
    double lambda;
    double eps;
    bool at_upper;
};
EpsMin lambda_from_theta(const LpProfile& profile, double r);

// mu(x) = inf_eps x^{1-2eps} alpha(eps) as a lambda-native Moc with lambda' = 2 eps(r).
// The grid (x values in (0,1)) is scanned once to detect a degenerate profile.
Moc mu_from_theta(const LpProfile& profile, const std::vector<double>& x_grid);

struct EpsilonMap {
    std::vector<double> r;
    std::vector<double> eps;
    double r_lo = 0.0;
    double r_hi = 0.0;
    Fn eps_of_r;  // root of (log alpha)'(eps) = -2r
    Fn eta;       // monotone interpolant of the (eps, r) pairs
};

// Derivative of log alpha by central differences in log eps.
double log_alpha_prime(const LpProfile& profile, double eps);

EpsilonMap epsilon_minimizer(const LpProfile& profile, const std::vector<double>& r_grid);

enum class FlowSource { FromMu, FromGeneratingFunction, ClosedForm };

// Gamma_t(x), also available in log coordinates: R_t(r) = -log Gamma_t(e^{-r}).
struct FlowFamily {
    std::function<double(double, double)> gamma_r;  // (t, r) -> R
    FlowSource source = FlowSource::FromMu;
    Moc mu_ref;

    double gamma(double t, double x) const { return std::exp(-gamma_r(t, -std::log(x))); }
};

// Integrates dr/dt = -e^{lambda(r)} (that is dGamma/dt = mu(Gamma)); t may be negative.
double gamma_r_from_mu(const Moc& mu, double t, double r, const num::OdeOptions& opts = {});
double gamma_from_mu(const Moc& mu, double t, double x);

FlowFamily flow_from_mu(const Moc& mu);

// t such that Gamma_t(x) = y, from the integral of e^{-lambda} over [r_y, r_x].
double flow_time(const Moc& mu, double x, double y);
double flow_time_r(const Moc& mu, double r_x, double r_y);

struct TransportReport {
    double max_space_residual = 0.0;  // |mu(Gamma) - Gamma' mu(x)| / mu(Gamma)
    double max_time_residual = 0.0;   // |d_t Gamma - mu(x) Gamma'| / d_t Gamma
    double worst_t = 0.0;
    double worst_x = 0.0;
    int points = 0;
};

// Gamma' and d_t Gamma come from finite differences of the flow, never from the ODE.
TransportReport verify_transport(const Moc& mu, const FlowFamily& flow,
                                 const std::vector<double>& t_grid,
                                 const std::vector<double>& x_grid);
TransportReport verify_transport_r(const Moc& mu, const FlowFamily& flow,
                                   const std::vector<double>& t_grid,
                                   const std::vector<double>& r_grid);

}  // namespace moclab
