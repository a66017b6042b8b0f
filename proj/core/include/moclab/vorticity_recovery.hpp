#pragma once

#include "moclab/numerics.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace moclab {

struct SquareSymmetricVorticity;

// phi(p) = p log theta(p) with derivatives; missing derivatives are differenced.
struct PhiProfile {
    Fn phi;
    Fn phi1;
    Fn phi2;
    Fn phi3;
    double p_min = 1.0;

    double d1(double p) const;
    double d2(double p) const;
    // Third derivative: differenced phi'' with relative step 1e-3 and one Richardson step.
    double d3(double p) const;
};

// Build phi from log theta alone (all derivatives by differences).
PhiProfile phi_from_log_theta(Fn log_theta, double p_min);

// lambda_dist = e^{-rho}. For recovered profiles rho is defined through
// beta(p) = e^{phi'(p)} and rho(beta(p)) = rho_q + [p phi' - phi]_q^p; below beta(q)
// rho continues along its tangent.
struct DistributionProfile {
    Fn rho;
    Fn rho1;              // rho'(x), optional
    Fn beta;              // optional: p -> beta(p)
    Fn log_beta_inverse;  // optional: x -> p with beta(p) = x, as a function of log x
    double q = 0.0;
    double rho_q = 0.0;
    double cq = 0.0;  // rho_q - (q phi'(q) - phi(q))
    double x_max = std::numeric_limits<double>::infinity();  // lambda_dist = 0 beyond
    PhiProfile phi;

    double lambda_dist(double x) const { return std::exp(-rho(x)); }
};

DistributionProfile indicator_distribution(double height = 1.0);

struct RecoverOptions {
    double scan_hi_factor = 1e4;  // curvature margin scanned on [q, q * factor]
    int scan_per_decade = 32;
};

DistributionProfile recover_rho(const PhiProfile& phi, double q = 50.0,
                                std::optional<double> rho_q = std::nullopt,
                                const RecoverOptions& opts = {});

struct MellinResult {
    double log_theta = 0.0;
    double log_integral = 0.0;  // log of the integral of x^{p-1} e^{-rho} dx
    double u_peak = 0.0;
    double window = 0.0;
};

// theta(p) = (p integral_0^inf x^{p-1} e^{-rho(x)} dx)^{1/p}, evaluated in u = log x.
MellinResult mellin_forward(const DistributionProfile& dist, double p);

// Gaussian approximation around x_p, the root of rho'(x) = (p - 1)/x.
struct LaplaceResult {
    double log_theta = 0.0;
    double x_p = 0.0;
    double dx_p = 0.0;
};
LaplaceResult laplace_theta(const DistributionProfile& dist, double p);

struct ConditionsReport {
    std::vector<double> p;
    std::vector<double> margin1;       // 1/p - phi''
    std::vector<double> margin1_rel;   // 1 - p phi''
    std::vector<double> q1;            // p phi''' / phi'' e^{-phi'}
    std::vector<double> q2;            // phi''' / phi''^2 e^{-phi'}
    std::vector<double> xp_ratio;      // beta''/beta' = phi'' + phi'''/phi''
    bool convex = false;
    bool condition1 = false;
    bool condition2 = false;
    std::optional<double> first_failure1;
    std::optional<double> first_failure2;
    double delta = 0.1;
};

// condition1: 1 - p phi'' >= delta on the grid (curvature margin).
// condition2: |q1| and |q2| nonincreasing along the grid.
ConditionsReport check_conditions(const PhiProfile& phi, const std::vector<double>& p_grid,
                                  double delta = 0.1);

// omega0(s) = sup{y : lambda_dist(y) > 4 s^2}: level sets of a square-symmetric
// field are squares of side 2s.
SquareSymmetricVorticity profile_to_square_symmetric(const DistributionProfile& dist);

}  // namespace moclab
