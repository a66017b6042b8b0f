#pragma once

#include "moclab/numerics.hpp"

#include <optional>
#include <vector>

namespace moclab {

// A modulus of continuity mu: [0, domain_hi) -> [0, inf).
//
// Curves live near x = 0, so every Moc also exposes its log-coordinate form
//     lambda(r) = r + log mu(e^{-r}),   r = -log x,
// and either representation may be the native one. A lambda-native Moc can be
// certified on ranges of x far below the smallest positive double.
class Moc {
public:
    Moc() = default;

    static Moc from_function(Fn value, double domain_hi, Fn deriv1 = {}, Fn deriv2 = {},
                             int smoothness_class = 2);
    // lambda is valid for r > r_lo, i.e. x < e^{-r_lo}.
    static Moc from_lambda(Fn lambda, double r_lo, Fn lambda1 = {}, Fn lambda2 = {},
                           int smoothness_class = 2);

    double operator()(double x) const;
    double deriv1(double x) const;
    double deriv2(double x) const;
    bool has_analytic_deriv1() const;
    bool has_analytic_deriv2() const;

    double lambda(double r) const;
    double lambda1(double r) const;
    double lambda2(double r) const;
    // log mu(e^{-r}) = lambda(r) - r
    double log_value_r(double r) const { return lambda(r) - r; }

    double domain_hi() const { return domain_hi_; }
    double r_lo() const { return r_lo_; }
    int smoothness_class() const { return smoothness_; }
    bool lambda_native() const { return lambda_native_; }
    bool valid() const { return static_cast<bool>(value_) || static_cast<bool>(lam_); }

private:
    Fn value_, d1_, d2_;
    Fn lam_, lam1_, lam2_;
    double domain_hi_ = 0.0;
    double r_lo_ = 0.0;
    int smoothness_ = 0;
    bool lambda_native_ = false;
};

// lambda(r) sampled on a grid together with callable forms.
struct LambdaCurve {
    std::vector<double> r;
    std::vector<double> value;
    std::vector<double> deriv1;
    std::vector<double> deriv2;
    bool analytic_deriv1 = false;
    Fn eval;
    Fn d1;
    Fn d2;
};

// A boolean claim together with the grid (in r = -log x) on which it was checked.
struct Certificate {
    bool holds = false;
    std::vector<double> grid;
    double worst_margin = 0.0;
    std::optional<double> witness;
};

struct OsgoodCertificate {
    std::vector<double> shell_start;  // r_k; shell k is [r_k, 2 r_k]
    std::vector<double> shell_integral;
    std::vector<double> partial_sum;
    double lower_bound = 0.0;  // kappa * first shell
    bool divergent = false;
};

struct YudoMargins {
    std::vector<double> r;
    std::vector<double> margin;       // x^2 mu'' - x mu' + mu (raw; may underflow)
    std::vector<double> normalized;   // margin / mu
    std::vector<double> lambda_form;  // lambda'' + lambda'^2
    bool signs_agree = true;
};

struct DiagnosticsReport {
    Certificate is_strictly_increasing;
    Certificate is_concave;
    Certificate is_strongly_strictly_concave;
    Certificate lambda_strictly_concave;
    OsgoodCertificate osgood;
    std::vector<double> dini_r;
    std::vector<double> dini_log_value;  // log S_mu(e^{-r})
    std::vector<double> dini_ratio;      // S_mu / mu
    bool dini_finite = false;
    std::vector<double> a_r;
    std::vector<double> a_curve;
    YudoMargins yudocond;
};

struct DiagnosticsOptions {
    double r_start = 0.0;  // defaults to max(r_lo, 1) plus a small offset
    double decades = 12.0;
    int per_decade = 512;
    int osgood_shells = 20;
    double osgood_kappa = 0.1;
    double concavity_tol = 1e-9;
};

// Integral of dx / mu over [x_lo, x_hi], evaluated as the integral of e^{-lambda} in r.
double osgood_integral(const Moc& mu, double x_lo, double x_hi);
// Same integral with the endpoints given in log coordinates, r_a < r_b.
double osgood_integral_r(const Moc& mu, double r_a, double r_b);

// Shells [r_k, 2 r_k] in r = -log x (each shell squares the inner x); divergence is
// certified when every one of n consecutive shells carries at least kappa times the first.
OsgoodCertificate osgood_shells(const Moc& mu, double r_start, int n_shells, double kappa);

// S_mu(x) = integral_0^x mu(s)/s ds as a new Moc.
Moc dini_transform(const Moc& mu);
// log S_mu(e^{-r}); throws DiniDivergence when partial integrals do not settle.
double dini_log_value_r(const Moc& mu, double r);

LambdaCurve lambda_of(const Moc& mu, const std::vector<double>& r_grid);

double a_ratio(const Moc& mu, double x);
double a_ratio_r(const Moc& mu, double r);

YudoMargins yudocond_margin(const Moc& mu, const std::vector<double>& x_grid);
YudoMargins yudocond_margin_r(const Moc& mu, const std::vector<double>& r_grid);

// Grid uniform in r covering `decades` decades of x, starting at r_start.
std::vector<double> r_grid(double r_start, double decades, int per_decade);

Certificate certify_increasing(const Moc& mu, const std::vector<double>& r);
Certificate certify_concave(const Moc& mu, const std::vector<double>& r, double tol);
Certificate certify_strongly_strictly_concave(const Moc& mu, const std::vector<double>& r);
Certificate certify_lambda_strictly_concave(const Moc& mu, const std::vector<double>& r);

DiagnosticsReport diagnose(const Moc& mu, const DiagnosticsOptions& opts = {});

}  // namespace moclab
