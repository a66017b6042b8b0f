#include "moclab/families.hpp"

#include "moclab/error.hpp"

#include <array>
#include <cmath>
#include <string>

namespace moclab::family {

namespace {

void check_m(int m)
{
    if (m < 0 || m > 6)
        throw Error(ErrorKind::DomainExceeded, "family index m must be in [0, 6]");
}

// Products P_k = L_1 ... L_k with L_1 = r, L_k = log L_{k-1}; returns
// sum log L_k, sum 1/P_k, and -sum_k (1/P_k) sum_{j<=k} 1/P_j.
struct IterSums {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

IterSums iter_sums(int m, double r)
{
    IterSums s;
    double L = r;
    double P = 1.0;
    double inner = 0.0;
    for (int k = 1; k <= m; ++k) {
        if (k > 1)
            L = std::log(L);
        if (!(L > 0))
            throw Error(ErrorKind::DomainExceeded, "iterated log not positive");
        P *= L;
        s.value += std::log(L);
        inner += 1.0 / P;
        s.d1 += 1.0 / P;
        s.d2 -= inner / P;
    }
    return s;
}

void check_r(int m, double r)
{
    const double lo = threshold_r(m);
    if (r < lo * (1.0 - 1e-3))
        throw Error(ErrorKind::DomainExceeded, "r = " + std::to_string(r) + " below exp^" +
                                                   std::to_string(m) + "(1) = " + std::to_string(lo));
}

}  // namespace

double iterated_exp(int m, double x)
{
    for (int k = 0; k < m; ++k)
        x = std::exp(x);
    return x;
}

double iterated_log(int m, double x)
{
    for (int k = 0; k < m; ++k) {
        if (!(x > 0))
            throw Error(ErrorKind::DomainExceeded, "log of a non-positive value");
        x = std::log(x);
    }
    return x;
}

double threshold_r(int m)
{
    return iterated_exp(m, 1.0);
}

double log_theta(int m, double p)
{
    check_m(m);
    if (m == 0)
        return 0.0;
    return iter_sums(m, std::log(p)).value;
}

LpProfile theta(int m)
{
    check_m(m);
    LpProfile prof;
    prof.log_theta = [m](double p) { return log_theta(m, p); };
    // every factor is at least 1 from here on
    prof.p0 = m >= 2 ? iterated_exp(m - 1, std::exp(1.0)) : 1.0;
    prof.vorticity_realizable = true;
    prof.name = "yudovich-m=" + std::to_string(m);
    return prof;
}

PhiProfile phi(int m)
{
    check_m(m);
    // ell = log theta_m(p); with l_0 = p the sums have the same shape as lambda_m.
    auto ell = [m](double p) {
        IterSums s = iter_sums(m + 1, p);
        s.value -= std::log(p);
        // iter_sums counts L_1 = p as the first factor; strip its contributions.
        const double inv_p = 1.0 / p;
        s.d1 -= inv_p;
        s.d2 += inv_p * inv_p;
        return s;
    };
    PhiProfile out;
    out.p_min = m >= 2 ? iterated_exp(m - 1, std::exp(1.0)) : 2.0;
    out.phi = [m, ell](double p) { return m == 0 ? 0.0 : p * ell(p).value; };
    out.phi1 = [m, ell](double p) {
        if (m == 0)
            return 0.0;
        const IterSums s = ell(p);
        return s.value + p * s.d1;
    };
    out.phi2 = [m, ell](double p) {
        if (m == 0)
            return 0.0;
        const IterSums s = ell(p);
        return 2.0 * s.d1 + p * s.d2;
    };
    return out;
}

Moc mu(int m)
{
    check_m(m);
    auto lam = [m](double r) {
        check_r(m, r);
        return iter_sums(m, r).value;
    };
    auto lam1 = [m](double r) {
        check_r(m, r);
        return iter_sums(m, r).d1;
    };
    auto lam2 = [m](double r) {
        check_r(m, r);
        return iter_sums(m, r).d2;
    };
    return Moc::from_lambda(lam, threshold_r(m), lam1, lam2, 100);
}

GeneratingFunction h(int m)
{
    check_m(m);
    GeneratingFunction out;
    out.H = [m](double s) { return iterated_exp(m, -s); };
    out.Hinv = [m](double r) { return -iterated_log(m, r); };
    out.g = [m](double s) {
        const double r = iterated_exp(m, -s);
        return iter_sums(m, r).value - r;
    };
    out.s_hi = -1.0;
    out.anchor_x = std::exp(-threshold_r(m + 1));
    out.anchor_s = -1.0;
    return out;
}

FlowFamily flow(int m)
{
    FlowFamily f = flow_from_generating(h(m));
    f.source = FlowSource::ClosedForm;
    f.mu_ref = mu(m);
    return f;
}

AcceptableMoc f_time(int m, double t)
{
    check_m(m);
    auto F = [m, t](double r) { return iterated_exp(m, -t + iterated_log(m, r)); };
    auto Finv = [m, t](double r) { return iterated_exp(m, t + iterated_log(m, r)); };
    auto Fp = [m, t](double r) {
        // (exp^m)'(y) (log^m)'(r), y = log^m(r) - t
        double logs = 1.0;
        double v = r;
        for (int k = 0; k < m; ++k) {
            logs *= v;
            v = std::log(v);
        }
        double exps = 1.0;
        double y = v - t;
        for (int k = 0; k < m; ++k) {
            y = std::exp(y);
            exps *= y;
        }
        return exps / logs;
    };
    // m = 1 is linear in r everywhere; f' > 1 exactly for x < exp(-t / (1 - e^{-t}))
    const double J = m == 1 && t > 0 ? std::exp(t / std::expm1(-t)) : std::exp(-threshold_r(m));
    return acceptable_from_r(F, Fp, Finv, J);
}

}  // namespace moclab::family

namespace moclab {

FamilyCurve builtin_family(int m, FamilyKind kind)
{
    switch (kind) {
    case FamilyKind::Theta:
        return family::theta(m);
    case FamilyKind::Mu:
        return family::mu(m);
    case FamilyKind::H:
        return family::h(m);
    case FamilyKind::Flow:
        return family::flow(m);
    }
    throw Error(ErrorKind::ConfigError, "unknown family kind");
}

}  // namespace moclab
