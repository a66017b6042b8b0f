#include "moclab/error.hpp"
#include "moclab/euler_lower_bound.hpp"
#include "moclab/families.hpp"
#include "moclab/vorticity_recovery.hpp"
#include "oracle_values.hpp"

#include <doctest.h>

#include <cmath>

using namespace moclab;

namespace {

PhiProfile linear_phi(double slope)
{
    PhiProfile p;
    p.phi = [slope](double x) { return slope * x; };
    p.phi1 = [slope](double) { return slope; };
    p.phi2 = [](double) { return 0.0; };
    p.phi3 = [](double) { return 0.0; };
    return p;
}

}  // namespace

TEST_CASE("recover_rho for theta_1: beta ~ log p and rho ~ e^x / x")
{
    const DistributionProfile d = recover_rho(family::phi(1), 50.0);
    for (double p : {1e2, 1e3, 1e4}) {
        const double ratio = d.beta(p) / std::log(p);
        CHECK(ratio > 1.0);
        CHECK(ratio < std::exp(1.0 / std::log(p)) * (1.0 + 1e-12));
    }
    double lo = INFINITY, hi = 0.0;
    for (double x : num::linspace(d.beta(100.0), d.beta(1e5), 32)) {
        const double v = d.rho(x) * x / std::exp(x);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(hi / lo < 1.2);
}

TEST_CASE("recover_rho: composite derivative d/dp rho(beta(p)) = p phi''")
{
    const PhiProfile ph = family::phi(1);
    const DistributionProfile d = recover_rho(ph, 50.0);
    auto comp = [&d](double p) { return d.rho(d.beta(p)); };
    for (double p : {80.0, 300.0, 2000.0}) {
        const double fd = num::d1(comp, p, 1e-3 * p);
        CHECK(fd == doctest::Approx(p * ph.d2(p)).epsilon(1e-5));
    }
}

TEST_CASE("recover_rho errors")
{
    try {
        recover_rho(linear_phi(std::log(3.0)), 50.0);
        FAIL("expected DegenerateBeta");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegenerateBeta);
    }
    PhiProfile fast;
    fast.phi = [](double p) { return 2.0 * p * std::log(p); };
    fast.phi1 = [](double p) { return 2.0 * (std::log(p) + 1.0); };
    fast.phi2 = [](double p) { return 2.0 / p; };
    try {
        recover_rho(fast, 50.0);
        FAIL("expected ConditionOneFailed");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ConditionOneFailed);
    }
}

TEST_CASE("rho is increasing and convex")
{
    const DistributionProfile d = recover_rho(family::phi(2), 50.0);
    const auto xs = num::linspace(0.5, d.beta(5e3), 60);
    for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
        const double a = d.rho(xs[i - 1]);
        const double b = d.rho(xs[i]);
        const double c = d.rho(xs[i + 1]);
        CHECK(b > a);
        CHECK(a + c - 2.0 * b >= -1e-9 * std::fabs(b));
    }
}

TEST_CASE("mellin_forward: indicator distribution gives theta = 1")
{
    const DistributionProfile d = indicator_distribution(1.0);
    for (double p : {1.0, 7.0, 100.0})
        CHECK(std::fabs(mellin_forward(d, p).log_theta) < 1e-10);
    const DistributionProfile d2 = indicator_distribution(3.0);
    CHECK(mellin_forward(d2, 5.0).log_theta == doctest::Approx(std::log(3.0)).epsilon(1e-10));
}

TEST_CASE("mellin_forward on the recovered theta_1 profile")
{
    const DistributionProfile d = recover_rho(family::phi(1), 50.0);
    CHECK(mellin_forward(d, 100.0).log_theta == doctest::Approx(oracle::kRecoveredLogTheta1_p100).epsilon(1e-9));
    CHECK(mellin_forward(d, 500.0).log_theta == doctest::Approx(oracle::kRecoveredLogTheta1_p500).epsilon(1e-9));
    for (double p : num::log_grid(50.0, 500.0, 4)) {
        const double r = std::exp(mellin_forward(d, p).log_theta) / std::log(p);
        CHECK(r > 0.5);
        CHECK(r < 2.0);
    }
    for (int m : {1, 2}) {
        const DistributionProfile dm = recover_rho(family::phi(m), 50.0);
        for (double p : {100.0, 1000.0})
            CHECK(std::fabs(mellin_forward(dm, p).log_theta - family::log_theta(m, p)) < std::log(2.0) + 0.1);
    }
}

TEST_CASE("Laplace approximation agrees with quadrature at p = 200")
{
    const DistributionProfile d = recover_rho(family::phi(1), 50.0);
    const double full = mellin_forward(d, 200.0).log_theta;
    const LaplaceResult lap = laplace_theta(d, 200.0);
    CHECK(std::fabs(std::expm1(lap.log_theta - full)) < 0.1);
    // the saddle x_p = beta(p - 1) sits next to beta(p) on the tail
    for (double p : {500.0, 2000.0}) {
        const LaplaceResult l = laplace_theta(d, p);
        CHECK(std::fabs(l.x_p / d.beta(p) - 1.0) < 1e-3);
    }
}

TEST_CASE("check_conditions")
{
    const auto ps = num::log_grid(50.0, 1e4, 8);
    for (int m : {1, 2, 3}) {
        const PhiProfile ph = family::phi(m);
        // theta_3 only settles into its asymptotic shape above p_min = exp(exp(e))
        const auto grid = m == 3 ? num::log_grid(ph.p_min, 1e3 * ph.p_min, 8) : ps;
        const ConditionsReport rep = check_conditions(ph, grid);
        CHECK(rep.convex);
        CHECK(rep.condition1);
        CHECK(rep.condition2);
        CHECK(rep.margin1.size() == grid.size());
    }
    CHECK_FALSE(check_conditions(family::phi(3), ps).condition2);
    PhiProfile plogp;
    plogp.phi = [](double p) { return p * std::log(p); };
    const ConditionsReport fast = check_conditions(plogp, ps);
    CHECK(fast.margin1_rel.size() == ps.size());
    CHECK_FALSE(fast.condition1);
    REQUIRE(fast.first_failure1.has_value());
    const ConditionsReport lin = check_conditions(linear_phi(1.0), ps);
    CHECK(lin.condition1);
    CHECK_FALSE(lin.convex);
}

TEST_CASE("profile_to_square_symmetric: indicator gives a constant patch")
{
    const SquareSymmetricVorticity w = profile_to_square_symmetric(indicator_distribution(1.0));
    CHECK(w.r_max == doctest::Approx(0.5));
    CHECK(w.axis(0.1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(w.axis(0.49) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(w.axis(0.6) == 0.0);
}

TEST_CASE("profile_to_square_symmetric: rho = e^y / y")
{
    DistributionProfile d;
    d.rho = [](double y) { return y <= 1.0 ? M_E : std::exp(y) / y; };
    const SquareSymmetricVorticity w = profile_to_square_symmetric(d);
    // omega0 = f log(2 log(1/x)) with f above 1 and falling toward it
    double prev = INFINITY;
    for (double u : {10.0, 100.0, 1e4, 1e8}) {
        const double f = std::exp(w.log_axis_u(u)) / std::log(2.0 * u);
        CHECK(f > 1.0);
        CHECK(f < 2.0);
        CHECK(f < prev);
        prev = f;
    }
    DistributionProfile bad;
    bad.rho = [](double y) { return 5.0 - y; };
    const SquareSymmetricVorticity wb = profile_to_square_symmetric(bad);
    CHECK_THROWS_AS(wb.axis(1e-3), Error);
}

TEST_CASE("recovered profile round trip through the L^p norm")
{
    const DistributionProfile d = recover_rho(family::phi(1), 50.0);
    const SquareSymmetricVorticity w = profile_to_square_symmetric(d);
    const LpNormResult n = lp_norm(w, 100.0);
    CHECK(std::fabs(n.log_norm - std::log(std::log(100.0))) < std::log(2.0));
}
