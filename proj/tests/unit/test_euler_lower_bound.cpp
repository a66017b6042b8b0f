#include "moclab/error.hpp"
#include "moclab/euler_lower_bound.hpp"
#include "moclab/families.hpp"
#include "oracle_values.hpp"

#include <doctest.h>

#include <cmath>

using namespace moclab;

namespace {

FlowFamily bounded_flow()
{
    FlowFamily f;
    f.gamma_r = [](double t, double r) { return r * std::exp(-2.0 * M_E * t); };
    return f;
}

}  // namespace

TEST_CASE("kernel: f1 > f2 on the quadrant")
{
    for (double x : {1e-3, 0.1, 0.7})
        for (double y1 : {1e-4, 0.05, 0.5, 2.0})
            for (double y2 : {1e-3, 0.3, 3.0})
                CHECK(kernel_f1(x, y1, y2) > kernel_f2(x, y1, y2));
}

TEST_CASE("square patch: exact decomposition against the oracle")
{
    CHECK(square_patch_velocity_exact(1.0, 1e-3) == doctest::Approx(oracle::kSquarePatchV_x1em3).epsilon(1e-10));
    CHECK(square_patch_velocity_exact(1.0, 1e-4) == doctest::Approx(oracle::kSquarePatchV_x1em4).epsilon(1e-10));
    CHECK(square_patch_velocity_exact(1.0, 1e-5) == doctest::Approx(oracle::kSquarePatchV_x1em5).epsilon(1e-10));
    CHECK(square_patch_velocity_exact(1.0, 0.25) == doctest::Approx(oracle::kSquarePatchV_x0p25).epsilon(1e-10));
    CHECK(square_patch_velocity_exact(0.5, 1e-3) == doctest::Approx(oracle::kSquarePatchV_r0p5_x1em3).epsilon(1e-10));
    const double x = 1e-3;
    CHECK(square_patch_velocity_exact(1.0, x) ==
          doctest::Approx(-4.0 * x * std::log(x) + square_patch_phi(1.0, x) + square_patch_psi(1.0, x)));
}

TEST_CASE("biot_savart_axis: square patch")
{
    const SquareSymmetricVorticity w = indicator_square(1.0);
    for (double x : {1e-3, 1e-4, 1e-5}) {
        const BiotSavartResult r = biot_savart_axis(w, x);
        CHECK(r.value >= 2.0 * x * std::log(1.0 / x));
        CHECK(r.value == doctest::Approx(square_patch_velocity_exact(1.0, x)).epsilon(1e-4));
        CHECK(biot_savart_axis_shells(w, x) == doctest::Approx(r.value).epsilon(1e-6));
    }
    CHECK(2e-3 * std::log(1e3) == doctest::Approx(0.01382).epsilon(1e-3));
    CHECK(biot_savart_axis(zero_vorticity(), 1e-3).value == 0.0);
}

TEST_CASE("biot_savart_axis: linearity and nonnegativity")
{
    const SquareSymmetricVorticity a = indicator_square(0.5, 1.0);
    const SquareSymmetricVorticity b = indicator_square(0.2, 1.0);
    const SquareSymmetricVorticity c = combine(2.0, a, 3.0, b);
    for (double x : {1e-3, 0.05, 0.3}) {
        const double va = biot_savart_axis(a, x).value;
        const double vb = biot_savart_axis(b, x).value;
        CHECK(va >= 0.0);
        CHECK(vb >= 0.0);
        CHECK(biot_savart_axis(c, x).value == doctest::Approx(2.0 * va + 3.0 * vb).epsilon(1e-7));
    }
}

TEST_CASE("scaling_check")
{
    CHECK(scaling_check(1.0, 1e-3) < 1e-12);
    CHECK(scaling_check(0.1, 1e-3) <= 1e-4);
    // x^lambda <= r with lambda = 1/2
    const double x = 1e-4;
    const double v = biot_savart_axis(indicator_square(1e-2), x).value;
    CHECK(v >= 2.0 * 0.5 * x * std::log(1.0 / x));
}

TEST_CASE("static bound for a layered profile")
{
    const SquareSymmetricVorticity w = layered([](double s) { return 1.0 / std::sqrt(s); }, 0.25);
    const LowerBoundConfig cfg = make_lower_bound_config();
    for (double x : {1e-3, 1e-4}) {
        const double v = biot_savart_axis(w, x).value;
        CHECK(v >= lower_bound_velocity(w, cfg, nullptr, 0.0, x));
    }
}

TEST_CASE("lower_bound_velocity")
{
    const LowerBoundConfig cfg = make_lower_bound_config(0.5);
    CHECK(cfg.c_lambda == 0.5 / M_PI);
    CHECK(lower_bound_velocity(constant_axis(1.0), cfg, nullptr, 0.0, 1e-4) ==
          doctest::Approx(1.4659e-4).epsilon(1e-4));
    // x^lambda = 1e-2 misses a support of radius 1e-3
    CHECK(lower_bound_velocity(indicator_square(1e-3, 1.0), cfg, nullptr, 0.0, 1e-4) == 0.0);
    const FlowFamily g = bounded_flow();
    const SquareSymmetricVorticity half = indicator_square(0.5, 1.0);
    const double x = 1e-6;
    CHECK(lower_bound_velocity(half, cfg, &g, 0.1, x) ==
          doctest::Approx(cfg.c_lambda * x * std::log(1.0 / x)));
    CHECK_THROWS_AS(make_lower_bound_config(1.5), Error);
}

TEST_CASE("propagate_lower_bound: bounded vorticity matches the closed form")
{
    const LowerBoundConfig cfg = make_lower_bound_config(0.5, 1e-2, 1.0);
    const FlowFamily g = bounded_flow();
    const FlowLowerBound fb = propagate_lower_bound(constant_axis(1.0), cfg, &g, 1e-6, {0.0, 0.5, 1.0});
    CHECK(fb.x.front() == doctest::Approx(1e-6).epsilon(1e-15));
    CHECK(fb.log_x.back() == doctest::Approx(oracle::kBoundedLogX_a1em6_t1).epsilon(1e-6));
    CHECK(bounded_closed_form_log(cfg.c_lambda, 1e-6, 1.0) ==
          doctest::Approx(oracle::kBoundedLogX_a1em6_t1).epsilon(1e-14));
    for (std::size_t i = 1; i < fb.x.size(); ++i)
        CHECK(fb.x[i] >= fb.x[i - 1]);
}

TEST_CASE("propagate_rate_u: m = 2 matches the closed form")
{
    const LowerBoundConfig cfg = make_lower_bound_config();
    const double K = cfg.c_lambda;
    CHECK(m2_closed_form_log(K, 1.0, 1e-8, 0.5) == doctest::Approx(oracle::kM2LogX_a1em8_t0p5).epsilon(1e-14));
    const FlowLowerBound fb = propagate_rate_u(m2_reduced_rate_u(K, 1.0), cfg, 1e-8, {0.0, 0.25, 0.5});
    CHECK(fb.log_x.back() == doctest::Approx(oracle::kM2LogX_a1em8_t0p5).epsilon(1e-4));
}

TEST_CASE("zero rate keeps x1 = a")
{
    const LowerBoundConfig cfg = make_lower_bound_config();
    const FlowFamily g = bounded_flow();
    const FlowLowerBound fb = propagate_lower_bound(zero_vorticity(), cfg, &g, 1e-5, {0.0, 0.5, 1.0});
    for (double x : fb.x)
        CHECK(x == doctest::Approx(1e-5).epsilon(1e-14));
    const FlowLowerBound fr = propagate_rate([](double, double) { return 0.0; }, cfg, 3e-4, {0.0, 1.0});
    CHECK(fr.x.back() == doctest::Approx(3e-4).epsilon(1e-14));
}

TEST_CASE("holder_quotient")
{
    const double c = 0.5 / M_PI;
    const double t = 1.0;
    std::vector<double> as;
    for (int k = 4; k <= 12; ++k)
        as.push_back(std::pow(10.0, -k));
    auto traj = [c](double a, double tt) { return bounded_closed_form_log(c, a, tt); };
    const HolderReport zero = holder_quotient(traj, t, 0.0, as);
    CHECK_FALSE(zero.diverging);
    for (std::size_t i = 1; i < zero.log10_quotient.size(); ++i)
        CHECK(zero.log10_quotient[i] < zero.log10_quotient[i - 1]);
    // quotient a^{exp(-ct) - alpha} grows as a falls once alpha exceeds exp(-ct)
    const double alpha = 1.2 * std::exp(-c * t);
    const HolderReport up = holder_quotient(traj, t, alpha, as);
    for (double g : up.growth_per_decade)
        CHECK(g == doctest::Approx(alpha - std::exp(-c * t)).epsilon(1e-8));
    const HolderReport steep = holder_quotient(traj, t, 2.5, as);
    CHECK(steep.diverging);
}

TEST_CASE("lp_norm_singular for m = 2 against the oracle")
{
    CHECK(lp_norm_singular(2, 50.0).norm == doctest::Approx(oracle::kLpNormM2_p50).epsilon(1e-8));
    CHECK(lp_norm_singular(2, 100.0).norm == doctest::Approx(oracle::kLpNormM2_p100).epsilon(1e-8));
    CHECK(lp_norm_singular(2, 200.0).norm == doctest::Approx(oracle::kLpNormM2_p200).epsilon(1e-8));
    CHECK(lp_norm_singular(2, 400.0).norm == doctest::Approx(oracle::kLpNormM2_p400).epsilon(1e-8));
    const double r100 = lp_norm_singular(2, 100.0).ratio;
    CHECK(r100 >= std::exp(-2.0));
    CHECK(r100 <= 1.1);
    const double centre = 0.5 * (std::exp(-2.0) + 1.0);
    CHECK(std::fabs(lp_norm_singular(2, 400.0).ratio - centre) <
          std::fabs(lp_norm_singular(2, 50.0).ratio - centre));
    CHECK(lp_norm(log_singular(2), 100.0).norm == doctest::Approx(oracle::kLpNormM2_p100).epsilon(1e-6));
}

TEST_CASE("iterated-log product inequality at m = 3, p = 1e4")
{
    const double p = 1e4;
    for (double x : {1.0, 2.0, 5.0}) {
        const double lhs = family::log_theta(2, x * p);
        CHECK(lhs <= family::log_theta(2, p) + x - 1.0);
    }
}

TEST_CASE("lp_norm of a square patch")
{
    // ||h 1_{[-r,r]^2}||_p = h (4 r^2)^{1/p}
    const LpNormResult n = lp_norm(indicator_square(0.5, 3.0), 10.0);
    CHECK(n.norm == doctest::Approx(3.0).epsilon(1e-10));
    const LpNormResult n2 = lp_norm(indicator_square(0.25, 1.0), 2.0);
    CHECK(n2.norm == doctest::Approx(0.5).epsilon(1e-10));
}
