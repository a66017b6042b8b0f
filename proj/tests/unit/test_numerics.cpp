#include "moclab/error.hpp"
#include "moclab/numerics.hpp"

#include <doctest.h>

#include <cmath>

using namespace moclab;

TEST_CASE("integrate: polynomial and endpoint cases")
{
    CHECK(num::integrate([](double x) { return x * x; }, 0.0, 3.0) == doctest::Approx(9.0).epsilon(1e-14));
    CHECK(num::integrate([](double x) { return std::exp(-x); }, 0.0, INFINITY) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(num::integrate([](double) { return 1.0; }, 2.0, 2.0) == 0.0);
}

TEST_CASE("integrate: short intervals do not recurse to max depth")
{
    // 1e-6 wide, relative tolerance 1e-13
    const double v = num::integrate([](double x) { return std::exp(x); }, 1.0, 1.0 + 1e-6, 1e-13);
    CHECK(v == doctest::Approx(std::exp(1.0) * std::expm1(1e-6)).epsilon(1e-12));
    const num::QuadEstimate q = num::integrate_estimate([](double x) { return std::exp(x); }, 1.0,
                                                        1.0 + 1e-6, 1e-13);
    CHECK(q.error < 1e-18);
    CHECK(q.l1 == doctest::Approx(q.value));
}

TEST_CASE("integrate_pieces applies the tolerance to the total")
{
    auto f = [](double x) { return std::exp(-x * x); };
    const double v = num::integrate_pieces(f, {-8.0, -1.0, 0.0, 1.0, 8.0});
    CHECK(v == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-13));
}

TEST_CASE("integrate_endpoint_singular handles a log singularity")
{
    const double v = num::integrate_endpoint_singular([](double x) { return std::log(x); }, 0.0, 1.0);
    CHECK(v == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("find_root and bisect")
{
    CHECK(num::find_root([](double x) { return x * x - 2.0; }, 0.0, 2.0) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK_THROWS_AS(num::find_root([](double x) { return x * x + 1.0; }, 0.0, 2.0), Error);
    const num::BisectResult b = num::bisect([](double x) { return x - 0.3; }, 0.0, 1.0, 1e-12, 100);
    CHECK(b.x == doctest::Approx(0.3).epsilon(1e-11));
    CHECK(b.iterations <= 41);
}

TEST_CASE("minimize_scan finds interior and boundary minima")
{
    const num::Minimum m = num::minimize_scan([](double x) { return (x - 1.3) * (x - 1.3); }, 0.0, 4.0, 64, false);
    CHECK(m.x == doctest::Approx(1.3).epsilon(1e-7));
    CHECK_FALSE(m.at_upper);
    const num::Minimum e = num::minimize_scan([](double x) { return -x; }, 1.0, 10.0, 16, true);
    CHECK(e.x == 10.0);
    CHECK(e.at_upper);
}

TEST_CASE("finite differences")
{
    auto f = [](double x) { return std::sin(x); };
    CHECK(num::d1(f, 0.7, 1e-3) == doctest::Approx(std::cos(0.7)).epsilon(1e-10));
    CHECK(num::d2(f, 0.7, 1e-3) == doctest::Approx(-std::sin(0.7)).epsilon(1e-8));
}

TEST_CASE("grids")
{
    const auto g = num::log_grid(1e-3, 1.0, 4);
    REQUIRE(g.size() == 13);
    CHECK(g.front() == 1e-3);
    CHECK(g.back() == 1.0);
    CHECK(g[4] == doctest::Approx(1e-2));
    CHECK(num::log_grid(1.0, 0.5, 4).empty());
    CHECK(num::linspace(0.0, 1.0, 0).empty());
    CHECK(num::linspace(0.0, 1.0, 5)[2] == 0.5);
}

TEST_CASE("log_add_exp")
{
    CHECK(num::log_add_exp(0.0, 0.0) == doctest::Approx(std::log(2.0)));
    CHECK(num::log_add_exp(1000.0, 0.0) == doctest::Approx(1000.0));
    CHECK(num::log_add_exp(-INFINITY, 3.0) == 3.0);
}

TEST_CASE("relative second differences sign concavity")
{
    // v = x^{1/2} (concave) and v = x^2 (convex), given as lambda(r) = r + log v(e^{-r})
    std::vector<double> r, lc, lv;
    for (int i = 0; i < 20; ++i) {
        const double rr = 1.0 + 0.5 * i;
        r.push_back(rr);
        lc.push_back(rr - 0.5 * rr);
        lv.push_back(rr - 2.0 * rr);
    }
    for (double d : num::relative_second_differences(r, lc))
        CHECK(d <= 0.0);
    for (double d : num::relative_second_differences(r, lv))
        CHECK(d >= 0.0);
}

TEST_CASE("solve_ode: exponential decay and guard")
{
    num::OdeOptions o;
    const num::OdeResult r = num::solve_ode([](double, double y) { return -y; }, 1.0, 0.0, 2.0, o);
    CHECK_FALSE(r.aborted);
    CHECK(r.y == doctest::Approx(std::exp(-2.0)).epsilon(1e-10));
    const num::OdeResult g = num::solve_ode([](double, double y) { return -y; }, 1.0, 0.0, 2.0, o,
                                            [](double, double y) { return y > 0.5; });
    CHECK(g.aborted);
    CHECK(g.t < 2.0);
    const auto ys = num::solve_ode_at([](double, double y) { return y; }, 1.0, {0.0, 0.5, 1.0}, o);
    REQUIRE(ys.size() == 3);
    CHECK(ys[2] == doctest::Approx(M_E).epsilon(1e-10));
}
