#include <doctest.h>

#include <cmath>

#include "scrambler/errors.hpp"
#include "scrambler/ode.hpp"

using namespace scrambler;

TEST_CASE("exponential decay hits the grid exactly") {
    std::vector<double> grid{0.0, 0.1, 0.5, 1.0, 3.0, 3.0, 7.0};
    OdeStats stats;
    auto y = integrate_dopri5([](double, const double* y, double* dy) { dy[0] = -1.3 * y[0]; }, {2.0}, grid,
                              {}, &stats);
    REQUIRE(y.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(std::abs(y[i][0] - 2.0 * std::exp(-1.3 * grid[i])) <= 1e-9 * 2.0 * std::exp(-1.3 * grid[i]) + 1e-13);
    CHECK(stats.accepted > 0);
}

TEST_CASE("harmonic oscillator conserves energy to tolerance") {
    OdeOptions opt;
    opt.rel_tol = 1e-12;
    auto y = integrate_dopri5(
        [](double, const double* y, double* dy) {
            dy[0] = y[1];
            dy[1] = -y[0];
        },
        {1.0, 0.0}, {0.0, 10.0}, opt);
    CHECK(std::abs(y[1][0] - std::cos(10.0)) < 1e-9);
    CHECK(std::abs(y[1][1] + std::sin(10.0)) < 1e-9);
}

TEST_CASE("logistic equation") {
    auto y = integrate_dopri5([](double, const double* y, double* dy) { dy[0] = y[0] * (1.0 - y[0]); }, {0.1},
                              {0.0, 2.0, 5.0});
    auto exact = [](double t) { return 0.1 * std::exp(t) / (1.0 - 0.1 + 0.1 * std::exp(t)); };
    CHECK(std::abs(y[1][0] - exact(2.0)) < 1e-9);
    CHECK(std::abs(y[2][0] - exact(5.0)) < 1e-9);
}

TEST_CASE("argument errors") {
    auto f = [](double, const double*, double* dy) { dy[0] = 0.0; };
    CHECK_THROWS_AS(integrate_dopri5(f, {1.0}, {0.0, 2.0, 1.0}), UsageError);
    OdeOptions bad;
    bad.rel_tol = 0.0;
    CHECK_THROWS_AS(integrate_dopri5(f, {1.0}, {0.0, 1.0}, bad), DomainError);
}

TEST_CASE("finite-time blow-up is reported") {
    OdeOptions opt;
    opt.max_steps = 100000;
    CHECK_THROWS_AS(
        integrate_dopri5([](double, const double* y, double* dy) { dy[0] = y[0] * y[0]; }, {1.0}, {0.0, 2.0}, opt),
        IntegrationError);
}
