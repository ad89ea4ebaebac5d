#include "hypdiff/closed_forms.hpp"

#include "hypdiff/measures.hpp"
#include "hypdiff/telegraph.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace hypdiff;

namespace {

// Independent quadrature oracle: the zero-rate call value as the lognormal
// payoff integral E[max(S e^{-v/2 + sqrt(v) Z} - K, 0)], Simpson in Z.
double call_price_by_quadrature(double spot, double strike, double sigma,
                                double tau) {
    const double v = sigma * std::sqrt(tau);
    const int n = 4000; // panels; even
    const double lo = -12.0, hi = 12.0;
    const double h = (hi - lo) / n;
    auto integrand = [&](double z) {
        const double s_t = spot * std::exp(-0.5 * v * v + v * z);
        const double payoff = std::max(s_t - strike, 0.0);
        return payoff * std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    };
    double acc = integrand(lo) + integrand(hi);
    for (int i = 1; i < n; ++i) acc += integrand(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

} // namespace

TEST_CASE("heat_kernel values and domain") {
    // Peak at K = 0.5, tau = 1 is the standard normal peak 1/sqrt(2 pi).
    CHECK(heat_kernel(0.0, 1.0, 0.5) ==
          doctest::Approx(0.3989422804014327).epsilon(1e-12));
    CHECK_THROWS_AS(heat_kernel(0.0, 0.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(heat_kernel(0.0, -1.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(heat_kernel(0.0, 1.0, 0.0), std::domain_error);
}

TEST_CASE("heat_kernel variance is 2 K tau") {
    // sigma = 0.2, tau = 1, K = sigma^2/2: variance sigma^2 tau = 0.04.
    Grid1D grid(4001, -2.0, 2.0, Boundary::Reflecting);
    Field f = sample(grid, [](double x) { return heat_kernel(x, 1.0, 0.02); });
    const auto stats = snapshot_stats(f);
    CHECK(stats.mass == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(stats.variance == doctest::Approx(0.04).epsilon(1e-7));
}

TEST_CASE("heat_kernel satisfies u_tau = K u_xx on the grid") {
    const double K = 0.5, tau = 1.0, dtau = 1e-3;
    Grid1D grid(8001, -8.0, 8.0, Boundary::Periodic);
    Field mid = sample(grid, [&](double x) { return heat_kernel(x, tau, K); });
    Field lo = sample(grid, [&](double x) { return heat_kernel(x, tau - dtau, K); });
    Field hi = sample(grid, [&](double x) { return heat_kernel(x, tau + dtau, K); });
    Field lap = laplacian(mid);
    double res2 = 0.0, norm2 = 0.0;
    for (int i = 0; i < grid.n_points(); ++i) {
        const double du = (hi[i] - lo[i]) / (2.0 * dtau);
        const double r = du - K * lap[i];
        res2 += r * r;
        norm2 += mid[i] * mid[i];
    }
    CHECK(std::sqrt(res2) <= 1e-6 * std::sqrt(norm2));
}

TEST_CASE("heat_kernel reproduces itself under the telegraph march") {
    // Small relaxation time: the damped-wave solution tracks pure diffusion.
    ModelParams p(1e-5, 1.0, 0.0, 0.5);
    Grid1D grid(1024, -6.0, 6.0, Boundary::Periodic);
    Field u0 = sample(grid, [](double x) { return heat_kernel(x, 0.05, 0.5); });
    auto series = evolve(TelegraphState::at_rest(u0), p, 1.0, suggest_dt(grid, p), 0);
    Field ref = sample(grid, [](double x) { return heat_kernel(x, 1.05, 0.5); });
    CHECK(l1_distance(series.back(), ref) <= 2e-2);
}

TEST_CASE("cauchy_poisson values and domain") {
    CHECK(cauchy_poisson(0.0, 1.0) ==
          doctest::Approx(0.3183098861837907).epsilon(1e-12));
    // Half the peak at |z| = tau: half-width at half maximum is tau.
    const double tau = 0.7;
    CHECK(cauchy_poisson(tau, tau) ==
          doctest::Approx(1.0 / (2.0 * std::numbers::pi * tau)).epsilon(1e-12));
    CHECK_THROWS_AS(cauchy_poisson(0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(cauchy_poisson(0.0, -2.0), std::domain_error);
}

TEST_CASE("cauchy_poisson is discretely harmonic in (z, tau)") {
    const double tau = 1.0, h = 5e-4;
    const int n = static_cast<int>(40.0 / h) + 1;
    Grid1D grid(n, -20.0, 20.0, Boundary::Absorbing);
    double res2 = 0.0, norm2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = grid.coordinate(i);
        const double c = cauchy_poisson(z, tau);
        const double d2z =
            (cauchy_poisson(z - h, tau) - 2.0 * c + cauchy_poisson(z + h, tau)) / (h * h);
        const double d2t =
            (cauchy_poisson(z, tau - h) - 2.0 * c + cauchy_poisson(z, tau + h)) / (h * h);
        res2 += (d2z + d2t) * (d2z + d2t);
        norm2 += c * c;
    }
    CHECK(std::sqrt(res2) <= 1e-6 * std::sqrt(norm2));
}

TEST_CASE("analytic density masses") {
    SUBCASE("heat kernel integrates to one") {
        Grid1D grid(2048, -12.0, 12.0, Boundary::Reflecting);
        Field f = sample_density(AnalyticDensity::heat(0.5, 1.0), grid);
        CHECK(std::abs(total_mass(f) - 1.0) <= 1e-6);
    }
    SUBCASE("cauchy mass on [-R, R] follows the arctan closed form") {
        for (double R : {10.0, 40.0}) {
            const int n = static_cast<int>(R * 400) + 1;
            Grid1D grid(n, -R, R, Boundary::Reflecting);
            Field f = sample_density(AnalyticDensity::cauchy(1.0), grid);
            const double oracle = 2.0 / std::numbers::pi * std::atan(R);
            CHECK(total_mass(f) == doctest::Approx(oracle).epsilon(1e-6));
        }
    }
}

TEST_CASE("truncated cauchy second moment grows without bound") {
    double previous = 0.0;
    for (double R : {10.0, 100.0, 1000.0}) {
        Grid1D grid(100001, -R, R, Boundary::Reflecting);
        Field f = sample_density(AnalyticDensity::cauchy(1.0), grid);
        const double second_moment = snapshot_stats(f).variance;
        CHECK(second_moment > previous);
        previous = second_moment;
    }
}

TEST_CASE("bs_call_price") {
    SUBCASE("at-the-money value against the quadrature oracle") {
        const double price = bs_call_price(100.0, 100.0, 0.2, 1.0);
        CHECK(price == doctest::Approx(7.9656).epsilon(2e-5));
        CHECK(price ==
              doctest::Approx(call_price_by_quadrature(100.0, 100.0, 0.2, 1.0))
                  .epsilon(1e-6));
    }
    SUBCASE("tau -> 0 gives intrinsic value") {
        CHECK(bs_call_price(120.0, 100.0, 0.2, 1e-10) ==
              doctest::Approx(20.0).epsilon(1e-6));
        CHECK(bs_call_price(80.0, 100.0, 0.2, 1e-10) ==
              doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
    }
    SUBCASE("sigma -> 0 gives intrinsic value off the strike") {
        CHECK(bs_call_price(120.0, 100.0, 1e-9, 1.0) ==
              doctest::Approx(20.0).epsilon(1e-6));
        CHECK(bs_call_price(80.0, 100.0, 1e-9, 1.0) ==
              doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
    }
    SUBCASE("monotone in sigma and tau") {
        for (double strike : {80.0, 100.0, 125.0}) {
            double last = -1.0;
            for (double sigma : {0.05, 0.1, 0.2, 0.4, 0.8}) {
                const double c = bs_call_price(100.0, strike, sigma, 1.0);
                CHECK(c > last);
                last = c;
            }
            last = -1.0;
            for (double tau : {0.1, 0.5, 1.0, 2.0, 5.0}) {
                const double c = bs_call_price(100.0, strike, 0.2, tau);
                CHECK(c > last);
                last = c;
            }
        }
    }
    SUBCASE("domain errors") {
        CHECK_THROWS_AS(bs_call_price(0.0, 100.0, 0.2, 1.0), std::domain_error);
        CHECK_THROWS_AS(bs_call_price(100.0, -1.0, 0.2, 1.0), std::domain_error);
        CHECK_THROWS_AS(bs_call_price(100.0, 100.0, 0.0, 1.0), std::domain_error);
        CHECK_THROWS_AS(bs_call_price(100.0, 100.0, 0.2, 0.0), std::domain_error);
    }
}

TEST_CASE("bs_mass_term") {
    CHECK(bs_mass_term(0.2) == doctest::Approx(0.005).epsilon(1e-15));
    CHECK(bs_mass_term(1.0) == doctest::Approx(0.125).epsilon(1e-15));
    for (double sigma : {0.1, 0.3, 0.9})
        CHECK(bs_mass_term(2.0 * sigma) ==
              doctest::Approx(4.0 * bs_mass_term(sigma)).epsilon(1e-14));
    CHECK_THROWS_AS(bs_mass_term(0.0), std::domain_error);
}
