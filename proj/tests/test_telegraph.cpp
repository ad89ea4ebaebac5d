#include "hypdiff/telegraph.hpp"

#include "hypdiff/closed_forms.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace hypdiff;

namespace {

Field random_field(const Grid1D& grid, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Field f(grid);
    for (int i = 0; i < f.size(); ++i) f[i] = dist(rng);
    return f;
}

// Independent replica of the documented update rule, used to stress step
// sizes the library refuses.
void raw_update(std::vector<double>& u, std::vector<double>& v, double dx,
                double K, double lambda, double dt) {
    const int n = static_cast<int>(u.size());
    std::vector<double> lap(u.size());
    for (int i = 0; i < n; ++i) {
        const double left = u[(i + n - 1) % n];
        const double right = u[(i + 1) % n];
        lap[i] = (left - 2.0 * u[i] + right) / (dx * dx);
    }
    std::vector<double> u_next(u.size()), v_next(u.size());
    for (int i = 0; i < n; ++i) {
        u_next[i] = u[i] + (dt - dt * dt / (2.0 * lambda)) * v[i] +
                    (K * dt * dt / (2.0 * lambda)) * lap[i];
        v_next[i] = v[i] + (dt / lambda) * (K * lap[i] - v[i]);
    }
    u.swap(u_next);
    v.swap(v_next);
}

} // namespace

TEST_CASE("ModelParams defaults K to sigma^2/2 exactly") {
    ModelParams p(0.5, 0.2);
    CHECK(p.K == 0.5 * 0.2 * 0.2);
    CHECK(p.mu == 0.0);
    ModelParams q(0.5, 0.2, 0.1, 0.07);
    CHECK(q.K == 0.07);
    CHECK_THROWS_AS(ModelParams(0.5, 0.2, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(0.5, 0.2, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("TelegraphState validates its fields") {
    Grid1D a(16, 0.0, 1.0), b(16, 0.0, 2.0);
    CHECK_THROWS_AS(TelegraphState(Field(a), Field(b)), std::invalid_argument);
    CHECK_THROWS_AS(TelegraphState(Field(a), Field(a), -1.0),
                    std::invalid_argument);
}

TEST_CASE("check_stability reports the wave speed") {
    Grid1D grid(100, 0.0, 1.0, Boundary::Periodic);
    ModelParams p(0.5, 0.2, 0.0, 0.02);
    const auto r = check_stability(grid, p, 1e-4);
    CHECK(r.wave_speed == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(r.cfl_ratio == doctest::Approx(0.2 * 1e-4 / grid.dx()).epsilon(1e-12));
    // Wave speed falls and the relaxation clamp takes over as lambda grows.
    ModelParams big(100.0, 0.2, 0.0, 0.02);
    CHECK(check_stability(grid, big, 1e-4).wave_speed ==
          doctest::Approx(std::sqrt(0.02 / 100.0)).epsilon(1e-12));
}

TEST_CASE("check_stability bounds the step by mode damping, not CFL") {
    // dx = 0.01, lambda = 0.5, K = 0.02: the largest stencil symbol is
    // 4K/dx^2 = 800, so dt_max = 0.9 * 2/800 = 2.25e-3 (the CFL-style value
    // 0.045 amplifies the top modes, as the raw-update test below shows).
    Grid1D grid(101, 0.0, 1.0, Boundary::Reflecting);
    ModelParams p(0.5, 0.2, 0.0, 0.02);
    const auto r = check_stability(grid, p, 2e-3);
    CHECK(r.dt_max == doctest::Approx(0.9 * 2.0 / 800.0).epsilon(1e-12));
    CHECK(r.stable);
    CHECK_FALSE(check_stability(grid, p, 0.045).stable);

    // Tiny lambda: the damping bound 2*lambda clamps first.
    ModelParams small(1e-5, 0.2, 0.0, 0.02);
    CHECK(check_stability(grid, small, 1e-5).dt_max ==
          doctest::Approx(0.9 * 2e-5).epsilon(1e-12));
}

TEST_CASE("raw update amplifies at the CFL-style step and decays at dt_max") {
    const int n = 128;
    const double dx = 0.01, K = 0.02, lambda = 0.5;
    auto worst_growth = [&](double dt, int steps) {
        std::vector<double> u(n, 0.0), v(n, 0.0);
        u[n / 2] = 1.0; // broadband seed
        double peak = 0.0;
        for (int s = 0; s < steps; ++s) {
            raw_update(u, v, dx, K, lambda, dt);
            for (double x : u) peak = std::max(peak, std::abs(x));
        }
        return peak;
    };
    CHECK(worst_growth(0.045, 400) > 1e3);
    CHECK(worst_growth(0.9 * 2.0 / (4.0 * K / (dx * dx)), 400) <= 1.0);
}

TEST_CASE("step leaves a constant state untouched") {
    Grid1D grid(64, -2.0, 2.0, Boundary::Periodic);
    ModelParams p(0.8, 0.3);
    Field u = sample(grid, [](double) { return 1.25; });
    const auto out = step(TelegraphState::at_rest(u), p, suggest_dt(grid, p));
    for (int i = 0; i < grid.n_points(); ++i) {
        CHECK(out.u[i] == 1.25);
        CHECK(out.v[i] == 0.0);
    }
}

TEST_CASE("step applies the documented coefficients") {
    // dt = 0.01, lambda = 0.5: weight on v is 0.01 - 0.0001 = 0.0099 and the
    // acceleration terms carry dt^2/(2 lambda) = 1e-4.
    Grid1D grid(32, -8.0, 8.0, Boundary::Periodic);
    const double dt = 0.01, lambda = 0.5;

    SUBCASE("massless") {
        ModelParams p(lambda, 0.2); // K = 0.02
        Field u = random_field(grid, 1), v = random_field(grid, 2);
        const Field lap = laplacian(u);
        const auto out = step(TelegraphState(u, v), p, dt);
        for (int i = 0; i < grid.n_points(); ++i) {
            const double expected_u =
                u[i] + 0.0099 * v[i] + p.K * 1e-4 * lap[i];
            const double expected_v =
                v[i] + (dt / lambda) * (p.K * lap[i] - v[i]);
            CHECK(out.u[i] == doctest::Approx(expected_u).epsilon(1e-14));
            CHECK(out.v[i] == doctest::Approx(expected_v).epsilon(1e-14));
        }
    }
    SUBCASE("massive") {
        ModelParams p(lambda, 0.2, 0.3);
        Field u = random_field(grid, 3), v = random_field(grid, 4);
        const Field lap = laplacian(u);
        const auto out = step(TelegraphState(u, v), p, dt);
        for (int i = 0; i < grid.n_points(); ++i) {
            const double forcing = p.K * lap[i] - 0.09 * u[i];
            const double expected_u = u[i] + 0.0099 * v[i] + 1e-4 * forcing;
            const double expected_v = v[i] + (dt / lambda) * (forcing - v[i]);
            CHECK(out.u[i] == doctest::Approx(expected_u).epsilon(1e-14));
            CHECK(out.v[i] == doctest::Approx(expected_v).epsilon(1e-14));
        }
    }
}

TEST_CASE("step refuses unstable steps with a report") {
    Grid1D grid(101, 0.0, 1.0, Boundary::Periodic);
    ModelParams p(0.5, 0.2, 0.0, 0.02);
    Field u = random_field(grid, 9);
    try {
        step(TelegraphState::at_rest(u), p, 0.045);
        FAIL("expected StabilityError");
    } catch (const StabilityError& e) {
        CHECK_FALSE(e.report.stable);
        CHECK(e.report.dt == 0.045);
        CHECK(e.report.dt_max < 0.045);
    }
}

TEST_CASE("step reports numerical blowup with the step index") {
    Grid1D grid(32, 0.0, 1.0, Boundary::Periodic);
    ModelParams p(0.5, 0.2, 0.0, 0.02);
    Field u(grid);
    u[3] = std::numeric_limits<double>::quiet_NaN();
    try {
        step(TelegraphState::at_rest(u), p, suggest_dt(grid, p), 7);
        FAIL("expected BlowupError");
    } catch (const BlowupError& e) {
        CHECK(e.step_index == 7);
        CHECK(std::string(e.what()).find("7") != std::string::npos);
    }
}

TEST_CASE("mass is conserved over ten thousand steps") {
    Grid1D grid(256, -8.0, 8.0, Boundary::Periodic);
    ModelParams p(0.5, 0.2, 0.0, 0.02);
    Field u0 = sample(grid, [](double x) { return heat_kernel(x, 1.0, 0.5); });
    TelegraphState state = TelegraphState::at_rest(u0);
    const double m0 = total_mass(state.u);
    const double dt = suggest_dt(grid, p);
    for (long i = 1; i <= 10000; ++i) state = step(state, p, dt, i);
    CHECK(std::abs(total_mass(state.u) - m0) / m0 <= 1e-10);
    CHECK(std::abs(total_mass(state.v)) <= 1e-14);
}

TEST_CASE("compact support spreads at most one cell per step") {
    Grid1D grid(256, -8.0, 8.0, Boundary::Periodic);
    ModelParams p(1.0, 1.0, 0.0, 0.5);
    Field u0(grid);
    const int centre = 128;
    u0[centre] = 1.0 / grid.dx();
    TelegraphState state = TelegraphState::at_rest(u0);
    const double dt = suggest_dt(grid, p);
    const int steps = 50;
    for (long i = 1; i <= steps; ++i) state = step(state, p, dt, i);
    for (int i = 0; i < grid.n_points(); ++i)
        if (std::abs(i - centre) > steps) {
            CHECK(std::abs(state.u[i]) < 1e-12);
            CHECK(std::abs(state.v[i]) < 1e-12);
        }
}

TEST_CASE("evolve snapshots") {
    Grid1D grid(64, -2.0, 2.0, Boundary::Periodic);
    ModelParams p(0.5, 0.2);
    Field u0 = sample(grid, [](double x) { return heat_kernel(x, 0.5, 0.02); });
    const auto initial = TelegraphState::at_rest(u0);
    const double dt = suggest_dt(grid, p);

    SUBCASE("zero horizon returns only the initial state") {
        const auto series = evolve(initial, p, 0.0, dt);
        CHECK(series.size() == 1);
        CHECK(series.times()[0] == 0.0);
        for (int i = 0; i < grid.n_points(); ++i)
            CHECK(series.density(0)[i] == u0[i]);
    }
    SUBCASE("stride larger than the run keeps a single final snapshot") {
        const auto series = evolve(initial, p, 6.5 * dt, dt, 1000);
        CHECK(series.size() == 1);
        CHECK(series.times()[0] == doctest::Approx(6.5 * dt).epsilon(1e-12));
    }
    SUBCASE("stride snapshots land every stride steps plus the final step") {
        const auto series = evolve(initial, p, 7.0 * dt, dt, 2);
        REQUIRE(series.size() == 4); // steps 2, 4, 6, 7
        CHECK(series.times()[0] == doctest::Approx(2 * dt));
        CHECK(series.times()[1] == doctest::Approx(4 * dt));
        CHECK(series.times()[2] == doctest::Approx(6 * dt));
        CHECK(series.times()[3] == doctest::Approx(7 * dt));
    }
    SUBCASE("dt shrinks uniformly to land on tau_final") {
        const auto series = evolve(initial, p, 2.5 * dt, dt);
        CHECK(series.times().back() == doctest::Approx(2.5 * dt).epsilon(1e-12));
    }
    SUBCASE("horizon must not precede the state") {
        CHECK_THROWS_AS(evolve(TelegraphState(u0, Field(grid), 1.0), p, 0.5, dt),
                        std::invalid_argument);
    }
}

TEST_CASE("small-lambda runs approach the heat kernel monotonically") {
    Grid1D grid(1024, -1.6, 1.6, Boundary::Periodic);
    const double lambdas[] = {1.0, 1e-2, 1e-4};
    double previous = std::numeric_limits<double>::infinity();
    for (double lambda : lambdas) {
        ModelParams p(lambda, 0.2, 0.0, 0.02);
        Field u0 = sample(grid, [&](double x) { return heat_kernel(x, 0.01, p.K); });
        const auto series =
            evolve(TelegraphState::at_rest(u0), p, 1.0, suggest_dt(grid, p), 0);
        Field ref = sample(grid, [&](double x) { return heat_kernel(x, 1.01, p.K); });
        const double l1 = l1_distance(series.back(), ref);
        CHECK(l1 < previous);
        previous = l1;
    }
    // The smallest lambda matches the diffusion oracle tightly.
    CHECK(previous <= 2e-2);
}

TEST_CASE("refinement improves the small-lambda solution at order >= 1") {
    ModelParams p(1e-4, 0.2, 0.0, 0.02);
    std::vector<double> dxs, errors;
    for (int n : {128, 256, 512}) {
        Grid1D grid(n, -1.6, 1.6, Boundary::Periodic);
        Field u0 = sample(grid, [&](double x) { return heat_kernel(x, 0.01, p.K); });
        const auto series =
            evolve(TelegraphState::at_rest(u0), p, 1.0, suggest_dt(grid, p), 0);
        Field ref = sample(grid, [&](double x) { return heat_kernel(x, 1.01, p.K); });
        dxs.push_back(grid.dx());
        errors.push_back(l1_distance(series.back(), ref));
    }
    CHECK(errors[1] < errors[0]);
    CHECK(errors[2] < errors[1]);
    const double order = std::log2(errors[0] / errors[1]);
    CHECK(order >= 1.0);
}

TEST_CASE("explicit K equal to sigma^2/2 reproduces the default bitwise") {
    Grid1D grid(128, -2.0, 2.0, Boundary::Periodic);
    ModelParams from_sigma(0.7, 0.3);
    ModelParams explicit_K(0.7, 0.3, 0.0, 0.5 * 0.3 * 0.3);
    Field u0 = random_field(grid, 77);
    Field v0 = random_field(grid, 78);
    TelegraphState a(u0, v0), b(u0, v0);
    const double dt = suggest_dt(grid, from_sigma);
    for (int i = 0; i < 25; ++i) {
        a = step(a, from_sigma, dt);
        b = step(b, explicit_K, dt);
    }
    for (int i = 0; i < grid.n_points(); ++i) {
        CHECK(a.u[i] == b.u[i]);
        CHECK(a.v[i] == b.v[i]);
    }
}
