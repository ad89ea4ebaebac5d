#include "hypdiff/spectral_kg.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

using namespace hypdiff;

namespace {

// L = 64 with 64 points keeps |k| <= pi, so defect norms stay well clear of
// round-off amplification.
Grid1D kg_grid() { return Grid1D(64, 0.0, 64.0, Boundary::Periodic); }

ComplexField random_complex(const Grid1D& grid, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    ComplexField f(grid);
    for (int i = 0; i < f.size(); ++i) f[i] = {dist(rng), dist(rng)};
    return f;
}

const double kLattice[] = {0.5, 1.0, 2.0};

} // namespace

TEST_CASE("fourier_wavenumbers layout") {
    Grid1D grid(8, 0.0, 8.0, Boundary::Periodic);
    auto k = fourier_wavenumbers(grid);
    const double base = 2.0 * std::numbers::pi / 8.0;
    CHECK(k[0] == 0.0);
    CHECK(k[1] == doctest::Approx(base));
    CHECK(k[4] == doctest::Approx(4.0 * base));
    CHECK(k[5] == doctest::Approx(-3.0 * base));
    CHECK(k[7] == doctest::Approx(-base));
    CHECK_THROWS_AS(fourier_wavenumbers(Grid1D(8, 0.0, 8.0, Boundary::Reflecting)),
                    std::invalid_argument);
}

TEST_CASE("hamiltonian block at k=0, mu=1, lambda=1") {
    ModelParams p(1.0, 1.0, 1.0);
    auto H = build_hamiltonian(kg_grid(), p);
    const Mat2& b = H.block(0);
    CHECK(b.a == std::complex<double>(1.0, 0.0));
    CHECK(b.b == std::complex<double>(0.0, 0.0));
    CHECK(b.c == std::complex<double>(0.0, 0.0));
    CHECK(b.d == std::complex<double>(-1.0, 0.0));
    const auto [e1, e2] = mode_eigenvalues(H, 0);
    CHECK(e1.real() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(e2.real() == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("hamiltonian blocks are traceless with determinant -D_k") {
    for (double lambda : kLattice) {
        for (double mu : kLattice) {
            ModelParams p(lambda, 1.0, mu);
            auto H = build_hamiltonian(kg_grid(), p);
            for (int m = 0; m < H.mode_count(); ++m) {
                CHECK(std::abs(H.block(m).trace()) <= 1e-13);
                CHECK(H.block(m).det().real() ==
                      doctest::Approx(-H.symbol(m)).epsilon(1e-13));
            }
        }
    }
}

TEST_CASE("hamiltonian eigenvalues are the real pair +-sqrt(k^2 + mu^2)") {
    for (double lambda : kLattice) {
        for (double mu : kLattice) {
            ModelParams p(lambda, 1.0, mu);
            auto H = build_hamiltonian(kg_grid(), p);
            for (int m = 0; m < H.mode_count(); ++m) {
                const auto [e1, e2] = mode_eigenvalues(H, m);
                const double w = std::sqrt(H.symbol(m));
                CHECK(std::abs(e1.imag()) <= 1e-12);
                CHECK(std::abs(e2.imag()) <= 1e-12);
                CHECK(std::abs(std::abs(e1.real()) - w) <= 1e-10);
                CHECK(std::abs(std::abs(e2.real()) - w) <= 1e-10);
            }
        }
    }
}

TEST_CASE("hamiltonian and metric reject mu = 0 and open boundaries") {
    ModelParams massless(1.0, 1.0, 0.0);
    CHECK_THROWS_AS(build_hamiltonian(kg_grid(), massless), std::domain_error);
    CHECK_THROWS_AS(build_metric(kg_grid(), massless), std::domain_error);
    ModelParams p(1.0, 1.0, 1.0);
    Grid1D open(64, 0.0, 64.0, Boundary::Absorbing);
    CHECK_THROWS_AS(build_hamiltonian(open, p), std::invalid_argument);
}

TEST_CASE("metric block at k=0, mu=1, lambda=1 is identity/4") {
    ModelParams p(1.0, 1.0, 1.0);
    auto eta = build_metric(kg_grid(), p);
    const Mat2& b = eta.block(0);
    CHECK(b.a.real() == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(b.d.real() == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(std::abs(b.b) <= 1e-16);
    CHECK(std::abs(b.c) <= 1e-16);
}

TEST_CASE("metric blocks: swap symmetry and positive eigenvalue pair") {
    for (double lambda : kLattice) {
        for (double mu : kLattice) {
            ModelParams p(lambda, 1.0, mu);
            auto eta = build_metric(kg_grid(), p);
            for (int m = 0; m < eta.mode_count(); ++m) {
                const Mat2& b = eta.block(m);
                // Commutes with the component swap [[0,1],[1,0]].
                CHECK(b.b == b.c);
                CHECK(b.a == b.d);
                // Eigenvalues in the (1,1)/(1,-1) basis.
                const double plus = (b.a + b.b).real();
                const double minus = (b.a - b.b).real();
                CHECK(plus ==
                      doctest::Approx(lambda * lambda / 4.0).epsilon(1e-13));
                CHECK(minus ==
                      doctest::Approx(1.0 / (4.0 * eta.symbol(m))).epsilon(1e-13));
                CHECK(plus > 0.0);
                CHECK(minus > 0.0);
            }
        }
    }
}

TEST_CASE("pseudo-hermiticity holds across the parameter lattice") {
    for (double lambda : kLattice) {
        for (double mu : kLattice) {
            ModelParams p(lambda, 1.0, mu);
            auto H = build_hamiltonian(kg_grid(), p);
            auto eta = build_metric(kg_grid(), p);
            CHECK(check_pseudo_hermiticity(H, eta) <= 1e-12);
        }
    }
}

TEST_CASE("pseudo-hermiticity defect detects a corrupted metric") {
    ModelParams p(1.0, 1.0, 1.0);
    auto H = build_hamiltonian(kg_grid(), p);
    auto eta = build_metric(kg_grid(), p);
    eta.block(5).b += 0.1;
    CHECK(check_pseudo_hermiticity(H, eta) > 1e-3);
}

TEST_CASE("k=0 blocks commute exactly") {
    ModelParams p(1.0, 1.0, 1.0);
    auto H = build_hamiltonian(kg_grid(), p);
    auto eta = build_metric(kg_grid(), p);
    const Mat2 defect =
        H.block(0).adjoint() * eta.block(0) - eta.block(0) * H.block(0);
    CHECK(defect.frobenius_norm() == 0.0);
}

TEST_CASE("component map round trip") {
    Grid1D grid = kg_grid();
    ComplexField psi = random_complex(grid, 101);
    ComplexField psi_dot = random_complex(grid, 102);
    for (double lambda : {0.3, 1.0, 2.5}) {
        KGState state(psi, psi_dot, lambda);
        const auto back_psi = state.psi();
        const auto back_dot = state.psi_dot();
        for (int i = 0; i < grid.n_points(); ++i) {
            CHECK(std::abs(back_psi[i] - psi[i]) <= 1e-13);
            CHECK(std::abs(back_dot[i] - psi_dot[i]) <= 1e-13);
        }
    }
    CHECK_THROWS_AS(KGState(psi, psi_dot, 0.0), std::invalid_argument);
}

TEST_CASE("evolve_exact at t=0 is the identity") {
    ModelParams p(1.0, 1.0, 1.0);
    Grid1D grid = kg_grid();
    auto H = build_hamiltonian(grid, p);
    KGState state(random_complex(grid, 7), random_complex(grid, 8), p.lambda);
    auto out = evolve_exact(state, H, 0.0);
    for (int i = 0; i < grid.n_points(); ++i) {
        CHECK(std::abs(out.component1()[i] - state.component1()[i]) <= 1e-14);
        CHECK(std::abs(out.component2()[i] - state.component2()[i]) <= 1e-14);
    }
}

TEST_CASE("metric norm is conserved by the exact propagator") {
    ModelParams p(1.0, 1.0, 1.0);
    Grid1D grid = kg_grid();
    auto H = build_hamiltonian(grid, p);
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        KGState state(random_complex(grid, 200 + seed),
                      random_complex(grid, 300 + seed), p.lambda);
        const double before = metric_inner_product(state, state, p).real();
        for (double t : {0.1, 1.0, 10.0}) {
            auto out = evolve_exact(state, H, t);
            const double after = metric_inner_product(out, out, p).real();
            CHECK(std::abs(after - before) / before <= 1e-10);
        }
    }
}

TEST_CASE("plain component norm is not conserved") {
    ModelParams p(1.0, 1.0, 1.0);
    Grid1D grid = kg_grid();
    auto H = build_hamiltonian(grid, p);
    ComplexField psi = sample(grid, [](double x) {
        const double d = x - 32.0;
        return std::complex<double>(std::exp(-0.5 * d * d), 0.0);
    });
    ComplexField psi_dot = sample(grid, [](double x) {
        const double d = x - 32.5;
        return std::complex<double>(0.0, 0.7 * std::exp(-d * d / 1.5));
    });
    KGState state(psi, psi_dot, p.lambda);
    const double before = l2_norm_sq(state);
    const double after = l2_norm_sq(evolve_exact(state, H, 1.0));
    CHECK(std::abs(after - before) / before > 1e-6);
}

TEST_CASE("metric inner product") {
    Grid1D grid = kg_grid();
    ModelParams p(1.0, 1.0, 1.0);

    SUBCASE("zero states give zero") {
        KGState zero(ComplexField{grid}, ComplexField{grid}, p.lambda);
        CHECK(std::abs(metric_inner_product(zero, zero, p)) == 0.0);
    }
    SUBCASE("psi_dot = 0 leaves half the plain norm") {
        ComplexField psi = random_complex(grid, 31);
        KGState state(psi, ComplexField(grid), p.lambda);
        const auto ip = metric_inner_product(state, state, p);
        const auto direct = inner_product(psi, psi);
        CHECK(ip.real() == doctest::Approx(0.5 * direct.real()).epsilon(1e-12));
        CHECK(std::abs(ip.imag()) <= 1e-12 * std::abs(ip.real()));
    }
    SUBCASE("positive on nonzero states") {
        KGState state(random_complex(grid, 41), random_complex(grid, 42), 0.7);
        ModelParams q(0.7, 1.0, 1.3);
        const auto ip = metric_inner_product(state, state, q);
        CHECK(ip.real() > 0.0);
        CHECK(std::abs(ip.imag()) <= 1e-12 * ip.real());
    }
    SUBCASE("agrees with the block quadratic form at lambda = 1") {
        KGState state(random_complex(grid, 51), random_complex(grid, 52), 1.0);
        auto eta = build_metric(grid, p);
        const auto ip = metric_inner_product(state, state, p);
        const auto block = metric_inner_product_blocks(state, state, eta);
        CHECK(std::abs(ip - block) <= 1e-12 * std::abs(ip));
    }
    SUBCASE("block form carries the lambda^2 normalisation") {
        for (double lambda : {0.5, 2.0}) {
            ModelParams q(lambda, 1.0, 1.0);
            KGState state(random_complex(grid, 61), random_complex(grid, 62),
                          lambda);
            auto eta = build_metric(grid, q);
            const auto ip = metric_inner_product(state, state, q);
            const auto block = metric_inner_product_blocks(state, state, eta);
            CHECK(block.real() ==
                  doctest::Approx(lambda * lambda * ip.real()).epsilon(1e-12));
        }
    }
}
