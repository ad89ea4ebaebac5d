#include "hypdiff/spectral_kg.hpp"

#include "hypdiff/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hypdiff {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

void require_periodic(const Grid1D& grid, const char* who) {
    if (grid.boundary() != Boundary::Periodic)
        throw std::invalid_argument(std::string(who) + ": periodic grid required");
}

void require_massive(const ModelParams& params, const char* who) {
    // mu = 0 makes the k = 0 symbol vanish and 1/D singular.
    if (!(params.mu > 0.0))
        throw std::domain_error(std::string(who) + ": mu must be > 0");
}

} // namespace

double Mat2::frobenius_norm() const {
    return std::sqrt(std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d));
}

std::vector<double> fourier_wavenumbers(const Grid1D& grid) {
    require_periodic(grid, "fourier_wavenumbers");
    const int n = grid.n_points();
    const double base = 2.0 * std::numbers::pi / grid.length();
    std::vector<double> k(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) {
        const int folded = (m <= n / 2) ? m : m - n;
        k[static_cast<std::size_t>(m)] = base * folded;
    }
    return k;
}

KGState::KGState(const ComplexField& psi, const ComplexField& psi_dot,
                 double lambda)
    : psi1_(psi.grid), psi2_(psi.grid), lambda_(lambda) {
    if (!(psi.grid == psi_dot.grid))
        throw std::invalid_argument("KGState: psi and psi_dot on different grids");
    require_periodic(psi.grid, "KGState");
    if (lambda == 0.0) throw std::invalid_argument("KGState: lambda must be nonzero");
    for (int i = 0; i < psi.size(); ++i) {
        const auto rot = kI * lambda_ * psi_dot[i];
        psi1_[i] = psi[i] + rot;
        psi2_[i] = psi[i] - rot;
    }
}

KGState::KGState(ComplexField p1, ComplexField p2, double lambda, int)
    : psi1_(std::move(p1)), psi2_(std::move(p2)), lambda_(lambda) {}

KGState KGState::from_components(ComplexField psi1, ComplexField psi2,
                                 double lambda) {
    if (!(psi1.grid == psi2.grid))
        throw std::invalid_argument("KGState: components on different grids");
    require_periodic(psi1.grid, "KGState");
    if (lambda == 0.0) throw std::invalid_argument("KGState: lambda must be nonzero");
    return KGState(std::move(psi1), std::move(psi2), lambda, 0);
}

ComplexField KGState::psi() const {
    ComplexField out(psi1_.grid);
    for (int i = 0; i < out.size(); ++i) out[i] = 0.5 * (psi1_[i] + psi2_[i]);
    return out;
}

ComplexField KGState::psi_dot() const {
    ComplexField out(psi1_.grid);
    const std::complex<double> scale = 1.0 / (2.0 * kI * lambda_);
    for (int i = 0; i < out.size(); ++i) out[i] = scale * (psi1_[i] - psi2_[i]);
    return out;
}

KGOperator build_hamiltonian(const Grid1D& grid, const ModelParams& params) {
    require_periodic(grid, "build_hamiltonian");
    require_massive(params, "build_hamiltonian");
    const double lam = params.lambda;
    const double inv_lam = 1.0 / lam;
    auto k = fourier_wavenumbers(grid);
    std::vector<double> D(k.size());
    std::vector<Mat2> blocks(k.size());
    for (std::size_t m = 0; m < k.size(); ++m) {
        D[m] = k[m] * k[m] + params.mu_squared();
        const double p = lam * D[m];
        blocks[m] = {0.5 * (p + inv_lam), 0.5 * (p - inv_lam),
                     0.5 * (-p + inv_lam), 0.5 * (-p - inv_lam)};
    }
    return KGOperator(grid, params, std::move(k), std::move(D), std::move(blocks));
}

MetricBlocks build_metric(const Grid1D& grid, const ModelParams& params) {
    require_periodic(grid, "build_metric");
    if (!(params.mu > 0.0))
        throw std::domain_error("build_metric: singular metric at mu = 0");
    const double lam2 = params.lambda * params.lambda;
    auto k = fourier_wavenumbers(grid);
    std::vector<double> D(k.size());
    std::vector<Mat2> blocks(k.size());
    for (std::size_t m = 0; m < k.size(); ++m) {
        D[m] = k[m] * k[m] + params.mu_squared();
        const double inv_D = 1.0 / D[m];
        blocks[m] = {0.125 * (lam2 + inv_D), 0.125 * (lam2 - inv_D),
                     0.125 * (lam2 - inv_D), 0.125 * (lam2 + inv_D)};
    }
    return MetricBlocks(grid, params, std::move(D), std::move(blocks));
}

double check_pseudo_hermiticity(const KGOperator& H, const MetricBlocks& eta) {
    if (!(H.grid() == eta.grid()))
        throw std::invalid_argument("check_pseudo_hermiticity: grid mismatch");
    if (H.mode_count() != eta.mode_count())
        throw std::invalid_argument("check_pseudo_hermiticity: mode mismatch");
    double worst = 0.0;
    for (int m = 0; m < H.mode_count(); ++m) {
        const Mat2 defect =
            H.block(m).adjoint() * eta.block(m) - eta.block(m) * H.block(m);
        worst = std::max(worst, defect.frobenius_norm());
    }
    return worst;
}

KGState evolve_exact(const KGState& state, const KGOperator& H, double t) {
    if (!(state.grid() == H.grid()))
        throw std::invalid_argument("evolve_exact: state and operator grids differ");
    require_massive(H.params(), "evolve_exact");

    auto c1 = fft(state.component1().values);
    auto c2 = fft(state.component2().values);
    for (int m = 0; m < H.mode_count(); ++m) {
        const double w = std::sqrt(H.symbol(m));
        const std::complex<double> cos_wt = std::cos(w * t);
        const std::complex<double> scale = -kI * std::sin(w * t) / w;
        const Mat2& h = H.block(m);
        Mat2 U{cos_wt + scale * h.a, scale * h.b,
               scale * h.c, cos_wt + scale * h.d};
        const std::size_t i = static_cast<std::size_t>(m);
        U.apply(c1[i], c2[i]);
    }
    ComplexField f1(state.grid(), ifft(c1));
    ComplexField f2(state.grid(), ifft(c2));
    return KGState::from_components(std::move(f1), std::move(f2), state.lambda());
}

std::complex<double> metric_inner_product(const KGState& a, const KGState& b,
                                          const ModelParams& params) {
    if (!(a.grid() == b.grid()))
        throw std::invalid_argument("metric_inner_product: grid mismatch");
    require_massive(params, "metric_inner_product");

    const auto phi = a.psi();
    const auto psi = b.psi();
    const std::complex<double> term1 = inner_product(phi, psi);

    // Second term: <phi_dot, D^{-1} psi_dot> with D^{-1} applied spectrally.
    const auto phi_dot = a.psi_dot();
    auto psi_dot_hat = fft(b.psi_dot().values);
    const auto k = fourier_wavenumbers(a.grid());
    for (std::size_t m = 0; m < k.size(); ++m)
        psi_dot_hat[m] /= (k[m] * k[m] + params.mu_squared());
    const ComplexField conv(a.grid(), ifft(psi_dot_hat));
    const std::complex<double> term2 = inner_product(phi_dot, conv);

    return 0.5 * (term1 + term2);
}

std::complex<double> metric_inner_product_blocks(const KGState& a,
                                                 const KGState& b,
                                                 const MetricBlocks& eta) {
    if (!(a.grid() == b.grid()) || !(a.grid() == eta.grid()))
        throw std::invalid_argument("metric_inner_product_blocks: grid mismatch");
    auto a1 = fft(a.component1().values);
    auto a2 = fft(a.component2().values);
    auto b1 = fft(b.component1().values);
    auto b2 = fft(b.component2().values);
    std::complex<double> acc = 0.0;
    for (int m = 0; m < eta.mode_count(); ++m) {
        const std::size_t i = static_cast<std::size_t>(m);
        auto w1 = b1[i], w2 = b2[i];
        eta.block(m).apply(w1, w2);
        acc += std::conj(a1[i]) * w1 + std::conj(a2[i]) * w2;
    }
    // Parseval: dx * sum_x = (dx / n) * sum_k of the transformed product.
    return acc * (a.grid().dx() / static_cast<double>(a.grid().n_points()));
}

double l2_norm_sq(const KGState& state) {
    const auto& c1 = state.component1();
    const auto& c2 = state.component2();
    double s = 0.0;
    for (int i = 0; i < c1.size(); ++i) s += std::norm(c1[i]) + std::norm(c2[i]);
    return s * state.grid().dx();
}

std::pair<std::complex<double>, std::complex<double>>
mode_eigenvalues(const KGOperator& H, int mode) {
    const Mat2& h = H.block(mode);
    const std::complex<double> half_tr = 0.5 * h.trace();
    const std::complex<double> disc = std::sqrt(half_tr * half_tr - h.det());
    return {half_tr + disc, half_tr - disc};
}

} // namespace hypdiff
