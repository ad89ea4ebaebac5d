#pragma once

#include "hypdiff/grid.hpp"
#include "hypdiff/params.hpp"

#include <complex>
#include <utility>
#include <vector>

namespace hypdiff {

/// Dense 2x2 complex matrix, row major: [[a, b], [c, d]].
struct Mat2 {
    std::complex<double> a{}, b{}, c{}, d{};

    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d,
                c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Mat2 operator-(const Mat2& o) const {
        return {a - o.a, b - o.b, c - o.c, d - o.d};
    }
    Mat2 adjoint() const {
        return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)};
    }
    std::complex<double> trace() const { return a + d; }
    std::complex<double> det() const { return a * d - b * c; }
    double frobenius_norm() const;

    /// (v0, v1) -> M (v0, v1).
    void apply(std::complex<double>& v0, std::complex<double>& v1) const {
        const auto w0 = a * v0 + b * v1;
        const auto w1 = c * v0 + d * v1;
        v0 = w0;
        v1 = w1;
    }
};

/// Wavenumbers in FFT order: 2*pi*m/L for m = 0..n/2, then the negative
/// frequencies. Requires a periodic grid.
std::vector<double> fourier_wavenumbers(const Grid1D& grid);

/// Two-component state (Psi1, Psi2) = (psi + i*lambda*psi_dot,
/// psi - i*lambda*psi_dot) on a shared periodic grid.
class KGState {
public:
    KGState(const ComplexField& psi, const ComplexField& psi_dot, double lambda);

    static KGState from_components(ComplexField psi1, ComplexField psi2,
                                   double lambda);

    const ComplexField& component1() const { return psi1_; }
    const ComplexField& component2() const { return psi2_; }
    double lambda() const { return lambda_; }
    const Grid1D& grid() const { return psi1_.grid; }

    /// psi = (Psi1 + Psi2)/2.
    ComplexField psi() const;
    /// psi_dot = (Psi1 - Psi2)/(2 i lambda).
    ComplexField psi_dot() const;

private:
    KGState(ComplexField p1, ComplexField p2, double lambda, int);
    ComplexField psi1_, psi2_;
    double lambda_;
};

/// Two-component Hamiltonian diagonalised over Fourier modes: one 2x2 block
/// per wavenumber, built from the symbol D_k = k^2 + mu^2. Every block is
/// traceless with determinant -D_k, so its eigenvalues are +-sqrt(D_k).
class KGOperator {
public:
    KGOperator(Grid1D grid, ModelParams params, std::vector<double> k,
               std::vector<double> D, std::vector<Mat2> blocks)
        : grid_(std::move(grid)), params_(params), k_(std::move(k)),
          D_(std::move(D)), blocks_(std::move(blocks)) {}

    const Grid1D& grid() const { return grid_; }
    const ModelParams& params() const { return params_; }
    int mode_count() const { return static_cast<int>(blocks_.size()); }
    double wavenumber(int m) const { return k_[static_cast<std::size_t>(m)]; }
    double symbol(int m) const { return D_[static_cast<std::size_t>(m)]; }
    const Mat2& block(int m) const { return blocks_[static_cast<std::size_t>(m)]; }

private:
    Grid1D grid_;
    ModelParams params_;
    std::vector<double> k_, D_;
    std::vector<Mat2> blocks_;
};

/// Per-mode blocks of the positive-definite metric
/// (1/8) [[lambda^2 + 1/D_k, lambda^2 - 1/D_k], [lambda^2 - 1/D_k,
/// lambda^2 + 1/D_k]], with eigenvalues lambda^2/4 and 1/(4 D_k).
class MetricBlocks {
public:
    MetricBlocks(Grid1D grid, ModelParams params, std::vector<double> D,
                 std::vector<Mat2> blocks)
        : grid_(std::move(grid)), params_(params), D_(std::move(D)),
          blocks_(std::move(blocks)) {}

    const Grid1D& grid() const { return grid_; }
    const ModelParams& params() const { return params_; }
    int mode_count() const { return static_cast<int>(blocks_.size()); }
    double symbol(int m) const { return D_[static_cast<std::size_t>(m)]; }
    const Mat2& block(int m) const { return blocks_[static_cast<std::size_t>(m)]; }
    Mat2& block(int m) { return blocks_[static_cast<std::size_t>(m)]; }

private:
    Grid1D grid_;
    ModelParams params_;
    std::vector<double> D_;
    std::vector<Mat2> blocks_;
};

KGOperator build_hamiltonian(const Grid1D& grid, const ModelParams& params);

MetricBlocks build_metric(const Grid1D& grid, const ModelParams& params);

/// Max over modes of the Frobenius norm of H_k^dagger eta_k - eta_k H_k.
double check_pseudo_hermiticity(const KGOperator& H, const MetricBlocks& eta);

/// Apply the exact propagator exp(-i H t) mode by mode. Since each block
/// squares to D_k * I, the propagator is cos(w t) I - i sin(w t)/w * H_k
/// with w = sqrt(D_k); no time stepping is involved.
KGState evolve_exact(const KGState& state, const KGOperator& H, double t);

/// Inner product (1/2) (<phi|psi> + <phi_dot | D^{-1} psi_dot>) evaluated
/// spectrally; real and positive when both arguments are the same nonzero
/// state.
std::complex<double> metric_inner_product(const KGState& a, const KGState& b,
                                          const ModelParams& params);

/// Quadratic form <Phi, eta Psi> on component vectors, evaluated per mode.
/// Equals lambda^2 times metric_inner_product for matching parameters.
std::complex<double> metric_inner_product_blocks(const KGState& a,
                                                 const KGState& b,
                                                 const MetricBlocks& eta);

/// Plain component-space norm <Psi|Psi> (not conserved by the evolution).
double l2_norm_sq(const KGState& state);

/// Eigenvalues of one Hamiltonian block, computed from its trace and
/// determinant.
std::pair<std::complex<double>, std::complex<double>>
mode_eigenvalues(const KGOperator& H, int mode);

} // namespace hypdiff
