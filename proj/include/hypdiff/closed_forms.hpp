#pragma once

#include "hypdiff/grid.hpp"

namespace hypdiff {

/// Gaussian fundamental solution of u_tau = K u_xx.
/// Normalised to unit mass; the density has variance 2*K*tau.
double heat_kernel(double x, double tau, double K, double x0 = 0.0);

/// Half-plane Poisson kernel (1/pi) * tau / (z^2 + tau^2): the Cauchy
/// density with scale tau. Harmonic in (z, tau).
double cauchy_poisson(double z, double tau);

/// Zero-rate Black-Scholes call value (forward measure, no carry).
double bs_call_price(double spot, double strike, double sigma, double tau);

/// Mass term sigma^2/8 that makes the constant-shift Hamiltonian match the
/// zero-rate Black-Scholes generator.
double bs_mass_term(double sigma);

/// Analytic reference density used by oracles and the CLI.
struct AnalyticDensity {
    enum class Kind { HeatKernel, CauchyPoisson };

    Kind kind;
    double scale;   // K*tau for HeatKernel handled via (K, tau); scale = tau
    double K;       // diffusivity, HeatKernel only
    double center;

    static AnalyticDensity heat(double K, double tau, double center = 0.0) {
        return {Kind::HeatKernel, tau, K, center};
    }
    static AnalyticDensity cauchy(double tau, double center = 0.0) {
        return {Kind::CauchyPoisson, tau, 0.0, center};
    }

    double value(double x) const;
};

Field sample_density(const AnalyticDensity& d, const Grid1D& grid);

} // namespace hypdiff
