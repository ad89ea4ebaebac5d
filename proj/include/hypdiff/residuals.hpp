#pragma once

#include "hypdiff/grid.hpp"
#include "hypdiff/params.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace hypdiff {

struct ResolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FloorDominatedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Separable test function gauss(x) * cos(omega t); omega = 0 makes it time
/// independent.
struct SpaceTimeGaussian {
    double x_center = 0.0;
    double x_width = 1.0;
    double omega = 1.0;

    double value(double x, double t) const;
    double second_time_derivative(double x, double t) const;
};

/// Both sides of the small-lambda operator comparison, computed
/// independently: lhs applies the discretised operators (mass term
/// sigma^2/8) and subtracts, rhs is lambda times the norm of the analytic
/// second time derivative. rel_diff is their relative gap (absolute gap
/// when rhs vanishes).
struct OperatorLimitCheck {
    double lhs_norm = 0.0;
    double rhs_norm = 0.0;
    double rel_diff = 0.0;
};

OperatorLimitCheck bs_limit_defect(const SpaceTimeGaussian& psi,
                                   const ModelParams& params, double lambda,
                                   const Grid1D& grid, double t0,
                                   double dt_t = 1e-3);

/// Relative norm of (d^2/dtau^2 + d^2/dz^2) g - g/(4 lambda^2) for the
/// Poisson kernel g of scale tau centred at z_center, second differences
/// with step dz in both directions and analytic ghost values at the grid
/// ends. Requires dz <= tau/20.
double cauchy_residual(double lambda, double tau, const Grid1D& z_grid,
                       double z_center = 0.0);

/// Same stencils with the source term dropped: the pure discretisation
/// floor of the harmonic identity.
double harmonic_floor(double tau, const Grid1D& z_grid, double z_center = 0.0);

struct PowerLawFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Least-squares fit of log y against log x.
PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y);

struct ScanResult {
    std::vector<double> lambdas;
    std::vector<double> residuals;
    double slope = 0.0;
    double r_squared = 0.0;
    double floor = 0.0;
};

/// Sweep cauchy_residual over an increasing lambda sequence (at least 4
/// values) and fit the log-log slope. Throws FloorDominatedError when more
/// than half the expected source terms 1/(4 lambda^2) sit within a factor 10
/// of the discretisation floor.
ScanResult scan_lambda(std::span<const double> lambdas, double tau,
                       const Grid1D& z_grid);

/// Gauge factor exp(-tau/(2 lambda)) relating the damped and undamped
/// half-plane problems; tends to 1 as lambda grows.
double wick_gauge_factor(double tau, double lambda);

} // namespace hypdiff
