#include "hypdiff/residuals.hpp"

#include "hypdiff/closed_forms.hpp"

#include <cmath>
#include <string>

namespace hypdiff {

namespace {

double l2_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// Norm of the z-direction plus tau-direction second differences applied to
// the Poisson kernel, minus source/(4 lambda^2); lambda <= 0 drops the
// source term. Ghost nodes one step beyond each end are sampled
// analytically. Returns (||residual||, ||g||).
std::pair<double, double> kernel_residual(double lambda, double tau,
                                          const Grid1D& grid,
                                          double z_center) {
    if (!(tau > 0.0)) throw std::invalid_argument("cauchy_residual: tau must be > 0");
    const double h = grid.dx();
    if (!(h <= tau / 20.0))
        throw ResolutionError("cauchy_residual: grid spacing " + std::to_string(h) +
                              " does not resolve scale " + std::to_string(tau) +
                              " (need dz <= tau/20)");

    const int n = grid.n_points();
    const double inv_h2 = 1.0 / (h * h);
    const double source = (lambda > 0.0) ? 1.0 / (4.0 * lambda * lambda) : 0.0;

    std::vector<double> g_mid(static_cast<std::size_t>(n + 2));
    std::vector<double> g_lo(static_cast<std::size_t>(n));
    std::vector<double> g_hi(static_cast<std::size_t>(n));
    for (int i = -1; i <= n; ++i)
        g_mid[static_cast<std::size_t>(i + 1)] =
            cauchy_poisson(grid.coordinate(i) - z_center, tau);
    for (int i = 0; i < n; ++i) {
        g_lo[static_cast<std::size_t>(i)] =
            cauchy_poisson(grid.coordinate(i) - z_center, tau - h);
        g_hi[static_cast<std::size_t>(i)] =
            cauchy_poisson(grid.coordinate(i) - z_center, tau + h);
    }

    std::vector<double> residual(static_cast<std::size_t>(n));
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const std::size_t j = static_cast<std::size_t>(i);
        const double centre = g_mid[j + 1];
        const double d2z = (g_mid[j] - 2.0 * centre + g_mid[j + 2]) * inv_h2;
        const double d2tau = (g_lo[j] - 2.0 * centre + g_hi[j]) * inv_h2;
        residual[j] = d2z + d2tau - source * centre;
        g[j] = centre;
    }
    return {l2_norm(residual), l2_norm(g)};
}

} // namespace

double SpaceTimeGaussian::value(double x, double t) const {
    const double d = (x - x_center) / x_width;
    return std::exp(-0.5 * d * d) * std::cos(omega * t);
}

double SpaceTimeGaussian::second_time_derivative(double x, double t) const {
    const double d = (x - x_center) / x_width;
    return -omega * omega * std::exp(-0.5 * d * d) * std::cos(omega * t);
}

OperatorLimitCheck bs_limit_defect(const SpaceTimeGaussian& psi,
                                   const ModelParams& params, double lambda,
                                   const Grid1D& grid, double t0, double dt_t) {
    if (!(lambda >= 0.0))
        throw std::invalid_argument("bs_limit_defect: lambda must be >= 0");
    if (!(dt_t > 0.0))
        throw std::invalid_argument("bs_limit_defect: dt_t must be > 0");

    const double half_sigma2 = 0.5 * params.sigma * params.sigma;
    const double mu2 = bs_mass_term(params.sigma);

    const Field prev = sample(grid, [&](double x) { return psi.value(x, t0 - dt_t); });
    const Field mid = sample(grid, [&](double x) { return psi.value(x, t0); });
    const Field next = sample(grid, [&](double x) { return psi.value(x, t0 + dt_t); });
    const Field lap = laplacian(mid);

    const double inv_dt2 = 1.0 / (dt_t * dt_t);
    Field difference(grid);
    for (int i = 0; i < grid.n_points(); ++i) {
        const double d2t = (prev[i] - 2.0 * mid[i] + next[i]) * inv_dt2;
        const double spatial = -half_sigma2 * lap[i] + mu2 * mid[i];
        const double full_op = lambda * d2t + spatial;
        difference[i] = full_op - spatial;
    }

    const Field d2t_analytic =
        sample(grid, [&](double x) { return psi.second_time_derivative(x, t0); });

    OperatorLimitCheck out;
    out.lhs_norm = std::sqrt(inner_product(difference, difference));
    out.rhs_norm =
        lambda * std::sqrt(inner_product(d2t_analytic, d2t_analytic));
    out.rel_diff = (out.rhs_norm > 0.0)
                       ? std::abs(out.lhs_norm - out.rhs_norm) / out.rhs_norm
                       : out.lhs_norm;
    return out;
}

double cauchy_residual(double lambda, double tau, const Grid1D& z_grid,
                       double z_center) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("cauchy_residual: lambda must be > 0");
    const auto [r, g] = kernel_residual(lambda, tau, z_grid, z_center);
    return r / g;
}

double harmonic_floor(double tau, const Grid1D& z_grid, double z_center) {
    const auto [r, g] = kernel_residual(0.0, tau, z_grid, z_center);
    return r / g;
}

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_power_law: need >= 2 matching points");
    const std::size_t n = x.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw std::invalid_argument("fit_power_law: data must be positive");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (!(sxx > 0.0))
        throw std::invalid_argument("fit_power_law: x values are all equal");

    PowerLawFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = ly[i] - (fit.intercept + fit.slope * lx[i]);
        ss_res += e * e;
    }
    fit.r_squared = (syy > 0.0) ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

ScanResult scan_lambda(std::span<const double> lambdas, double tau,
                       const Grid1D& z_grid) {
    if (lambdas.size() < 4)
        throw std::invalid_argument("scan_lambda: need at least 4 lambda values");
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (!(lambdas[i] > 0.0))
            throw std::invalid_argument("scan_lambda: lambdas must be > 0");
        if (i > 0 && !(lambdas[i] > lambdas[i - 1]))
            throw std::invalid_argument("scan_lambda: lambdas must be increasing");
    }

    ScanResult out;
    out.lambdas.assign(lambdas.begin(), lambdas.end());
    out.floor = harmonic_floor(tau, z_grid);

    std::size_t dominated = 0;
    for (double lambda : lambdas) {
        out.residuals.push_back(cauchy_residual(lambda, tau, z_grid));
        if (1.0 / (4.0 * lambda * lambda) < 10.0 * out.floor) ++dominated;
    }
    if (2 * dominated > lambdas.size())
        throw FloorDominatedError(
            "scan_lambda: discretisation floor " + std::to_string(out.floor) +
            " dominates most residuals; refine the z-grid");

    const auto fit = fit_power_law(out.lambdas, out.residuals);
    out.slope = fit.slope;
    out.r_squared = fit.r_squared;
    return out;
}

double wick_gauge_factor(double tau, double lambda) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("wick_gauge_factor: lambda must be > 0");
    return std::exp(-tau / (2.0 * lambda));
}

} // namespace hypdiff
