#include "hypdiff/closed_forms.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hypdiff {

namespace {

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

} // namespace

double heat_kernel(double x, double tau, double K, double x0) {
    if (!(tau > 0.0)) throw std::domain_error("heat_kernel: tau must be > 0");
    if (!(K > 0.0)) throw std::domain_error("heat_kernel: K must be > 0");
    const double d = x - x0;
    return std::exp(-d * d / (4.0 * K * tau)) /
           std::sqrt(4.0 * std::numbers::pi * K * tau);
}

double cauchy_poisson(double z, double tau) {
    if (!(tau > 0.0)) throw std::domain_error("cauchy_poisson: tau must be > 0");
    return tau / (std::numbers::pi * (z * z + tau * tau));
}

double bs_call_price(double spot, double strike, double sigma, double tau) {
    if (!(spot > 0.0) || !(strike > 0.0))
        throw std::domain_error("bs_call_price: prices must be > 0");
    if (!(sigma > 0.0) || !(tau > 0.0))
        throw std::domain_error("bs_call_price: sigma and tau must be > 0");
    const double vol = sigma * std::sqrt(tau);
    const double d1 = (std::log(spot / strike) + 0.5 * vol * vol) / vol;
    const double d2 = d1 - vol;
    return spot * norm_cdf(d1) - strike * norm_cdf(d2);
}

double bs_mass_term(double sigma) {
    if (!(sigma > 0.0)) throw std::domain_error("bs_mass_term: sigma must be > 0");
    return sigma * sigma / 8.0;
}

double AnalyticDensity::value(double x) const {
    switch (kind) {
        case Kind::HeatKernel: return heat_kernel(x, scale, K, center);
        case Kind::CauchyPoisson: return cauchy_poisson(x - center, scale);
    }
    return 0.0;
}

Field sample_density(const AnalyticDensity& d, const Grid1D& grid) {
    return sample(grid, [&](double x) { return d.value(x); });
}

} // namespace hypdiff
