#pragma once

#include <stdexcept>

namespace hypdiff {

/// Model parameters shared by every solver in the library.
///
/// lambda is the flux relaxation time of the hyperbolic diffusion
/// u_t + lambda*u_tt = K*u_xx, sigma the volatility of the log-price,
/// mu the mass parameter of the spectral toolkit, and K the diffusivity.
/// When K is not given it defaults to sigma^2/2, the diffusivity that
/// matches the log-price convention.
struct ModelParams {
    double lambda;
    double sigma;
    double mu;
    double K;

    ModelParams(double lambda_, double sigma_, double mu_ = 0.0)
        : ModelParams(lambda_, sigma_, mu_, 0.5 * sigma_ * sigma_) {}

    ModelParams(double lambda_, double sigma_, double mu_, double K_)
        : lambda(lambda_), sigma(sigma_), mu(mu_), K(K_) {
        if (!(lambda > 0.0))
            throw std::invalid_argument("ModelParams: lambda must be > 0");
        if (!(sigma > 0.0))
            throw std::invalid_argument("ModelParams: sigma must be > 0");
        if (!(mu >= 0.0))
            throw std::invalid_argument("ModelParams: mu must be >= 0");
        if (!(K > 0.0))
            throw std::invalid_argument("ModelParams: K must be > 0");
    }

    double mu_squared() const { return mu * mu; }
};

} // namespace hypdiff
