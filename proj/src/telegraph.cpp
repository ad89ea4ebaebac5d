#include "hypdiff/telegraph.hpp"

#include <cmath>

namespace hypdiff {

namespace {

// Largest spatial symbol the update sees: K * max eigenvalue of -L plus the
// mass term. The three-point stencil tops out at 4/dx^2.
double max_symbol(const Grid1D& grid, const ModelParams& params) {
    return 4.0 * params.K / (grid.dx() * grid.dx()) + params.mu_squared();
}

} // namespace

StabilityReport check_stability(const Grid1D& grid, const ModelParams& params,
                                double dt) {
    // Von Neumann analysis of the paired update. Per Fourier mode with
    // symbol s = K w^2 + mu^2, the amplification matrix
    //   G = [[1 - a s, dt - dt^2/(2 lambda)], [-s dt/lambda, 1 - dt/lambda]]
    // (a = dt^2/(2 lambda)) has det G = 1 - dt/lambda + a s, so complex mode
    // pairs keep |g| <= 1 only when s dt <= 2; the real-root branch adds
    // dt <= 2 lambda. The wave-CFL ratio alone does not bound the scheme,
    // which is why dt_max is the diffusion-type limit below.
    StabilityReport r;
    r.dt = dt;
    r.wave_speed = std::sqrt(params.K / params.lambda);
    r.cfl_ratio = r.wave_speed * dt / grid.dx();
    r.dt_max =
        0.9 * std::min(2.0 / max_symbol(grid, params), 2.0 * params.lambda);
    r.stable = dt > 0.0 && dt <= r.dt_max * (1.0 + 1e-12);
    return r;
}

double suggest_dt(const Grid1D& grid, const ModelParams& params, double safety) {
    return safety *
           std::min(2.0 / max_symbol(grid, params), 2.0 * params.lambda);
}

TelegraphState step(const TelegraphState& state, const ModelParams& params,
                    double dt, long step_index) {
    const auto report = check_stability(state.u.grid, params, dt);
    if (!report.stable)
        throw StabilityError(
            "telegraph step refused: dt=" + std::to_string(dt) +
                " cfl_ratio=" + std::to_string(report.cfl_ratio) +
                " dt_max=" + std::to_string(report.dt_max),
            report);

    const Field lap = laplacian(state.u);
    const double lam = params.lambda;
    const double mu2 = params.mu_squared();
    const double coeff_v = dt - dt * dt / (2.0 * lam);
    const double coeff_acc_u = dt * dt / (2.0 * lam);
    const double coeff_acc_v = dt / lam;

    Field u_next(state.u.grid);
    Field v_next(state.u.grid);
    for (int i = 0; i < state.u.size(); ++i) {
        // Acceleration lambda * u_tautau = K u_xx - mu^2 u - u_tau, split so
        // that the v-independent part feeds both updates.
        const double forcing = params.K * lap[i] - mu2 * state.u[i];
        u_next[i] = state.u[i] + coeff_v * state.v[i] + coeff_acc_u * forcing;
        v_next[i] = state.v[i] + coeff_acc_v * (forcing - state.v[i]);
    }

    if (!all_finite(u_next) || !all_finite(v_next))
        throw BlowupError(
            "telegraph step " + std::to_string(step_index) +
                " produced a non-finite value (tau=" + std::to_string(state.tau) + ")",
            step_index);

    return TelegraphState(std::move(u_next), std::move(v_next), state.tau + dt);
}

DensitySeries evolve(const TelegraphState& initial, const ModelParams& params,
                     double tau_final, double dt, int snapshot_stride) {
    if (!(tau_final >= initial.tau))
        throw std::invalid_argument("evolve: tau_final must be >= initial tau");
    if (!(dt > 0.0)) throw std::invalid_argument("evolve: dt must be > 0");

    DensitySeries series;
    const double horizon = tau_final - initial.tau;
    const long n_steps = static_cast<long>(std::ceil(horizon / dt - 1e-12));
    if (n_steps == 0) {
        series.append(initial.tau, initial.u);
        return series;
    }
    const double dt_eff = horizon / static_cast<double>(n_steps);

    TelegraphState state = initial;
    for (long n = 1; n <= n_steps; ++n) {
        state = step(state, params, dt_eff, n);
        const bool at_stride = snapshot_stride > 0 && n % snapshot_stride == 0;
        if (at_stride || n == n_steps)
            series.append(state.tau, state.u);
    }
    return series;
}

} // namespace hypdiff
