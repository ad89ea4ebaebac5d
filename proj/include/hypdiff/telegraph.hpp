#pragma once

#include "hypdiff/grid.hpp"
#include "hypdiff/measures.hpp"
#include "hypdiff/params.hpp"

#include <stdexcept>
#include <string>

namespace hypdiff {

/// Paired state (u, v = du/dtau) of the damped wave equation
/// u_tau + lambda u_tautau = K u_xx - mu^2 u, marched in Wick time tau.
struct TelegraphState {
    Field u;
    Field v;
    double tau = 0.0;

    TelegraphState(Field u_, Field v_, double tau_ = 0.0)
        : u(std::move(u_)), v(std::move(v_)), tau(tau_) {
        if (!(u.grid == v.grid))
            throw std::invalid_argument("TelegraphState: u and v on different grids");
        if (!(tau >= 0.0))
            throw std::invalid_argument("TelegraphState: tau must be >= 0");
    }

    /// Convenience start with v = 0.
    static TelegraphState at_rest(Field u0, double tau = 0.0) {
        Field v(u0.grid);
        return TelegraphState(std::move(u0), std::move(v), tau);
    }
};

/// Outcome of the von Neumann step-size check for the explicit scheme.
/// wave_speed = sqrt(K/lambda) and cfl_ratio = wave_speed*dt/dx are reported
/// for diagnostics, but the binding bound for this two-field update is
/// diffusive: every mode symbol s = K w^2 + mu^2 must satisfy s*dt <= 2,
/// together with the damping bound dt <= 2*lambda. dt_max carries a 0.9
/// safety factor on both.
struct StabilityReport {
    double dt_max = 0.0;
    double wave_speed = 0.0;
    double cfl_ratio = 0.0;
    double dt = 0.0;
    bool stable = false;
};

struct StabilityError : std::runtime_error {
    StabilityReport report;
    StabilityError(const std::string& msg, StabilityReport r)
        : std::runtime_error(msg), report(r) {}
};

struct BlowupError : std::runtime_error {
    long step_index;
    BlowupError(const std::string& msg, long index)
        : std::runtime_error(msg), step_index(index) {}
};

StabilityReport check_stability(const Grid1D& grid, const ModelParams& params,
                                double dt);

/// Largest comfortable step: min(2/s_max, 2*lambda) scaled by `safety`.
double suggest_dt(const Grid1D& grid, const ModelParams& params,
                  double safety = 0.9);

/// One explicit update:
///   u' = u + (dt - dt^2/(2 lambda)) v + (dt^2/(2 lambda)) (K L u - mu^2 u)
///   v' = v + (dt/lambda) (K L u - mu^2 u - v)
/// Refuses to step when check_stability fails; throws BlowupError when a
/// non-finite value appears (step_index only labels the error message).
TelegraphState step(const TelegraphState& state, const ModelParams& params,
                    double dt, long step_index = 0);

/// March to tau_final, recording a snapshot every `snapshot_stride` steps
/// (stride <= 0 records the final state only; the final state is always
/// recorded). dt is shrunk uniformly so an integer number of steps lands
/// exactly on tau_final.
DensitySeries evolve(const TelegraphState& initial, const ModelParams& params,
                     double tau_final, double dt, int snapshot_stride = 0);

} // namespace hypdiff
