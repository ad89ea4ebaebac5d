#pragma once

#include "hypdiff/grid.hpp"
#include "hypdiff/params.hpp"

#include <cstdint>
#include <vector>

namespace hypdiff {

/// Starting distribution for the walkers.
struct InitialDistribution {
    enum class Kind { Point, Gaussian, Uniform };

    Kind kind = Kind::Point;
    double center = 0.0;
    double width = 0.0; // std deviation (Gaussian) or half-width (Uniform)

    static InitialDistribution point(double center) {
        return {Kind::Point, center, 0.0};
    }
    static InitialDistribution gaussian(double center, double std_dev) {
        return {Kind::Gaussian, center, std_dev};
    }
    static InitialDistribution uniform(double center, double half_width) {
        return {Kind::Uniform, center, half_width};
    }
};

struct ParticleEnsemble {
    std::vector<double> positions;
    std::vector<double> velocities; // every entry is +speed or -speed
    double t = 0.0;
    std::uint64_t rng_seed = 0;
};

/// Speed of the persistent walk, sqrt(K/lambda). Matching
/// u_tt + 2a u_t = c^2 u_xx against lambda u_tt + u_t = K u_xx gives
/// a = 1/(2 lambda) and c = sqrt(K/lambda).
double kac_speed(const ModelParams& params);

/// Velocity reversal rate a = 1/(2 lambda).
double kac_flip_rate(const ModelParams& params);

/// Persistent random walk: each particle moves at speed +-c and reverses
/// direction at exponential times with rate 1/(2 lambda). Flip times are
/// sampled exactly, so there is no time-discretisation error. Each particle
/// draws from its own seed stream derived from (seed, index), which makes
/// the result reproducible bit for bit and independent of how particles are
/// partitioned into shards.
ParticleEnsemble simulate(std::int64_t n_particles,
                          const InitialDistribution& init,
                          const ModelParams& params, double t_final,
                          std::uint64_t seed);

/// Simulate particles [first_index, first_index + count). Seeds are keyed by
/// global particle index, so concatenating shard results reproduces a full
/// run exactly, whatever the shard layout.
ParticleEnsemble simulate_shard(std::int64_t first_index, std::int64_t count,
                                const InitialDistribution& init,
                                const ModelParams& params, double t_final,
                                std::uint64_t seed);

/// Concatenate shard ensembles (same t and master seed required).
ParticleEnsemble merge(const std::vector<ParticleEnsemble>& shards);

/// Bin the ensemble into a density on the grid, normalised to unit mass.
/// Positions outside the grid wrap (periodic) or accumulate in the end bins.
Field histogram(const ParticleEnsemble& ensemble, const Grid1D& grid);

} // namespace hypdiff
