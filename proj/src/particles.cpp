#include "hypdiff/particles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hypdiff {

namespace {

// Small counter-style generator (splitmix64). Fully specified arithmetic,
// so streams are identical across platforms and shard layouts.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Exponential with the given rate; 1 - uniform() lies in (0, 1].
    double exponential(double rate) {
        return -std::log(1.0 - uniform()) / rate;
    }

    // Standard normal via Box-Muller.
    double normal() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }
};

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
    SplitMix64 g(master ^ (0xD1B54A32D192ED03ULL * (index + 1)));
    return g.next();
}

double draw_initial(SplitMix64& rng, const InitialDistribution& init) {
    switch (init.kind) {
        case InitialDistribution::Kind::Point:
            return init.center;
        case InitialDistribution::Kind::Gaussian:
            return init.center + init.width * rng.normal();
        case InitialDistribution::Kind::Uniform:
            return init.center + init.width * (2.0 * rng.uniform() - 1.0);
    }
    return init.center;
}

} // namespace

double kac_speed(const ModelParams& params) {
    return std::sqrt(params.K / params.lambda);
}

double kac_flip_rate(const ModelParams& params) {
    return 1.0 / (2.0 * params.lambda);
}

ParticleEnsemble simulate(std::int64_t n_particles,
                          const InitialDistribution& init,
                          const ModelParams& params, double t_final,
                          std::uint64_t seed) {
    if (n_particles < 1)
        throw std::invalid_argument("simulate: need at least one particle");
    return simulate_shard(0, n_particles, init, params, t_final, seed);
}

ParticleEnsemble simulate_shard(std::int64_t first_index, std::int64_t count,
                                const InitialDistribution& init,
                                const ModelParams& params, double t_final,
                                std::uint64_t seed) {
    if (first_index < 0 || count < 1)
        throw std::invalid_argument("simulate_shard: bad particle range");
    if (!(t_final >= 0.0))
        throw std::invalid_argument("simulate_shard: t_final must be >= 0");
    if (init.kind != InitialDistribution::Kind::Point && !(init.width > 0.0))
        throw std::invalid_argument("simulate_shard: distribution width must be > 0");

    const double c = kac_speed(params);
    const double rate = kac_flip_rate(params);

    ParticleEnsemble out;
    out.t = t_final;
    out.rng_seed = seed;
    out.positions.resize(static_cast<std::size_t>(count));
    out.velocities.resize(static_cast<std::size_t>(count));

    for (std::int64_t p = 0; p < count; ++p) {
        SplitMix64 rng(mix_seed(seed, static_cast<std::uint64_t>(first_index + p)));
        double x = draw_initial(rng, init);
        double v = (rng.next() & 1ULL) ? c : -c;
        double remaining = t_final;
        while (remaining > 0.0) {
            const double to_flip = rng.exponential(rate);
            const double hop = std::min(to_flip, remaining);
            x += v * hop;
            remaining -= hop;
            if (to_flip < remaining + hop) v = -v;
        }
        out.positions[static_cast<std::size_t>(p)] = x;
        out.velocities[static_cast<std::size_t>(p)] = v;
    }
    return out;
}

ParticleEnsemble merge(const std::vector<ParticleEnsemble>& shards) {
    if (shards.empty()) throw std::invalid_argument("merge: no shards");
    ParticleEnsemble out;
    out.t = shards.front().t;
    out.rng_seed = shards.front().rng_seed;
    for (const auto& s : shards) {
        if (s.t != out.t || s.rng_seed != out.rng_seed)
            throw std::invalid_argument("merge: shards from different runs");
        out.positions.insert(out.positions.end(), s.positions.begin(),
                             s.positions.end());
        out.velocities.insert(out.velocities.end(), s.velocities.begin(),
                              s.velocities.end());
    }
    return out;
}

Field histogram(const ParticleEnsemble& ensemble, const Grid1D& grid) {
    if (ensemble.positions.empty())
        throw std::invalid_argument("histogram: empty ensemble");

    const int n = grid.n_points();
    const double dx = grid.dx();
    std::vector<std::int64_t> counts(static_cast<std::size_t>(n), 0);

    for (double x : ensemble.positions) {
        int bin;
        if (grid.boundary() == Boundary::Periodic) {
            const double span = grid.length();
            double offset = std::fmod(x - grid.x_min(), span);
            if (offset < 0.0) offset += span;
            bin = std::min(static_cast<int>(offset / dx), n - 1);
        } else {
            bin = static_cast<int>(std::floor((x - grid.x_min()) / dx));
            bin = std::max(0, std::min(bin, n - 1));
        }
        ++counts[static_cast<std::size_t>(bin)];
    }

    const double total = static_cast<double>(ensemble.positions.size());
    Field density(grid);
    for (int i = 0; i < n; ++i)
        density[i] = static_cast<double>(counts[static_cast<std::size_t>(i)]) /
                     (total * dx);
    // End-weight quadrature on non-periodic grids makes the raw histogram
    // mass differ from 1; rescale so total_mass is exactly the unit it
    // advertises.
    const double mass = total_mass(density);
    if (mass > 0.0)
        for (int i = 0; i < n; ++i) density[i] /= mass;
    return density;
}

} // namespace hypdiff
