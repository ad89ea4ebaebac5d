#pragma once

#include "hypdiff/grid.hpp"
#include "hypdiff/params.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypdiff {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind { Evolve, KgCheck, Mc, ResidualScan, Limits, Martingale };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(const std::string& name);

enum class OutputFormat { Csv, Summary };

struct GridSpec {
    int n = 0;
    double x_min = 0.0;
    double x_max = 0.0;
    Boundary boundary = Boundary::Periodic;

    Grid1D make() const { return Grid1D(n, x_min, x_max, boundary); }
};

struct RawParams {
    double lambda = 1.0;
    double sigma = 1.0;
    double mu = 0.0;
    std::optional<double> K;

    ModelParams make() const {
        return K ? ModelParams(lambda, sigma, mu, *K)
                 : ModelParams(lambda, sigma, mu);
    }
    ModelParams make_with_lambda(double lam) const {
        return K ? ModelParams(lam, sigma, mu, *K) : ModelParams(lam, sigma, mu);
    }
};

struct TimeSpec {
    double tau_final = 0.0;
    std::optional<double> dt; // nullopt: resolve via check_stability ("auto")
};

/// Initial condition spec shared by the runners; which kinds are accepted
/// depends on the experiment.
struct InitSpec {
    std::string kind = "gaussian"; // gaussian | point | uniform | heat_kernel | zero
    double center = 0.0;
    double width = 1.0;
    double tau0 = 0.01; // heat_kernel age
};

struct KgLattice {
    std::vector<double> lambdas{0.5, 1.0, 2.0};
    std::vector<double> mus{0.5, 1.0, 2.0};
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::Evolve;
    RawParams params;
    GridSpec grid;
    TimeSpec time;
    InitSpec init;
    std::uint64_t seed = 0;
    std::string out_path;
    OutputFormat format = OutputFormat::Csv;
    int snapshot_stride = 0;

    // mc
    std::int64_t n_particles = 100000;

    // residual-scan / limits
    std::vector<double> lambdas;
    double tau = 1.0;

    // kg-check
    KgLattice lattice;
    int random_states = 20;
    double evolve_t = 10.0;
    double max_defect = 1e-12;
    double max_norm_drift = 1e-10;

    // limits assertions
    double init_tau = 0.01;
    double max_rel_diff = 1e-6;
    double max_l1 = 2e-2;

    // martingale
    double x0 = 0.0;
    InitSpec psi;
    InitSpec psi_dot;
};

/// Parse a strict-schema JSON config. Unknown keys anywhere are rejected;
/// diagnostics name the offending field. When `expected` is given the
/// config's experiment (if present) must agree with it.
ExperimentConfig load_config(const std::string& path,
                             std::optional<ExperimentKind> expected = {});

/// CLI flag overrides applied after parsing.
void apply_overrides(ExperimentConfig& config,
                     const std::optional<std::string>& out,
                     const std::optional<std::uint64_t>& seed,
                     const std::optional<std::string>& format);

/// Execute the experiment, write its result file(s) plus a
/// <out>.manifest.json run manifest. Returns the process exit status
/// (0 unless a configured assertion failed).
int run(const ExperimentConfig& config);

/// Compare two result files of the same kind within a tolerance: series
/// tables by per-snapshot L1 distance, other tables and summaries field by
/// field. Prints a report; returns 0 on match.
int compare_files(const std::string& path_a, const std::string& path_b,
                  double tolerance);

} // namespace hypdiff
