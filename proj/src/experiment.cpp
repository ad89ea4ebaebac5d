#include "hypdiff/experiment.hpp"

#include "hypdiff/closed_forms.hpp"
#include "hypdiff/io.hpp"
#include "hypdiff/measures.hpp"
#include "hypdiff/particles.hpp"
#include "hypdiff/residuals.hpp"
#include "hypdiff/spectral_kg.hpp"
#include "hypdiff/telegraph.hpp"
#include "hypdiff/version.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace hypdiff {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Strict JSON helpers
// ---------------------------------------------------------------------------

void require_object(const json& node, const std::string& where) {
    if (!node.is_object())
        throw ConfigError(where + ": expected an object");
}

void check_keys(const json& node, const std::set<std::string>& allowed,
                const std::string& where) {
    require_object(node, where);
    for (const auto& [key, value] : node.items()) {
        (void)value;
        if (!allowed.count(key))
            throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

double get_number(const json& node, const std::string& key,
                  const std::string& where) {
    if (!node.contains(key))
        throw ConfigError(where + ": missing key '" + key + "'");
    if (!node[key].is_number())
        throw ConfigError(where + "." + key + ": expected a number");
    return node[key].get<double>();
}

double get_number_or(const json& node, const std::string& key, double fallback,
                     const std::string& where) {
    if (!node.contains(key)) return fallback;
    if (!node[key].is_number())
        throw ConfigError(where + "." + key + ": expected a number");
    return node[key].get<double>();
}

std::string get_string(const json& node, const std::string& key,
                       const std::string& where) {
    if (!node.contains(key))
        throw ConfigError(where + ": missing key '" + key + "'");
    if (!node[key].is_string())
        throw ConfigError(where + "." + key + ": expected a string");
    return node[key].get<std::string>();
}

std::vector<double> get_number_list(const json& node, const std::string& key,
                                    const std::string& where) {
    if (!node.contains(key))
        throw ConfigError(where + ": missing key '" + key + "'");
    if (!node[key].is_array())
        throw ConfigError(where + "." + key + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : node[key]) {
        if (!v.is_number())
            throw ConfigError(where + "." + key + ": expected numbers only");
        out.push_back(v.get<double>());
    }
    return out;
}

Boundary boundary_from_string(const std::string& name, const std::string& where) {
    if (name == "periodic") return Boundary::Periodic;
    if (name == "reflecting") return Boundary::Reflecting;
    if (name == "absorbing") return Boundary::Absorbing;
    throw ConfigError(where + ": unknown boundary '" + name +
                      "' (periodic|reflecting|absorbing)");
}

std::string boundary_to_string(Boundary b) {
    switch (b) {
        case Boundary::Periodic: return "periodic";
        case Boundary::Reflecting: return "reflecting";
        case Boundary::Absorbing: return "absorbing";
    }
    return "periodic";
}

GridSpec parse_grid(const json& node, const std::string& where) {
    check_keys(node, {"n", "x_min", "x_max", "boundary"}, where);
    GridSpec g;
    const double n = get_number(node, "n", where);
    if (n < 3 || n != std::floor(n))
        throw ConfigError(where + ".n: expected an integer >= 3");
    g.n = static_cast<int>(n);
    g.x_min = get_number(node, "x_min", where);
    g.x_max = get_number(node, "x_max", where);
    if (node.contains("boundary"))
        g.boundary = boundary_from_string(get_string(node, "boundary", where),
                                          where + ".boundary");
    return g;
}

RawParams parse_params(const json& node, const std::string& where) {
    check_keys(node, {"lambda", "sigma", "mu", "K"}, where);
    RawParams p;
    p.lambda = get_number(node, "lambda", where);
    p.sigma = get_number(node, "sigma", where);
    p.mu = get_number_or(node, "mu", 0.0, where);
    if (node.contains("K")) p.K = get_number(node, "K", where);
    return p;
}

TimeSpec parse_time(const json& node, const std::string& where) {
    check_keys(node, {"tau_final", "dt"}, where);
    TimeSpec t;
    t.tau_final = get_number(node, "tau_final", where);
    if (node.contains("dt")) {
        if (node["dt"].is_string()) {
            if (node["dt"].get<std::string>() != "auto")
                throw ConfigError(where + ".dt: expected a number or \"auto\"");
        } else if (node["dt"].is_number()) {
            t.dt = node["dt"].get<double>();
        } else {
            throw ConfigError(where + ".dt: expected a number or \"auto\"");
        }
    }
    return t;
}

InitSpec parse_init(const json& node, const std::string& where,
                    const std::set<std::string>& kinds) {
    check_keys(node, {"kind", "center", "width", "tau0"}, where);
    InitSpec i;
    i.kind = get_string(node, "kind", where);
    if (!kinds.count(i.kind)) {
        std::string allowed;
        for (const auto& k : kinds) allowed += (allowed.empty() ? "" : "|") + k;
        throw ConfigError(where + ".kind: unknown kind '" + i.kind + "' (" +
                          allowed + ")");
    }
    i.center = get_number_or(node, "center", 0.0, where);
    i.width = get_number_or(node, "width", 1.0, where);
    i.tau0 = get_number_or(node, "tau0", 0.01, where);
    return i;
}

OutputFormat format_from_string(const std::string& name, const std::string& where) {
    if (name == "csv") return OutputFormat::Csv;
    if (name == "summary") return OutputFormat::Summary;
    throw ConfigError(where + ": unknown format '" + name + "' (csv|summary)");
}

// ---------------------------------------------------------------------------
// Resolved config (manifest payload)
// ---------------------------------------------------------------------------

json grid_json(const GridSpec& g) {
    return {{"n", g.n},
            {"x_min", g.x_min},
            {"x_max", g.x_max},
            {"boundary", boundary_to_string(g.boundary)}};
}

json params_json(const RawParams& p) {
    json j{{"lambda", p.lambda}, {"sigma", p.sigma}, {"mu", p.mu}};
    j["K"] = p.K ? *p.K : 0.5 * p.sigma * p.sigma;
    return j;
}

json init_json(const InitSpec& i) {
    return {{"kind", i.kind},
            {"center", i.center},
            {"width", i.width},
            {"tau0", i.tau0}};
}

json resolved_config(const ExperimentConfig& c) {
    json j;
    j["experiment"] = to_string(c.experiment);
    j["grid"] = grid_json(c.grid);
    j["seed"] = c.seed;
    j["output"] = {{"path", c.out_path},
                   {"format", c.format == OutputFormat::Csv ? "csv" : "summary"}};
    switch (c.experiment) {
        case ExperimentKind::Evolve:
            j["params"] = params_json(c.params);
            j["time"] = {{"tau_final", c.time.tau_final},
                         {"dt", c.time.dt ? json(*c.time.dt) : json("auto")}};
            j["init"] = init_json(c.init);
            j["snapshot_stride"] = c.snapshot_stride;
            break;
        case ExperimentKind::Mc:
            j["params"] = params_json(c.params);
            j["time"] = {{"tau_final", c.time.tau_final}};
            j["init"] = init_json(c.init);
            j["n_particles"] = c.n_particles;
            break;
        case ExperimentKind::KgCheck:
            j["lattice"] = {{"lambdas", c.lattice.lambdas}, {"mus", c.lattice.mus}};
            j["random_states"] = c.random_states;
            j["t"] = c.evolve_t;
            j["max_defect"] = c.max_defect;
            j["max_norm_drift"] = c.max_norm_drift;
            break;
        case ExperimentKind::ResidualScan:
            j["lambdas"] = c.lambdas;
            j["tau"] = c.tau;
            break;
        case ExperimentKind::Limits:
            j["params"] = params_json(c.params);
            j["time"] = {{"tau_final", c.time.tau_final}};
            j["lambdas"] = c.lambdas;
            j["init_tau"] = c.init_tau;
            j["max_rel_diff"] = c.max_rel_diff;
            j["max_l1"] = c.max_l1;
            break;
        case ExperimentKind::Martingale:
            j["params"] = params_json(c.params);
            j["x0"] = c.x0;
            j["psi"] = init_json(c.psi);
            j["psi_dot"] = init_json(c.psi_dot);
            break;
    }
    return j;
}

void write_manifest(const ExperimentConfig& c,
                    const std::vector<std::string>& outputs,
                    double wall_seconds) {
    json j;
    j["tool"] = "hypdiff";
    j["version"] = kVersion;
    j["config"] = resolved_config(c);
    j["outputs"] = outputs;
    j["wall_time_seconds"] = wall_seconds;
    std::ofstream out(c.out_path + ".manifest.json");
    if (!out)
        throw std::runtime_error("cannot write manifest for " + c.out_path);
    out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Experiment runners
// ---------------------------------------------------------------------------

Field density_init(const InitSpec& init, const Grid1D& grid,
                   const ModelParams& params) {
    if (init.kind == "gaussian") {
        const double w = init.width;
        if (!(w > 0.0)) throw ConfigError("init.width must be > 0");
        return sample(grid, [&](double x) {
            const double d = (x - init.center) / w;
            return std::exp(-0.5 * d * d) / (w * std::sqrt(2.0 * std::numbers::pi));
        });
    }
    if (init.kind == "heat_kernel") {
        if (!(init.tau0 > 0.0)) throw ConfigError("init.tau0 must be > 0");
        return sample(grid, [&](double x) {
            return heat_kernel(x, init.tau0, params.K, init.center);
        });
    }
    if (init.kind == "point") {
        Field f(grid);
        int nearest = 0;
        double best = std::abs(grid.coordinate(0) - init.center);
        for (int i = 1; i < grid.n_points(); ++i) {
            const double d = std::abs(grid.coordinate(i) - init.center);
            if (d < best) {
                best = d;
                nearest = i;
            }
        }
        f[nearest] = 1.0 / grid.dx();
        return f;
    }
    throw ConfigError("unsupported density init kind '" + init.kind + "'");
}

double resolve_dt(const ExperimentConfig& c, const Grid1D& grid,
                  const ModelParams& params) {
    if (c.time.dt) return *c.time.dt;
    return suggest_dt(grid, params, 0.9);
}

int run_evolve(const ExperimentConfig& c, std::vector<std::string>& outputs) {
    const Grid1D grid = c.grid.make();
    const ModelParams params = c.params.make();
    const auto initial = TelegraphState::at_rest(density_init(c.init, grid, params));
    const double dt = resolve_dt(c, grid, params);
    const DensitySeries series =
        evolve(initial, params, c.time.tau_final, dt, c.snapshot_stride);

    DiagTable diag;
    for (int i = 0; i < series.size(); ++i) {
        diag.tau.push_back(series.times()[static_cast<std::size_t>(i)]);
        diag.stats.push_back(series.stats(i));
    }

    if (c.format == OutputFormat::Csv) {
        write_series_csv(c.out_path, to_series_table(series));
        outputs.push_back(c.out_path);
        const std::string diag_path = with_suffix(c.out_path, "_diag");
        write_diag_csv(diag_path, diag);
        outputs.push_back(diag_path);
    } else {
        Summary s;
        const auto& last = series.stats(series.size() - 1);
        s.add("experiment", std::string("evolve"));
        s.add("tau", series.times().back());
        s.add("mass", last.mass);
        s.add("mean", last.mean);
        s.add("variance", last.variance);
        s.add("median", last.median);
        s.add("negative_mass_fraction", last.negative_mass_fraction);
        write_summary(c.out_path, s, false);
        outputs.push_back(c.out_path);
    }
    return 0;
}

int run_mc(const ExperimentConfig& c, std::vector<std::string>& outputs) {
    const Grid1D grid = c.grid.make();
    const ModelParams params = c.params.make();

    InitialDistribution init = InitialDistribution::point(c.init.center);
    if (c.init.kind == "gaussian")
        init = InitialDistribution::gaussian(c.init.center, c.init.width);
    else if (c.init.kind == "uniform")
        init = InitialDistribution::uniform(c.init.center, c.init.width);
    else if (c.init.kind != "point")
        throw ConfigError("mc init kind must be point|gaussian|uniform");

    const double t_final = c.time.tau_final;
    const auto ensemble = simulate(c.n_particles, init, params, t_final, c.seed);
    const Field density = histogram(ensemble, grid);

    double mean = 0.0;
    for (double x : ensemble.positions) mean += x;
    mean /= static_cast<double>(ensemble.positions.size());
    double var = 0.0;
    for (double x : ensemble.positions) var += (x - mean) * (x - mean);
    var /= static_cast<double>(ensemble.positions.size() - 1);

    if (c.format == OutputFormat::Csv) {
        DensitySeries series;
        series.append(t_final, density);
        write_series_csv(c.out_path, to_series_table(series));
        outputs.push_back(c.out_path);
        DiagTable diag;
        diag.tau.push_back(t_final);
        diag.stats.push_back(series.stats(0));
        const std::string diag_path = with_suffix(c.out_path, "_diag");
        write_diag_csv(diag_path, diag);
        outputs.push_back(diag_path);
    } else {
        Summary s;
        s.add("experiment", std::string("mc"));
        s.add("n_particles", static_cast<double>(c.n_particles));
        s.add("t", t_final);
        s.add("speed", kac_speed(params));
        s.add("flip_rate", kac_flip_rate(params));
        s.add("sample_mean", mean);
        s.add("sample_variance", var);
        write_summary(c.out_path, s, false);
        outputs.push_back(c.out_path);
    }
    return 0;
}

ComplexField random_complex_field(const Grid1D& grid, std::mt19937_64& rng) {
    auto normal = [&rng]() {
        // Box-Muller on explicitly generated uniforms keeps the stream
        // identical across standard libraries.
        const double u1 =
            1.0 - static_cast<double>(rng() >> 11) * 0x1.0p-53;
        const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    };
    ComplexField f(grid);
    for (int i = 0; i < grid.n_points(); ++i)
        f[i] = std::complex<double>(normal(), normal());
    return f;
}

int run_kg_check(const ExperimentConfig& c, std::vector<std::string>& outputs) {
    const Grid1D grid = c.grid.make();

    double max_defect = 0.0;
    double max_imag = 0.0;
    double max_eig_err = 0.0;
    double min_metric_eig = std::numeric_limits<double>::infinity();

    for (double lambda : c.lattice.lambdas) {
        for (double mu : c.lattice.mus) {
            const ModelParams params(lambda, 1.0, mu);
            const auto H = build_hamiltonian(grid, params);
            const auto eta = build_metric(grid, params);
            max_defect = std::max(max_defect, check_pseudo_hermiticity(H, eta));
            for (int m = 0; m < H.mode_count(); ++m) {
                const auto [e1, e2] = mode_eigenvalues(H, m);
                const double w = std::sqrt(H.symbol(m));
                max_imag = std::max({max_imag, std::abs(e1.imag()),
                                     std::abs(e2.imag())});
                max_eig_err = std::max(
                    {max_eig_err, std::abs(std::abs(e1.real()) - w),
                     std::abs(std::abs(e2.real()) - w)});
                const auto& b = eta.block(m);
                // Blocks [[a,b],[b,a]] have eigenvalues a+b and a-b.
                min_metric_eig =
                    std::min({min_metric_eig, (b.a + b.b).real(),
                              (b.a - b.b).real()});
            }
        }
    }

    // Metric-norm conservation for random states at the lattice centre.
    std::mt19937_64 rng(c.seed);
    const ModelParams params(1.0, 1.0, 1.0);
    const auto H = build_hamiltonian(grid, params);
    double max_drift = 0.0;
    for (int s = 0; s < c.random_states; ++s) {
        const KGState state(random_complex_field(grid, rng),
                            random_complex_field(grid, rng), params.lambda);
        const double before = metric_inner_product(state, state, params).real();
        const auto evolved = evolve_exact(state, H, c.evolve_t);
        const double after = metric_inner_product(evolved, evolved, params).real();
        max_drift = std::max(max_drift, std::abs(after - before) / before);
    }

    // The plain component norm is not conserved: show it on an asymmetric
    // state.
    const ComplexField psi = sample(grid, [&](double x) {
        return std::complex<double>(std::exp(-0.5 * x * x), 0.0);
    });
    const ComplexField psi_dot = sample(grid, [&](double x) {
        const double d = x - 0.5;
        return std::complex<double>(0.0, 0.7 * std::exp(-d * d / 1.5));
    });
    const KGState asym(psi, psi_dot, params.lambda);
    const double l2_before = l2_norm_sq(asym);
    const double l2_after = l2_norm_sq(evolve_exact(asym, H, 1.0));
    const double l2_change = std::abs(l2_after - l2_before) / l2_before;

    const bool pass = max_defect <= c.max_defect && max_imag <= 1e-12 &&
                      max_eig_err <= 1e-10 && min_metric_eig > 0.0 &&
                      max_drift <= c.max_norm_drift && l2_change > 1e-6;

    Summary s;
    s.add("experiment", std::string("kg-check"));
    s.add("modes", static_cast<double>(grid.n_points()));
    s.add("max_pseudo_hermiticity_defect", max_defect);
    s.add("max_abs_imag_eigenvalue", max_imag);
    s.add("max_eigenvalue_error", max_eig_err);
    s.add("min_metric_eigenvalue", min_metric_eig);
    s.add("metric_norm_max_drift", max_drift);
    s.add("l2_norm_rel_change", l2_change);
    s.add("pass", std::string(pass ? "true" : "false"));
    write_summary(c.out_path, s, c.format == OutputFormat::Csv);
    outputs.push_back(c.out_path);
    return pass ? 0 : 1;
}

int run_residual_scan(const ExperimentConfig& c,
                      std::vector<std::string>& outputs) {
    const Grid1D grid = c.grid.make();
    const ScanResult scan = scan_lambda(c.lambdas, c.tau, grid);

    if (c.format == OutputFormat::Csv) {
        std::ofstream out(c.out_path);
        if (!out) throw std::runtime_error("cannot open " + c.out_path);
        out << "lambda,residual\n";
        for (std::size_t i = 0; i < scan.lambdas.size(); ++i)
            out << format_double(scan.lambdas[i]) << ','
                << format_double(scan.residuals[i]) << '\n';
        outputs.push_back(c.out_path);
    } else {
        Summary s;
        s.add("experiment", std::string("residual-scan"));
        s.add("tau", c.tau);
        s.add("slope", scan.slope);
        s.add("r_squared", scan.r_squared);
        s.add("floor", scan.floor);
        for (std::size_t i = 0; i < scan.lambdas.size(); ++i)
            s.add("residual_lambda_" + format_double(scan.lambdas[i]),
                  scan.residuals[i]);
        write_summary(c.out_path, s, false);
        outputs.push_back(c.out_path);
    }
    return 0;
}

int run_limits(const ExperimentConfig& c, std::vector<std::string>& outputs) {
    if (c.lambdas.size() < 2)
        throw ConfigError("limits: need at least 2 lambdas");

    // Operator comparison on a fine internal grid, checked at every lambda.
    const Grid1D op_grid(2048, -8.0, 8.0, Boundary::Periodic);
    const SpaceTimeGaussian test_fn{0.0, 1.0, 1.0};
    double worst_rel = 0.0;
    for (double lambda : c.lambdas) {
        const auto check = bs_limit_defect(test_fn, c.params.make(), lambda,
                                           op_grid, 0.3);
        worst_rel = std::max(worst_rel, check.rel_diff);
    }

    // Telegraph runs against the heat-kernel reference, one per lambda.
    const Grid1D grid = c.grid.make();
    std::vector<double> l1(c.lambdas.size());
    for (std::size_t i = 0; i < c.lambdas.size(); ++i) {
        const ModelParams params = c.params.make_with_lambda(c.lambdas[i]);
        const Field u0 = sample(grid, [&](double x) {
            return heat_kernel(x, c.init_tau, params.K);
        });
        const double dt = suggest_dt(grid, params, 0.9);
        const auto series = evolve(TelegraphState::at_rest(u0), params,
                                   c.time.tau_final, dt, 0);
        const Field reference = sample(grid, [&](double x) {
            return heat_kernel(x, c.init_tau + c.time.tau_final, params.K);
        });
        l1[i] = l1_distance(series.back(), reference);
    }

    // Sorted descending in lambda, the distances must shrink.
    bool monotone = true;
    for (std::size_t i = 1; i < c.lambdas.size(); ++i) {
        const bool increasing_lambda = c.lambdas[i] > c.lambdas[i - 1];
        const bool increasing_l1 = l1[i] > l1[i - 1];
        if (increasing_lambda != increasing_l1) monotone = false;
    }
    std::size_t smallest = 0;
    for (std::size_t i = 1; i < c.lambdas.size(); ++i)
        if (c.lambdas[i] < c.lambdas[smallest]) smallest = i;
    const double smallest_lambda_l1 = l1[smallest];

    const bool pass = worst_rel <= c.max_rel_diff && monotone &&
                      smallest_lambda_l1 <= c.max_l1;

    if (c.format == OutputFormat::Csv) {
        std::ofstream out(c.out_path);
        if (!out) throw std::runtime_error("cannot open " + c.out_path);
        out << "lambda,l1\n";
        for (std::size_t i = 0; i < c.lambdas.size(); ++i)
            out << format_double(c.lambdas[i]) << ',' << format_double(l1[i])
                << '\n';
        outputs.push_back(c.out_path);
    } else {
        Summary s;
        s.add("experiment", std::string("limits"));
        s.add("identity_max_rel_diff", worst_rel);
        for (std::size_t i = 0; i < c.lambdas.size(); ++i)
            s.add("l1_lambda_" + format_double(c.lambdas[i]), l1[i]);
        s.add("monotone_in_lambda", std::string(monotone ? "true" : "false"));
        s.add("smallest_lambda_l1", smallest_lambda_l1);
        s.add("pass", std::string(pass ? "true" : "false"));
        write_summary(c.out_path, s, false);
        outputs.push_back(c.out_path);
    }
    return pass ? 0 : 1;
}

ComplexField complex_init(const InitSpec& init, const Grid1D& grid) {
    if (init.kind == "zero") return ComplexField(grid);
    if (init.kind == "gaussian") {
        if (!(init.width > 0.0)) throw ConfigError("init.width must be > 0");
        return sample(grid, [&](double x) {
            const double d = (x - init.center) / init.width;
            return std::complex<double>(std::exp(-0.5 * d * d), 0.0);
        });
    }
    throw ConfigError("state init kind must be gaussian|zero");
}

int run_martingale(const ExperimentConfig& c, std::vector<std::string>& outputs) {
    const Grid1D grid = c.grid.make();
    const ModelParams params = c.params.make();

    const KGState state(complex_init(c.psi, grid), complex_init(c.psi_dot, grid),
                        params.lambda);
    const KGDensity density = density_from_kg(state, params);
    const MartingaleReport report = martingale_defect(density, c.x0);

    // Cross-check the convolution with the direct-quadrature route.
    const auto psi_dot = state.psi_dot();
    const auto spectral = greens_convolution(psi_dot, params.mu);
    const auto direct = greens_convolution_quadrature(psi_dot, params.mu);
    double route_gap = 0.0;
    for (int i = 0; i < grid.n_points(); ++i)
        route_gap = std::max(route_gap, std::abs(spectral[i] - direct[i]));

    Summary s;
    s.add("experiment", std::string("martingale"));
    s.add("x0", report.x0);
    s.add("expectation", report.expectation);
    s.add("defect", report.defect);
    s.add("mass", report.mass);
    s.add("term1", report.term1);
    s.add("term2", report.term2);
    s.add("truncation_flagged",
          std::string(report.truncation_flagged ? "true" : "false"));
    s.add("convolution_route_gap", route_gap);
    write_summary(c.out_path, s, c.format == OutputFormat::Csv);
    outputs.push_back(c.out_path);
    return 0;
}

// ---------------------------------------------------------------------------
// File comparison
// ---------------------------------------------------------------------------

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

CsvTable read_csv_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    CsvTable t;
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error(path + ": empty file");
    {
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, ',')) t.columns.push_back(col);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != t.columns.size())
            throw std::runtime_error(path + ": ragged row '" + line + "'");
        t.rows.push_back(std::move(row));
    }
    return t;
}

bool is_summary_file(const std::string& path) {
    std::ifstream in(path);
    std::string line;
    if (!std::getline(in, line)) return false;
    return line.find(" = ") != std::string::npos || line == "key,value";
}

int compare_summaries(const std::string& path_a, const std::string& path_b,
                      double tolerance) {
    const Summary a = read_summary(path_a);
    const Summary b = read_summary(path_b);

    std::vector<std::string> missing;
    for (const auto& [k, v] : a.entries) {
        (void)v;
        if (!b.find(k)) missing.push_back(k + " (only in " + path_a + ")");
    }
    for (const auto& [k, v] : b.entries) {
        (void)v;
        if (!a.find(k)) missing.push_back(k + " (only in " + path_b + ")");
    }
    if (!missing.empty()) {
        std::cerr << "schema mismatch; differing keys:\n";
        for (const auto& m : missing) std::cerr << "  " << m << '\n';
        return 1;
    }

    double worst = 0.0;
    std::string worst_key;
    for (const auto& [k, va] : a.entries) {
        const std::string& vb = *b.find(k);
        char* end_a = nullptr;
        char* end_b = nullptr;
        const double da = std::strtod(va.c_str(), &end_a);
        const double db = std::strtod(vb.c_str(), &end_b);
        const bool numeric_a = end_a && *end_a == '\0' && !va.empty();
        const bool numeric_b = end_b && *end_b == '\0' && !vb.empty();
        if (numeric_a && numeric_b) {
            const double diff = std::abs(da - db);
            if (diff > worst) {
                worst = diff;
                worst_key = k;
            }
        } else if (va != vb) {
            std::cerr << "value mismatch at '" << k << "': '" << va << "' vs '"
                      << vb << "'\n";
            return 1;
        }
    }
    std::cout << "summary compare: max |diff| = " << format_double(worst)
              << (worst_key.empty() ? "" : " at '" + worst_key + "'") << '\n';
    if (worst > tolerance) {
        std::cerr << "difference " << format_double(worst) << " exceeds tolerance "
                  << format_double(tolerance) << '\n';
        return 1;
    }
    return 0;
}

int compare_series(const CsvTable& a, const CsvTable& b, double tolerance,
                   const std::string& path_a, const std::string& path_b) {
    if (a.rows.size() != b.rows.size()) {
        std::cerr << "row count mismatch: " << a.rows.size() << " vs "
                  << b.rows.size() << '\n';
        return 1;
    }
    // Group rows into snapshots by tau (column 0); x is column 1, u column 2.
    double max_l1 = 0.0;
    std::size_t i = 0;
    while (i < a.rows.size()) {
        const double tau_a = a.rows[i][0];
        const double tau_b = b.rows[i][0];
        if (std::abs(tau_a - tau_b) > 1e-9 * std::max(1.0, std::abs(tau_a))) {
            std::cerr << "snapshot time mismatch: " << tau_a << " vs " << tau_b
                      << '\n';
            return 1;
        }
        std::size_t j = i;
        double l1 = 0.0;
        double dx = 0.0;
        while (j < a.rows.size() && a.rows[j][0] == tau_a) {
            if (std::abs(a.rows[j][1] - b.rows[j][1]) > 1e-12) {
                std::cerr << "grid mismatch at row " << j << ": " << a.rows[j][1]
                          << " vs " << b.rows[j][1] << " (" << path_a << ", "
                          << path_b << ")\n";
                return 1;
            }
            l1 += std::abs(a.rows[j][2] - b.rows[j][2]);
            if (j + 1 < a.rows.size() && a.rows[j + 1][0] == tau_a)
                dx = a.rows[j + 1][1] - a.rows[j][1];
            ++j;
        }
        max_l1 = std::max(max_l1, l1 * dx);
        i = j;
    }
    std::cout << "series compare: max snapshot L1 = " << format_double(max_l1)
              << '\n';
    if (max_l1 > tolerance) {
        std::cerr << "L1 distance " << format_double(max_l1)
                  << " exceeds tolerance " << format_double(tolerance) << '\n';
        return 1;
    }
    return 0;
}

int compare_tables(const CsvTable& a, const CsvTable& b, double tolerance) {
    if (a.rows.size() != b.rows.size()) {
        std::cerr << "row count mismatch: " << a.rows.size() << " vs "
                  << b.rows.size() << '\n';
        return 1;
    }
    double worst = 0.0;
    for (std::size_t r = 0; r < a.rows.size(); ++r)
        for (std::size_t c = 0; c < a.columns.size(); ++c)
            worst = std::max(worst, std::abs(a.rows[r][c] - b.rows[r][c]));
    std::cout << "table compare: max |diff| = " << format_double(worst) << '\n';
    if (worst > tolerance) {
        std::cerr << "difference " << format_double(worst)
                  << " exceeds tolerance " << format_double(tolerance) << '\n';
        return 1;
    }
    return 0;
}

} // namespace

// ---------------------------------------------------------------------------
// Public API
// ---------------------------------------------------------------------------

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Evolve: return "evolve";
        case ExperimentKind::KgCheck: return "kg-check";
        case ExperimentKind::Mc: return "mc";
        case ExperimentKind::ResidualScan: return "residual-scan";
        case ExperimentKind::Limits: return "limits";
        case ExperimentKind::Martingale: return "martingale";
    }
    return "evolve";
}

ExperimentKind experiment_from_string(const std::string& name) {
    if (name == "evolve") return ExperimentKind::Evolve;
    if (name == "kg-check") return ExperimentKind::KgCheck;
    if (name == "mc") return ExperimentKind::Mc;
    if (name == "residual-scan") return ExperimentKind::ResidualScan;
    if (name == "limits") return ExperimentKind::Limits;
    if (name == "martingale") return ExperimentKind::Martingale;
    throw ConfigError("unknown experiment '" + name + "'");
}

ExperimentConfig load_config(const std::string& path,
                             std::optional<ExperimentKind> expected) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);

    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    require_object(root, path);

    ExperimentConfig c;
    if (root.contains("experiment")) {
        c.experiment =
            experiment_from_string(get_string(root, "experiment", path));
        if (expected && c.experiment != *expected)
            throw ConfigError(path + ": config is for '" +
                              to_string(c.experiment) +
                              "' but the subcommand requested '" +
                              to_string(*expected) + "'");
    } else if (expected) {
        c.experiment = *expected;
    } else {
        throw ConfigError(path + ": missing key 'experiment'");
    }

    static const std::set<std::string> common = {"experiment", "grid", "seed",
                                                 "output"};
    std::set<std::string> allowed = common;
    switch (c.experiment) {
        case ExperimentKind::Evolve:
            allowed.insert({"params", "time", "init", "snapshot_stride"});
            break;
        case ExperimentKind::Mc:
            allowed.insert({"params", "time", "init", "n_particles"});
            break;
        case ExperimentKind::KgCheck:
            allowed.insert({"lattice", "random_states", "t", "max_defect",
                            "max_norm_drift"});
            break;
        case ExperimentKind::ResidualScan:
            allowed.insert({"lambdas", "tau"});
            break;
        case ExperimentKind::Limits:
            allowed.insert({"params", "time", "lambdas", "init_tau",
                            "max_rel_diff", "max_l1"});
            break;
        case ExperimentKind::Martingale:
            allowed.insert({"params", "x0", "psi", "psi_dot"});
            break;
    }
    check_keys(root, allowed, path);

    if (!root.contains("grid")) throw ConfigError(path + ": missing key 'grid'");
    c.grid = parse_grid(root["grid"], path + ".grid");

    if (root.contains("seed")) {
        if (!root["seed"].is_number_unsigned() && !root["seed"].is_number_integer())
            throw ConfigError(path + ".seed: expected a non-negative integer");
        const auto seed = root["seed"].get<std::int64_t>();
        if (seed < 0) throw ConfigError(path + ".seed: expected >= 0");
        c.seed = static_cast<std::uint64_t>(seed);
    }

    if (root.contains("output")) {
        check_keys(root["output"], {"path", "format"}, path + ".output");
        if (root["output"].contains("path"))
            c.out_path = get_string(root["output"], "path", path + ".output");
        if (root["output"].contains("format"))
            c.format = format_from_string(
                get_string(root["output"], "format", path + ".output"),
                path + ".output.format");
    }

    const bool needs_params = c.experiment == ExperimentKind::Evolve ||
                              c.experiment == ExperimentKind::Mc ||
                              c.experiment == ExperimentKind::Limits ||
                              c.experiment == ExperimentKind::Martingale;
    if (needs_params) {
        if (!root.contains("params"))
            throw ConfigError(path + ": missing key 'params'");
        c.params = parse_params(root["params"], path + ".params");
    }

    switch (c.experiment) {
        case ExperimentKind::Evolve: {
            if (!root.contains("time"))
                throw ConfigError(path + ": missing key 'time'");
            c.time = parse_time(root["time"], path + ".time");
            if (!root.contains("init"))
                throw ConfigError(path + ": missing key 'init'");
            c.init = parse_init(root["init"], path + ".init",
                                {"gaussian", "point", "heat_kernel"});
            if (root.contains("snapshot_stride")) {
                const double v = get_number(root, "snapshot_stride", path);
                if (v < 0 || v != std::floor(v))
                    throw ConfigError(path + ".snapshot_stride: expected an integer >= 0");
                c.snapshot_stride = static_cast<int>(v);
            }
            break;
        }
        case ExperimentKind::Mc: {
            if (!root.contains("time"))
                throw ConfigError(path + ": missing key 'time'");
            c.time = parse_time(root["time"], path + ".time");
            if (!root.contains("init"))
                throw ConfigError(path + ": missing key 'init'");
            c.init = parse_init(root["init"], path + ".init",
                                {"gaussian", "point", "uniform"});
            if (root.contains("n_particles")) {
                const double v = get_number(root, "n_particles", path);
                if (v < 1 || v != std::floor(v))
                    throw ConfigError(path + ".n_particles: expected an integer >= 1");
                c.n_particles = static_cast<std::int64_t>(v);
            }
            break;
        }
        case ExperimentKind::KgCheck: {
            if (root.contains("lattice")) {
                check_keys(root["lattice"], {"lambdas", "mus"}, path + ".lattice");
                c.lattice.lambdas =
                    get_number_list(root["lattice"], "lambdas", path + ".lattice");
                c.lattice.mus =
                    get_number_list(root["lattice"], "mus", path + ".lattice");
            }
            if (root.contains("random_states")) {
                const double v = get_number(root, "random_states", path);
                if (v < 1 || v != std::floor(v))
                    throw ConfigError(path + ".random_states: expected an integer >= 1");
                c.random_states = static_cast<int>(v);
            }
            c.evolve_t = get_number_or(root, "t", c.evolve_t, path);
            c.max_defect = get_number_or(root, "max_defect", c.max_defect, path);
            c.max_norm_drift =
                get_number_or(root, "max_norm_drift", c.max_norm_drift, path);
            break;
        }
        case ExperimentKind::ResidualScan: {
            c.lambdas = get_number_list(root, "lambdas", path);
            c.tau = get_number_or(root, "tau", 1.0, path);
            break;
        }
        case ExperimentKind::Limits: {
            if (!root.contains("time"))
                throw ConfigError(path + ": missing key 'time'");
            c.time = parse_time(root["time"], path + ".time");
            c.lambdas = get_number_list(root, "lambdas", path);
            c.init_tau = get_number_or(root, "init_tau", c.init_tau, path);
            c.max_rel_diff = get_number_or(root, "max_rel_diff", c.max_rel_diff, path);
            c.max_l1 = get_number_or(root, "max_l1", c.max_l1, path);
            break;
        }
        case ExperimentKind::Martingale: {
            c.x0 = get_number_or(root, "x0", 0.0, path);
            if (!root.contains("psi"))
                throw ConfigError(path + ": missing key 'psi'");
            c.psi = parse_init(root["psi"], path + ".psi", {"gaussian", "zero"});
            if (root.contains("psi_dot"))
                c.psi_dot = parse_init(root["psi_dot"], path + ".psi_dot",
                                       {"gaussian", "zero"});
            else
                c.psi_dot.kind = "zero";
            break;
        }
    }
    return c;
}

void apply_overrides(ExperimentConfig& config,
                     const std::optional<std::string>& out,
                     const std::optional<std::uint64_t>& seed,
                     const std::optional<std::string>& format) {
    if (out) config.out_path = *out;
    if (seed) config.seed = *seed;
    if (format) config.format = format_from_string(*format, "--format");
    if (config.out_path.empty())
        throw ConfigError("no output path: set output.path or pass --out");
}

int run(const ExperimentConfig& config) {
    if (config.out_path.empty())
        throw ConfigError("no output path: set output.path or pass --out");

    const auto start = std::chrono::steady_clock::now();
    std::vector<std::string> outputs;
    int status = 0;
    switch (config.experiment) {
        case ExperimentKind::Evolve: status = run_evolve(config, outputs); break;
        case ExperimentKind::KgCheck: status = run_kg_check(config, outputs); break;
        case ExperimentKind::Mc: status = run_mc(config, outputs); break;
        case ExperimentKind::ResidualScan:
            status = run_residual_scan(config, outputs);
            break;
        case ExperimentKind::Limits: status = run_limits(config, outputs); break;
        case ExperimentKind::Martingale:
            status = run_martingale(config, outputs);
            break;
    }
    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - start;
    write_manifest(config, outputs, elapsed.count());
    return status;
}

int compare_files(const std::string& path_a, const std::string& path_b,
                  double tolerance) {
    if (is_summary_file(path_a) != is_summary_file(path_b)) {
        std::cerr << "schema mismatch: cannot compare a summary with a table\n";
        return 1;
    }
    if (is_summary_file(path_a))
        return compare_summaries(path_a, path_b, tolerance);

    const CsvTable a = read_csv_table(path_a);
    const CsvTable b = read_csv_table(path_b);
    if (a.columns != b.columns) {
        std::cerr << "schema mismatch; differing columns:\n";
        std::cerr << "  " << path_a << ":";
        for (const auto& col : a.columns) std::cerr << ' ' << col;
        std::cerr << "\n  " << path_b << ":";
        for (const auto& col : b.columns) std::cerr << ' ' << col;
        std::cerr << '\n';
        return 1;
    }
    if (a.columns == std::vector<std::string>{"tau", "x", "u"})
        return compare_series(a, b, tolerance, path_a, path_b);
    return compare_tables(a, b, tolerance);
}

} // namespace hypdiff
