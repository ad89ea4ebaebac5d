#include "hypdiff/measures.hpp"

#include "hypdiff/fft.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hypdiff {

namespace {

// Trapezoid cumulative mass along the grid; clamped to be non-decreasing so
// quantiles stay well defined for slightly signed densities.
struct CumulativeMass {
    std::vector<double> x;
    std::vector<double> c;

    explicit CumulativeMass(const Field& f) : x(f.grid.coordinates()) {
        const auto n = static_cast<std::size_t>(f.size());
        c.resize(n, 0.0);
        const double dx = f.grid.dx();
        for (std::size_t i = 1; i < n; ++i) {
            const double panel = 0.5 * dx * (f[static_cast<int>(i - 1)] +
                                             f[static_cast<int>(i)]);
            c[i] = c[i - 1] + std::max(panel, 0.0);
        }
    }

    double total() const { return c.back(); }

    // Inverse interpolation: position where the cumulative mass reaches m.
    double position_at(double m) const {
        if (m <= 0.0) return x.front();
        if (m >= total()) return x.back();
        const auto it = std::lower_bound(c.begin(), c.end(), m);
        const std::size_t hi = static_cast<std::size_t>(it - c.begin());
        const std::size_t lo = hi - 1;
        const double span = c[hi] - c[lo];
        const double frac = (span > 0.0) ? (m - c[lo]) / span : 0.5;
        return x[lo] + frac * (x[hi] - x[lo]);
    }

    // Forward interpolation: cumulative mass at position pos.
    double mass_at(double pos) const {
        if (pos <= x.front()) return 0.0;
        if (pos >= x.back()) return total();
        const auto it = std::upper_bound(x.begin(), x.end(), pos);
        const std::size_t hi = static_cast<std::size_t>(it - x.begin());
        const std::size_t lo = hi - 1;
        const double frac = (pos - x[lo]) / (x[hi] - x[lo]);
        return c[lo] + frac * (c[hi] - c[lo]);
    }
};

double expectation_integral(const Field& f) {
    const Field xf = sample(f.grid, [](double x) { return x; });
    return inner_product(xf, f);
}

// Tail mass expected beyond the grid edges, assuming the density continues
// with a quadratic (Cauchy-like) falloff: integral of c/x^2 beyond R is
// R * p(R).
double edge_tail_estimate(const Field& f, double center) {
    const double left = std::max(f[0], 0.0) * std::abs(f.grid.x_min() - center);
    const double right =
        std::max(f[f.size() - 1], 0.0) * std::abs(f.grid.x_max() - center);
    return left + right;
}

MartingaleReport build_report(const Field& density, double x0, double mass,
                              double term1, double term2) {
    if (!(mass > 0.0))
        throw std::domain_error("martingale_defect: density mass must be > 0");
    MartingaleReport r;
    r.x0 = x0;
    r.mass = mass;
    r.term1 = term1;
    r.term2 = term2;
    r.expectation = (term1 + term2) / mass;
    r.defect = r.expectation - x0;
    const double median = quantile(density, 0.5);
    r.truncation_flagged = edge_tail_estimate(density, median) / mass > 1e-3;
    return r;
}

} // namespace

SnapshotStats snapshot_stats(const Field& density) {
    SnapshotStats s;
    s.mass = total_mass(density);

    double abs_mass = 0.0, neg_mass = 0.0;
    for (int i = 0; i < density.size(); ++i) {
        abs_mass += std::abs(density[i]);
        neg_mass += std::max(-density[i], 0.0);
    }
    s.negative_mass_fraction = (abs_mass > 0.0) ? neg_mass / abs_mass : 0.0;

    if (s.mass != 0.0) {
        s.mean = expectation_integral(density) / s.mass;
        const Field centered = sample(density.grid, [&](double x) {
            return (x - s.mean) * (x - s.mean);
        });
        s.variance = inner_product(centered, density) / s.mass;
        s.median = quantile(density, 0.5);
    }
    return s;
}

void DensitySeries::append(double time, Field density) {
    if (!times_.empty() && !(time > times_.back()))
        throw std::invalid_argument("DensitySeries: times must be strictly increasing");
    stats_.push_back(snapshot_stats(density));
    times_.push_back(time);
    densities_.push_back(std::move(density));
}

ComplexField greens_convolution(const ComplexField& f, double mu) {
    if (f.grid.boundary() != Boundary::Periodic)
        throw std::invalid_argument("greens_convolution: periodic grid required");
    if (!(mu > 0.0))
        throw std::domain_error("greens_convolution: singular kernel at mu = 0");
    auto hat = fft(f.values);
    const auto k = fourier_wavenumbers(f.grid);
    for (std::size_t m = 0; m < k.size(); ++m)
        hat[m] /= (k[m] * k[m] + mu * mu);
    return ComplexField(f.grid, ifft(hat));
}

ComplexField greens_convolution_quadrature(const ComplexField& f, double mu) {
    if (f.grid.boundary() != Boundary::Periodic)
        throw std::invalid_argument(
            "greens_convolution_quadrature: periodic grid required");
    if (!(mu > 0.0))
        throw std::domain_error(
            "greens_convolution_quadrature: singular kernel at mu = 0");

    const int n = f.grid.n_points();
    const double L = f.grid.length();
    const double h = f.grid.dx();
    const double denom = 2.0 * mu * (1.0 - std::exp(-mu * L));

    // Periodised kernel sum_m exp(-mu |u + m L|)/(2 mu) in closed form,
    // tabulated once per offset |i - j|.
    std::vector<double> kernel(static_cast<std::size_t>(n));
    for (int d = 0; d < n; ++d) {
        const double u = d * h;
        kernel[static_cast<std::size_t>(d)] =
            (std::exp(-mu * u) + std::exp(-mu * (L - u))) / denom;
    }

    ComplexField out(f.grid);
    for (int i = 0; i < n; ++i) {
        std::complex<double> acc = 0.0;
        for (int j = 0; j < n; ++j) {
            const int d = (i - j + n) % n;
            acc += kernel[static_cast<std::size_t>(d)] * f[j];
        }
        // Trapezoid plus the Euler-Maclaurin term for the derivative jump of
        // the kernel at zero offset; the remaining error is O(h^4).
        out[i] = h * acc - (h * h / 12.0) * f[i];
    }
    return out;
}

KGDensity density_from_kg(const KGState& state, const ModelParams& params) {
    if (!(params.mu > 0.0))
        throw std::domain_error("density_from_kg: singular kernel at mu = 0");
    const auto psi = state.psi();
    const auto psi_dot = state.psi_dot();
    const auto conv = greens_convolution(psi_dot, params.mu);

    KGDensity out{Field(psi.grid), Field(psi.grid), Field(psi.grid), 0.0};
    for (int i = 0; i < psi.size(); ++i) {
        out.term1[i] = 0.5 * std::norm(psi[i]);
        out.term2[i] = 0.5 * std::abs(psi_dot[i] * conv[i]);
        out.density[i] = out.term1[i] + out.term2[i];
    }
    out.mass = total_mass(out.density);
    return out;
}

MartingaleReport martingale_defect(const Field& density, double x0) {
    return build_report(density, x0, total_mass(density),
                        expectation_integral(density), 0.0);
}

MartingaleReport martingale_defect(const KGDensity& density, double x0) {
    return build_report(density.density, x0, density.mass,
                        expectation_integral(density.term1),
                        expectation_integral(density.term2));
}

RobustStats robust_stats(const Field& density, double tail_k) {
    const CumulativeMass cum(density);
    if (!(cum.total() > 0.0))
        throw std::domain_error("robust_stats: density mass must be > 0");
    RobustStats s;
    s.median = cum.position_at(0.5 * cum.total());
    s.q25 = cum.position_at(0.25 * cum.total());
    s.q75 = cum.position_at(0.75 * cum.total());
    s.iqr = s.q75 - s.q25;
    const double lo = s.median - tail_k * s.iqr;
    const double hi = s.median + tail_k * s.iqr;
    s.tail_mass = (cum.total() - (cum.mass_at(hi) - cum.mass_at(lo))) / cum.total();
    return s;
}

double quantile(const Field& density, double q) {
    if (!(q >= 0.0) || !(q <= 1.0))
        throw std::invalid_argument("quantile: q must lie in [0, 1]");
    const CumulativeMass cum(density);
    if (!(cum.total() > 0.0))
        throw std::domain_error("quantile: density mass must be > 0");
    return cum.position_at(q * cum.total());
}

} // namespace hypdiff
