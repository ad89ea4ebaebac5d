#include "hypdiff/grid.hpp"

#include <cmath>

namespace hypdiff {

namespace {

// End weights: 1 everywhere on periodic grids, 1/2 at the two ends otherwise.
double end_weight(const Grid1D& g, int i) {
    if (g.boundary() == Boundary::Periodic) return 1.0;
    return (i == 0 || i == g.n_points() - 1) ? 0.5 : 1.0;
}

} // namespace

double total_mass(const Field& f) {
    double s = 0.0;
    for (int i = 0; i < f.size(); ++i) s += end_weight(f.grid, i) * f[i];
    return f.grid.dx() * s;
}

double inner_product(const Field& f, const Field& g) {
    if (!(f.grid == g.grid))
        throw std::invalid_argument("inner_product: fields on different grids");
    double s = 0.0;
    for (int i = 0; i < f.size(); ++i) s += end_weight(f.grid, i) * f[i] * g[i];
    return f.grid.dx() * s;
}

std::complex<double> inner_product(const ComplexField& f, const ComplexField& g) {
    if (!(f.grid == g.grid))
        throw std::invalid_argument("inner_product: fields on different grids");
    std::complex<double> s = 0.0;
    for (int i = 0; i < f.size(); ++i)
        s += end_weight(f.grid, i) * std::conj(f[i]) * g[i];
    return f.grid.dx() * s;
}

double l1_distance(const Field& f, const Field& g) {
    if (!(f.grid == g.grid))
        throw std::invalid_argument("l1_distance: fields on different grids");
    double s = 0.0;
    for (int i = 0; i < f.size(); ++i)
        s += end_weight(f.grid, i) * std::abs(f[i] - g[i]);
    return f.grid.dx() * s;
}

Grid1D rescale_to_z(const Grid1D& grid, const ModelParams& params) {
    // ModelParams already guarantees lambda > 0 and sigma > 0.
    const double factor = std::sqrt(2.0 * params.lambda / (params.sigma * params.sigma));
    return Grid1D(grid.n_points(), grid.x_min() * factor, grid.x_max() * factor,
                  grid.boundary());
}

} // namespace hypdiff
