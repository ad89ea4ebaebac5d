#pragma once

#include "hypdiff/params.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace hypdiff {

enum class Boundary { Periodic, Reflecting, Absorbing };

/// Uniform 1-D lattice over [x_min, x_max].
///
/// Periodic grids treat x_max as identified with x_min, so the spacing is
/// (x_max - x_min)/n and the last node sits one cell short of x_max.
/// Non-periodic grids place nodes on both ends, spacing (x_max - x_min)/(n-1).
class Grid1D {
public:
    Grid1D(int n_points, double x_min, double x_max,
           Boundary boundary = Boundary::Periodic)
        : n_(n_points), x_min_(x_min), x_max_(x_max), boundary_(boundary) {
        if (n_ < 3)
            throw std::invalid_argument("Grid1D: need at least 3 points");
        if (!(x_max_ > x_min_))
            throw std::invalid_argument("Grid1D: x_max must exceed x_min");
        const double denom =
            (boundary_ == Boundary::Periodic) ? n_ : (n_ - 1);
        dx_ = (x_max_ - x_min_) / denom;
        if (!(dx_ > 0.0) || !std::isfinite(dx_))
            throw std::invalid_argument("Grid1D: degenerate spacing");
    }

    int n_points() const { return n_; }
    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    double length() const { return x_max_ - x_min_; }
    Boundary boundary() const { return boundary_; }
    double dx() const { return dx_; }

    double coordinate(int i) const { return x_min_ + i * dx_; }

    std::vector<double> coordinates() const {
        std::vector<double> x(static_cast<std::size_t>(n_));
        for (int i = 0; i < n_; ++i) x[static_cast<std::size_t>(i)] = coordinate(i);
        return x;
    }

    bool operator==(const Grid1D&) const = default;

private:
    int n_;
    double x_min_, x_max_;
    Boundary boundary_;
    double dx_;
};

/// Sampled scalar function on a grid. Owns its grid by value (the grid is a
/// few words) so fields can be copied and shared between threads freely.
template <class T>
struct BasicField {
    Grid1D grid;
    std::vector<T> values;

    BasicField(const Grid1D& g, std::vector<T> v)
        : grid(g), values(std::move(v)) {
        if (static_cast<int>(values.size()) != grid.n_points())
            throw std::invalid_argument("Field: value count does not match grid");
    }

    explicit BasicField(const Grid1D& g)
        : grid(g), values(static_cast<std::size_t>(g.n_points()), T{}) {}

    int size() const { return grid.n_points(); }
    T& operator[](int i) { return values[static_cast<std::size_t>(i)]; }
    const T& operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
};

using Field = BasicField<double>;
using ComplexField = BasicField<std::complex<double>>;

/// Sample a callable f(x) onto a grid.
template <class F>
auto sample(const Grid1D& grid, F&& f) {
    using T = std::decay_t<decltype(f(0.0))>;
    BasicField<T> out(grid);
    for (int i = 0; i < grid.n_points(); ++i) out[i] = f(grid.coordinate(i));
    return out;
}

/// Three-point second difference (f[i-1] - 2 f[i] + f[i+1]) / dx^2.
///
/// Ghost values: periodic wrap, mirror across the boundary edge
/// (ghost = nearest node, so constants are annihilated and the row sums
/// telescope to zero), or zero for absorbing walls.
template <class T>
BasicField<T> laplacian(const BasicField<T>& f) {
    const int n = f.grid.n_points();
    if (n < 3) throw std::invalid_argument("laplacian: field too short");
    const double inv_dx2 = 1.0 / (f.grid.dx() * f.grid.dx());
    BasicField<T> out(f.grid);

    auto ghost_left = [&]() -> T {
        switch (f.grid.boundary()) {
            case Boundary::Periodic: return f[n - 1];
            case Boundary::Reflecting: return f[0];
            case Boundary::Absorbing: return T{};
        }
        return T{};
    };
    auto ghost_right = [&]() -> T {
        switch (f.grid.boundary()) {
            case Boundary::Periodic: return f[0];
            case Boundary::Reflecting: return f[n - 1];
            case Boundary::Absorbing: return T{};
        }
        return T{};
    };

    out[0] = (ghost_left() - 2.0 * f[0] + f[1]) * inv_dx2;
    for (int i = 1; i < n - 1; ++i)
        out[i] = (f[i - 1] - 2.0 * f[i] + f[i + 1]) * inv_dx2;
    out[n - 1] = (f[n - 2] - 2.0 * f[n - 1] + ghost_right()) * inv_dx2;
    return out;
}

/// Quadrature of a sampled density: plain Riemann sum on periodic grids,
/// trapezoid end-weights otherwise.
double total_mass(const Field& f);

/// L2 inner product dx * sum(f[i] * g[i]) with the same end-weight rule.
double inner_product(const Field& f, const Field& g);
std::complex<double> inner_product(const ComplexField& f, const ComplexField& g);

/// L1 distance dx * sum |f - g| between two fields on one grid.
double l1_distance(const Field& f, const Field& g);

/// Coordinate substitution z = x * sqrt(2 lambda / sigma^2).
Grid1D rescale_to_z(const Grid1D& grid, const ModelParams& params);

/// True when every entry is finite.
template <class T>
bool all_finite(const BasicField<T>& f) {
    for (const auto& v : f.values) {
        if constexpr (std::is_same_v<T, double>) {
            if (!std::isfinite(v)) return false;
        } else {
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        }
    }
    return true;
}

} // namespace hypdiff
