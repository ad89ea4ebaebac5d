#pragma once

#include "hypdiff/grid.hpp"
#include "hypdiff/params.hpp"
#include "hypdiff/spectral_kg.hpp"

#include <vector>

namespace hypdiff {

/// Per-snapshot diagnostics of a (possibly signed) density field.
/// Moments use the mass-normalised density; negative_mass_fraction is the
/// share of |density| carried by negative entries.
struct SnapshotStats {
    double mass = 0.0;
    double mean = 0.0;
    double variance = 0.0;
    double median = 0.0;
    double negative_mass_fraction = 0.0;
};

SnapshotStats snapshot_stats(const Field& density);

/// Time-indexed sequence of densities plus their diagnostics.
class DensitySeries {
public:
    void append(double time, Field density);

    int size() const { return static_cast<int>(times_.size()); }
    const std::vector<double>& times() const { return times_; }
    const Field& density(int i) const { return densities_[static_cast<std::size_t>(i)]; }
    const SnapshotStats& stats(int i) const { return stats_[static_cast<std::size_t>(i)]; }
    const Field& back() const { return densities_.back(); }

private:
    std::vector<double> times_;
    std::vector<Field> densities_;
    std::vector<SnapshotStats> stats_;
};

/// Green's-function convolution (k^2 + mu^2)^{-1} f evaluated spectrally on a
/// periodic grid.
ComplexField greens_convolution(const ComplexField& f, double mu);

/// Same convolution by direct O(n^2) quadrature of the decaying kernel
/// exp(-mu |u|)/(2 mu), periodised in closed form, with an endpoint
/// correction for the kernel kink. Shares nothing with the spectral route;
/// used to cross-check it.
ComplexField greens_convolution_quadrature(const ComplexField& f, double mu);

/// Two-term density (1/2)|psi|^2 + (1/2)|psi_dot * (G conv psi_dot)| built
/// from a two-component state. The construction does not guarantee unit
/// mass, so the computed mass is carried alongside rather than divided out.
struct KGDensity {
    Field density;
    Field term1;
    Field term2;
    double mass = 0.0;
};

KGDensity density_from_kg(const KGState& state, const ModelParams& params);

/// Deviation of the density's expectation from a reference price x0.
/// term1/term2 are the unnormalised x-integrals of the two density halves
/// (term2 = 0 when the density was supplied as a single field).
struct MartingaleReport {
    double x0 = 0.0;
    double expectation = 0.0;
    double defect = 0.0;
    double mass = 0.0;
    double term1 = 0.0;
    double term2 = 0.0;
    bool truncation_flagged = false;
};

MartingaleReport martingale_defect(const Field& density, double x0);
MartingaleReport martingale_defect(const KGDensity& density, double x0);

/// Quantile-based statistics: quartiles by linear interpolation of the
/// cumulative mass, plus the normalised mass found beyond tail_k * IQR on
/// either side of the median.
struct RobustStats {
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
    double iqr = 0.0;
    double tail_mass = 0.0;
};

RobustStats robust_stats(const Field& density, double tail_k = 5.0);

/// q-quantile (q in [0,1]) of a nonnegative density by interpolation of the
/// trapezoid cumulative mass.
double quantile(const Field& density, double q);

} // namespace hypdiff
