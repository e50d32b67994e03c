#include "mfg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mfg/errors.hpp"

namespace mfg {

namespace {

constexpr double kSimplexTolerance = 1e-12;

void check_nonnegative(std::span<const double> w, const char* what) {
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!(w[i] >= 0.0) || !std::isfinite(w[i])) {
            throw InvalidMeasureError(std::string(what) + ": weight " + std::to_string(i) +
                                      " is negative or not finite");
        }
    }
}

}  // namespace

StateGrid StateGrid::uniform(std::size_t m) {
    if (m == 0) throw DomainError("StateGrid::uniform: need at least one point");
    StateGrid g;
    const double dm = static_cast<double>(m);
    g.points_.resize(m);
    g.bounds_.resize(m + 1);
    for (std::size_t i = 0; i < m; ++i) {
        g.points_[i] = (static_cast<double>(i) + 0.5) / dm;
        g.bounds_[i] = static_cast<double>(i) / dm;
    }
    g.bounds_[m] = 1.0;
    g.mesh_ = 0.5 / dm;
    return g;
}

StateGrid make_grid(std::size_t n) {
    if (n == 0) throw DomainError("make_grid: n must be positive");
    // Uniform grid with n points has mesh 1/(2n) < 1/n.
    return StateGrid::uniform(n);
}

std::size_t quantize(const StateGrid& grid, double x) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw DomainError("quantize: x = " + std::to_string(x) + " lies outside [0,1]");
    }
    const auto pts = grid.points();
    // First point not below x; the nearest point is it or its predecessor.
    const auto it = std::lower_bound(pts.begin(), pts.end(), x);
    if (it == pts.begin()) return 0;
    if (it == pts.end()) return pts.size() - 1;
    const auto hi = static_cast<std::size_t>(it - pts.begin());
    const std::size_t lo = hi - 1;
    return (x - pts[lo] <= pts[hi] - x) ? lo : hi;
}

DiscreteMeasure::DiscreteMeasure(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw InvalidMeasureError("DiscreteMeasure: empty weight vector");
    check_nonnegative(weights_, "DiscreteMeasure");
    const double s = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    if (std::abs(s - 1.0) > kSimplexTolerance) {
        throw InvalidMeasureError("DiscreteMeasure: weights sum to " + std::to_string(s));
    }
}

DiscreteMeasure DiscreteMeasure::dirac(std::size_t size, std::size_t index) {
    if (index >= size) throw DimensionError("DiscreteMeasure::dirac: index out of range");
    std::vector<double> w(size, 0.0);
    w[index] = 1.0;
    return DiscreteMeasure(std::move(w));
}

DiscreteMeasure DiscreteMeasure::uniform(std::size_t size) {
    if (size == 0) throw InvalidMeasureError("DiscreteMeasure::uniform: empty");
    return renormalized(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

DiscreteMeasure DiscreteMeasure::renormalized(std::vector<double> raw, double drift_limit) {
    if (raw.empty()) throw InvalidMeasureError("DiscreteMeasure: empty weight vector");
    check_nonnegative(raw, "DiscreteMeasure::renormalized");
    const double s = std::accumulate(raw.begin(), raw.end(), 0.0);
    if (!(std::abs(s - 1.0) <= drift_limit)) {
        throw InvalidMeasureError("DiscreteMeasure: pre-normalization sum " + std::to_string(s) +
                                  " drifts beyond tolerance");
    }
    for (double& w : raw) w /= s;
    DiscreteMeasure m;
    m.weights_ = std::move(raw);
    return m;
}

double mean_of(const StateGrid& grid, const DiscreteMeasure& mu) {
    if (grid.size() != mu.size()) throw DimensionError("mean_of: measure/grid size mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) m += grid.point(i) * mu[i];
    return m;
}

double mean_of(const AtomicMeasure& mu) {
    if (mu.points.size() != mu.weights.size()) throw DimensionError("mean_of: ragged atomic measure");
    double m = 0.0;
    for (std::size_t i = 0; i < mu.points.size(); ++i) m += mu.points[i] * mu.weights[i];
    return m;
}

DiscreteMeasure lift_measure(const DiscreteMeasure& mu_discrete) { return mu_discrete; }

DiscreteMeasure project_measure(const StateGrid& grid, std::span<const double> masses) {
    if (masses.size() != grid.size()) throw DimensionError("project_measure: cell count mismatch");
    check_nonnegative(masses, "project_measure");
    const double s = std::accumulate(masses.begin(), masses.end(), 0.0);
    if (std::abs(s - 1.0) > 1e-9) {
        throw InvalidMeasureError("project_measure: cell masses sum to " + std::to_string(s));
    }
    std::vector<double> w(masses.begin(), masses.end());
    if (std::abs(s - 1.0) <= kSimplexTolerance) return DiscreteMeasure(std::move(w));
    return DiscreteMeasure::renormalized(std::move(w), 1e-9);
}

AtomicMeasure to_atoms(const StateGrid& grid, const DiscreteMeasure& mu) {
    if (grid.size() != mu.size()) throw DimensionError("to_atoms: measure/grid size mismatch");
    AtomicMeasure a;
    a.points.assign(grid.points().begin(), grid.points().end());
    a.weights.assign(mu.weights().begin(), mu.weights().end());
    return a;
}

std::vector<double> cell_masses(const StateGrid& grid, const AtomicMeasure& mu) {
    if (mu.points.size() != mu.weights.size()) throw DimensionError("cell_masses: ragged atomic measure");
    std::vector<double> masses(grid.size(), 0.0);
    for (std::size_t k = 0; k < mu.points.size(); ++k) {
        masses[quantize(grid, mu.points[k])] += mu.weights[k];
    }
    return masses;
}

double sup_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionError("sup_distance: size mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace mfg
