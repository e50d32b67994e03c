#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mfg {

struct Cell {
    double lo;
    double hi;
    double length() const { return hi - lo; }
};

/// Ordered finite grid on [0,1] together with the cells S_i = {x : quantize(x) = i}.
///
/// Grids are built by make_grid() and are immutable afterwards. Cell bounds are
/// stored as closed intervals for integration; membership of the shared endpoint
/// of two adjacent cells is decided by quantize(), which sends ties to the lower
/// index.
class StateGrid {
public:
    /// Uniform grid with m points (i + 0.5)/m and cells [i/m, (i+1)/m].
    static StateGrid uniform(std::size_t m);

    std::size_t size() const { return points_.size(); }
    std::span<const double> points() const { return points_; }
    double point(std::size_t i) const { return points_[i]; }
    Cell cell(std::size_t i) const { return {bounds_[i], bounds_[i + 1]}; }
    std::span<const double> cell_bounds() const { return bounds_; }

    /// Largest distance from any x in [0,1] to its nearest grid point.
    double mesh() const { return mesh_; }

    bool operator==(const StateGrid&) const = default;

private:
    std::vector<double> points_;
    std::vector<double> bounds_;
    double mesh_ = 0.0;
};

/// Grid whose mesh is strictly below 1/n.
StateGrid make_grid(std::size_t n);

/// Nearest grid point to x; exact ties resolve to the lower index.
std::size_t quantize(const StateGrid& grid, double x);

/// Nonnegative weights summing to one, aligned with a StateGrid.
class DiscreteMeasure {
public:
    DiscreteMeasure() = default;

    /// Validates nonnegativity and |sum - 1| <= 1e-12.
    explicit DiscreteMeasure(std::vector<double> weights);

    static DiscreteMeasure dirac(std::size_t size, std::size_t index);
    static DiscreteMeasure uniform(std::size_t size);

    /// Rescales raw weights to sum one. Throws InvalidMeasureError when the raw
    /// sum is off by more than `drift_limit` (float drift versus logic error).
    static DiscreteMeasure renormalized(std::vector<double> raw, double drift_limit = 1e-6);

    std::size_t size() const { return weights_.size(); }
    std::span<const double> weights() const { return weights_; }
    double operator[](std::size_t i) const { return weights_[i]; }

    bool operator==(const DiscreteMeasure&) const = default;

private:
    std::vector<double> weights_;
};

/// Finitely supported measure on [0,1] with arbitrary atom locations.
struct AtomicMeasure {
    std::vector<double> points;
    std::vector<double> weights;
};

/// Mass-weighted mean sum_i x_i mu_i.
double mean_of(const StateGrid& grid, const DiscreteMeasure& mu);
double mean_of(const AtomicMeasure& mu);

/// The atomic measure sum_i mu(x_i) delta_{x_i} shares its representation with
/// the discrete measure on the grid; this marks the change of space.
DiscreteMeasure lift_measure(const DiscreteMeasure& mu_discrete);

/// Discrete measure whose weight i is the mass of cell i.
DiscreteMeasure project_measure(const StateGrid& grid, std::span<const double> cell_masses);

/// Atoms of the lifted measure, placed on the grid points.
AtomicMeasure to_atoms(const StateGrid& grid, const DiscreteMeasure& mu);

/// Cell masses of an atomic measure (each atom is sent to quantize(point)).
std::vector<double> cell_masses(const StateGrid& grid, const AtomicMeasure& mu);

/// Per grid point value V = Q_min.
struct ValueTable {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }
};

/// Deterministic policy: one action per grid point.
struct PolicyTable {
    std::vector<double> actions;

    std::size_t size() const { return actions.size(); }
    double operator[](std::size_t i) const { return actions[i]; }
    double& operator[](std::size_t i) { return actions[i]; }
};

double sup_distance(std::span<const double> a, std::span<const double> b);

}  // namespace mfg
