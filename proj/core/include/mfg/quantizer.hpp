#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "mfg/game.hpp"
#include "mfg/grid.hpp"
#include "mfg/model.hpp"
#include "mfg/operator.hpp"

namespace mfg {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
QuadratureRule gauss_legendre(std::size_t points);

/// Finite game on make_grid(n) whose cost and kernel are cell averages of
/// the nominal model under normalized Lebesgue measure on each cell.
/// Measures are compared with the discrete-metric W1.
class QuantizedModel final : public FiniteGame {
public:
    QuantizedModel(ModelSpec base, std::size_t n, std::size_t quad_points = 8);

    const StateGrid& grid() const override { return grid_; }
    const ModelSpec& model() const override { return base_; }
    std::size_t n() const { return grid_.size(); }
    std::size_t quad_points() const { return weights_.size(); }

    /// Quadrature nodes inside cell i; weights sum to one.
    std::span<const double> cell_nodes(std::size_t i) const;
    std::span<const double> node_weights() const { return weights_; }

    double cost(std::size_t i, double a, double mean) const override;
    void transition_row(std::size_t i, double a, double mean, std::span<double> out) const override;
    double expected_value(std::size_t i, double a, double mean, std::span<const double> values) const override;
    double measure_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const override;
    double value_lipschitz_bound(double gamma) const override;

    /// c_n(i, a, mu^D)
    double cost(std::size_t i, double a, const DiscreteMeasure& mu) const;
    /// p_n(. | i, a, mu^D)
    DiscreteMeasure kernel_row(std::size_t i, double a, const DiscreteMeasure& mu) const;

private:
    ModelSpec base_;
    StateGrid grid_;
    std::vector<double> nodes_;  // n x quad_points
    std::vector<double> weights_;
};

QuantizedModel build_quantized(const ModelSpec& model, std::size_t n, std::size_t quad_points = 8);

/// Iterate of the extended game: a value function sampled at `points` (which
/// must contain every grid point) and an atomic state measure.
struct ExtendedIterate {
    std::vector<double> points;
    std::vector<double> values;
    std::vector<double> policy;
    AtomicMeasure measure;
};

/// The quantized game read back on the whole state space: cost and kernel are
/// constant on cells and kernel rows are atomic on the grid points.
class ExtendedModel {
public:
    explicit ExtendedModel(const QuantizedModel& quantized);

    const QuantizedModel& quantized() const { return *qm_; }

    double cost(double x, double a, const AtomicMeasure& mu) const;
    AtomicMeasure kernel(double x, double a, const AtomicMeasure& mu) const;

    /// gamma c^(x,a,mu) + beta sum_j Q^_min(x_j) p^(x_j | x,a,mu); the
    /// continuation only reads the value function at the grid points.
    double bellman_value(double x, double a, const AtomicMeasure& mu, std::span<const double> grid_values,
                         double gamma) const;
    double argmin_action(double x, const AtomicMeasure& mu, std::span<const double> grid_values, double gamma,
                         double tol = 1e-10) const;

    /// One application of the extended operator.
    ExtendedIterate step(const ExtendedIterate& state, double gamma, double tol = 1e-10) const;

    /// Bellman and invariance residuals of a cell-constant candidate given by
    /// its values and actions at the grid points and an atomic measure.
    Residuals residuals(std::span<const double> grid_values, std::span<const double> grid_policy,
                        const AtomicMeasure& mu, double gamma, double tol = 1e-10) const;

    /// Values of a function on the sample points at the grid points.
    std::vector<double> grid_values(const ExtendedIterate& state) const;

private:
    double mean_of_projection(const AtomicMeasure& mu) const;
    const QuantizedModel* qm_;
};

ExtendedModel extend(const QuantizedModel& qm);

/// Quantized state-space iterate read as an extended iterate on `points`.
ExtendedIterate lift_iterate(const QuantizedModel& qm, std::span<const double> points, const ValueTable& V,
                             const DiscreteMeasure& mu);

EquilibriumResult solve_quantized(const QuantizedModel& qm, double gamma, const SolverConfig& config = {});

/// x -> policy[quantize(x)]
std::function<double(double)> extend_policy(const QuantizedModel& qm, const PolicyTable& policy);

/// Evaluates a function of the state at every point of `grid`.
std::vector<double> sample_on_grid(const std::function<double(double)>& f, const StateGrid& grid);

}  // namespace mfg
