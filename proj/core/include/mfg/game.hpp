#pragma once

#include <cstddef>
#include <span>

#include "mfg/grid.hpp"
#include "mfg/model.hpp"

namespace mfg {

/// A game with finitely many states, an interval of actions and costs and
/// kernels that depend on the population only through its mean.
///
/// The operator module runs on this interface; the grid collocation of a
/// nominal model and the quantized game both implement it.
class FiniteGame {
public:
    virtual ~FiniteGame() = default;

    virtual const StateGrid& grid() const = 0;
    virtual const ModelSpec& model() const = 0;

    double discount() const { return model().beta; }
    double action_lo() const { return model().a_lo; }
    double action_hi() const { return model().a_hi; }
    std::size_t size() const { return grid().size(); }

    /// Mean of mu as seen by the cost and kernel.
    virtual double population_mean(const DiscreteMeasure& mu) const { return mean_of(grid(), mu); }

    virtual double cost(std::size_t i, double a, double mean) const = 0;
    virtual void transition_row(std::size_t i, double a, double mean, std::span<double> out) const = 0;

    /// sum_j values[j] * p(j | i, a, mean)
    virtual double expected_value(std::size_t i, double a, double mean, std::span<const double> values) const = 0;

    /// Metric used for the measure stopping test and invariance residual.
    virtual double measure_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const = 0;

    /// Lipschitz bound of the value table that the operator domain carries.
    virtual double value_lipschitz_bound(double gamma) const;
};

/// Nominal model evaluated at the points of a grid, with kernel rows given by
/// the next-state mass of each cell. Measures are compared with the 1-D W1.
class GridGame final : public FiniteGame {
public:
    GridGame(ModelSpec model, StateGrid grid);

    const StateGrid& grid() const override { return grid_; }
    const ModelSpec& model() const override { return model_; }

    double cost(std::size_t i, double a, double mean) const override;
    void transition_row(std::size_t i, double a, double mean, std::span<double> out) const override;
    double expected_value(std::size_t i, double a, double mean, std::span<const double> values) const override;
    double measure_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const override;

private:
    ModelSpec model_;
    StateGrid grid_;
};

}  // namespace mfg
