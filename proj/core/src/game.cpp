#include "mfg/game.hpp"

#include <limits>

#include "mfg/metrics.hpp"

namespace mfg {

double FiniteGame::value_lipschitz_bound(double gamma) const {
    const DeclaredConstants& c = model().constants;
    const double denom = 1.0 - discount() * c.K2;
    if (denom <= 0.0) return std::numeric_limits<double>::infinity();
    return gamma * c.L2 / denom;
}

GridGame::GridGame(ModelSpec model, StateGrid grid) : model_(std::move(model)), grid_(std::move(grid)) {}

double GridGame::cost(std::size_t i, double a, double mean) const {
    return cost_given_mean(model_, grid_.point(i), a, mean);
}

void GridGame::transition_row(std::size_t i, double a, double mean, std::span<double> out) const {
    kernel_row_at_center(model_, grid_, kernel_center(model_, grid_.point(i), a, mean), out);
}

double GridGame::expected_value(std::size_t i, double a, double mean, std::span<const double> values) const {
    return kernel_expectation_at_center(model_, grid_, kernel_center(model_, grid_.point(i), a, mean), values);
}

double GridGame::measure_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const {
    return w1_1d(grid_, mu, nu);
}

}  // namespace mfg
