#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mfg/grid.hpp"

namespace mfg {

/// Dense row-major matrix of nonnegative reals.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
};

/// Coupling between a source (rows) and a target (columns) measure.
using TransportPlan = Matrix;

/// W1 under d(x,y) = |x - y| via the CDF identity on a common grid.
double w1_1d(const StateGrid& grid, const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// W1 under the discrete metric 1_{i != j}; equals half the l1 distance.
double w1_discrete_metric(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// Total variation as the l1 norm sum_i |mu_i - nu_i|.
double tv(const DiscreteMeasure& mu, const DiscreteMeasure& nu);
double tv(std::span<const double> mu, std::span<const double> nu);

Matrix absolute_distance_cost(const StateGrid& grid);
Matrix discrete_metric_cost(std::size_t n);

struct TransportSolution {
    double value = 0.0;
    TransportPlan plan;
};

/// Exact optimal transport. Supports of at most four atoms on both sides are
/// solved by enumerating every basic feasible plan, larger ones by the
/// transportation simplex.
TransportSolution w1_lp_oracle(const Matrix& cost, std::span<const double> mu, std::span<const double> nu);

/// Transportation simplex (northwest-corner start, MODI pricing).
TransportSolution transport_simplex(const Matrix& cost, std::span<const double> mu,
                                    std::span<const double> nu);

/// Minimum over all spanning-tree bases of the transportation polytope.
/// Exponential; intended for at most 4 x 4 instances.
TransportSolution transport_enumerate(const Matrix& cost, std::span<const double> mu,
                                      std::span<const double> nu);

}  // namespace mfg
