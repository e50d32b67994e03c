#pragma once

#include <cstddef>
#include <vector>

#include "mfg/model.hpp"

namespace oracle {

/// A finite MDP read off a model whose cost and kernel ignore the population:
/// states are the midpoints of n equal cells, rows are cell masses of the
/// truncated normal mixture, recomputed here from the closed form.
struct MdpSolution {
    std::vector<double> values;   // undiscounted-scale optimal cost, gamma = 1
    std::vector<double> policy;
    std::vector<double> measure;  // invariant law of the optimal chain
    std::size_t sweeps = 0;
};

double cost(const mfg::ModelSpec& model, double x, double a);
std::vector<double> kernel_row(const mfg::ModelSpec& model, std::size_t n, double x, double a);

/// Plain value iteration with a dense action scan refined by ternary search,
/// followed by the power method for the invariant measure.
MdpSolution solve_mdp(const mfg::ModelSpec& model, std::size_t n, std::size_t action_grid = 2001);

/// Stationary law of a row-stochastic matrix by repeated multiplication.
std::vector<double> invariant_measure(const std::vector<std::vector<double>>& P, double tol = 1e-15,
                                      std::size_t max_iter = 100000);

/// W1 on the cell midpoints by brute-force cumulative sums.
double w1_midpoints(const std::vector<double>& mu, const std::vector<double>& nu);

}  // namespace oracle
