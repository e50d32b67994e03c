#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "mfg/grid.hpp"
#include "mfg/model.hpp"

namespace testsupport {

struct NamedModel {
    std::string name;
    mfg::ModelSpec model;
};

/// The built-in families at a few parameter settings, all certified.
std::vector<NamedModel> builtin_models();

/// Population-free model: cost tracks a fixed target and the kernel ignores
/// the population and the action.
mfg::ModelSpec decoupled_model();

/// Population-free model whose kernel still moves with state and action.
mfg::ModelSpec population_free_model();

/// Random quadratic-drift model that satisfies the contraction conditions.
mfg::ModelSpec random_certified_model(std::mt19937_64& rng);

/// Random value table with |V| <= gamma M / (1 - beta) and discrete Lipschitz
/// quotient at most gamma L2 / (1 - beta K2).
mfg::ValueTable random_value_table(const mfg::ModelSpec& model, const mfg::StateGrid& grid, double gamma,
                                   std::mt19937_64& rng);

/// Random probability vector; roughly one in four draws is sparse.
mfg::DiscreteMeasure random_measure(std::size_t n, std::mt19937_64& rng);

/// Small random perturbation of mu that stays a probability vector.
mfg::DiscreteMeasure nudge(const mfg::DiscreteMeasure& mu, double size, std::mt19937_64& rng);

}  // namespace testsupport
