#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mfg/game.hpp"
#include "mfg/grid.hpp"
#include "mfg/model.hpp"

namespace mfg {

struct SolverConfig {
    double tol_v = 1e-9;
    double tol_mu = 1e-9;
    std::size_t max_iter = 10000;
    double argmin_tol = 1e-10;
    // Replaces the game's own bound in the value-Lipschitz check.
    std::optional<double> value_lipschitz_bound;

    bool operator==(const SolverConfig&) const = default;
};

struct TraceRow {
    std::size_t iter = 0;
    double sup_diff_v = 0.0;
    double w1_diff_mu = 0.0;
};

struct IterateState {
    ValueTable values;
    DiscreteMeasure measure;
    PolicyTable policy;  // greedy with respect to the previous (values, measure)
    std::size_t iteration = 0;
    double sup_diff_v = 0.0;
    double w1_diff_mu = 0.0;
};

struct EquilibriumResult {
    ValueTable values;
    DiscreteMeasure measure;
    PolicyTable policy;
    bool converged = false;
    std::size_t iterations = 0;
    double bellman_residual = 0.0;
    double invariance_residual = 0.0;
    double gamma = 1.0;
    std::vector<TraceRow> trace;
    std::vector<std::string> warnings;
};

struct Residuals {
    double bellman = 0.0;
    double invariance = 0.0;
};

struct H1Result {
    ValueTable values;
    PolicyTable policy;
};

/// gamma * c(x_i, a, mu) + beta * sum_y V(y) p(y | x_i, a, mu)
double bellman_value(const FiniteGame& game, const ValueTable& V, double mean, double gamma, std::size_t i,
                     double a);

/// Same objective at an arbitrary state x of the nominal model, with kernel
/// rows resolved on `grid`.
double bellman_value(const ModelSpec& model, const StateGrid& grid, const ValueTable& V, const DiscreteMeasure& mu,
                     double gamma, double x, double a);

double argmin_action(const FiniteGame& game, const ValueTable& V, double mean, double gamma, std::size_t i,
                     double tol = 1e-10);
double argmin_action(const ModelSpec& model, const StateGrid& grid, const ValueTable& V, const DiscreteMeasure& mu,
                     double gamma, double x, double tol = 1e-10);

H1Result h1_apply(const FiniteGame& game, const ValueTable& V, const DiscreteMeasure& mu, double gamma,
                  double tol = 1e-10);
H1Result h1_apply(const ModelSpec& model, const StateGrid& grid, const ValueTable& V, const DiscreteMeasure& mu,
                  double gamma, double tol = 1e-10);

/// Pushforward of mu under the kernel driven by `policy` (kernel frozen at mu).
DiscreteMeasure h2_apply(const FiniteGame& game, const PolicyTable& policy, const DiscreteMeasure& mu);
DiscreteMeasure h2_apply(const ModelSpec& model, const StateGrid& grid, const PolicyTable& policy,
                         const DiscreteMeasure& mu);

using IterateObserver = std::function<void(const IterateState&)>;

/// Fixed-point iteration of (V, mu) <- (H1(V, mu), H2(V, mu)).
///
/// Stops once both sup|V' - V| < tol_v and d(mu', mu) < tol_mu. The returned
/// point is the last iterate whose one-step residuals met the tolerances, so
/// the reported residuals are the final step sizes. Running out of iterations
/// yields converged = false.
EquilibriumResult mfe_iterate(const FiniteGame& game, const ValueTable& V0, const DiscreteMeasure& mu0, double gamma,
                              const SolverConfig& config = {}, const IterateObserver& observer = {});

/// Discounted cost of a deterministic stationary policy with mu frozen:
/// the solution of V = gamma c_pi + beta P_pi V.
ValueTable policy_eval(const FiniteGame& game, const PolicyTable& policy, const DiscreteMeasure& mu,
                       double gamma = 1.0);

Residuals equilibrium_residuals(const FiniteGame& game, const ValueTable& V, const DiscreteMeasure& mu,
                                const PolicyTable& policy, double gamma, double tol = 1e-10);

/// max_{i != j} |V_i - V_j| / |x_i - x_j|
double lipschitz_quotient(const StateGrid& grid, const ValueTable& V);

}  // namespace mfg
