#include "mfg/operator.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "mfg/argmin.hpp"
#include "mfg/errors.hpp"

namespace mfg {

namespace {

void check_table(const FiniteGame& game, std::size_t n, const char* what) {
    if (n != game.size()) throw DimensionError(std::string(what) + ": table does not match the game's grid");
}

}  // namespace

double bellman_value(const FiniteGame& game, const ValueTable& V, double mean, double gamma, std::size_t i,
                     double a) {
    return gamma * game.cost(i, a, mean) + game.discount() * game.expected_value(i, a, mean, V.values);
}

double bellman_value(const ModelSpec& model, const StateGrid& grid, const ValueTable& V, const DiscreteMeasure& mu,
                     double gamma, double x, double a) {
    if (V.size() != grid.size()) throw DimensionError("bellman_value: value table does not match grid");
    const double c = eval_cost(model, grid, x, a, mu);
    const double mean = mean_of(grid, mu);
    return gamma * c +
           model.beta * kernel_expectation_at_center(model, grid, kernel_center(model, x, a, mean), V.values);
}

double argmin_action(const FiniteGame& game, const ValueTable& V, double mean, double gamma, std::size_t i,
                     double tol) {
    return minimize_unimodal([&](double a) { return bellman_value(game, V, mean, gamma, i, a); }, game.action_lo(),
                             game.action_hi(), tol);
}

double argmin_action(const ModelSpec& model, const StateGrid& grid, const ValueTable& V, const DiscreteMeasure& mu,
                     double gamma, double x, double tol) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("argmin_action: state outside [0,1]");
    return minimize_unimodal([&](double a) { return bellman_value(model, grid, V, mu, gamma, x, a); }, model.a_lo,
                             model.a_hi, tol);
}

H1Result h1_apply(const FiniteGame& game, const ValueTable& V, const DiscreteMeasure& mu, double gamma, double tol) {
    check_table(game, V.size(), "h1_apply");
    check_table(game, mu.size(), "h1_apply");
    if (!(gamma > 0.0)) throw DomainError("h1_apply: gamma must be positive");
    const double mean = game.population_mean(mu);
    H1Result out;
    out.values.values.resize(game.size());
    out.policy.actions.resize(game.size());
    for (std::size_t i = 0; i < game.size(); ++i) {
        const double a = argmin_action(game, V, mean, gamma, i, tol);
        out.policy[i] = a;
        out.values[i] = bellman_value(game, V, mean, gamma, i, a);
    }
    return out;
}

H1Result h1_apply(const ModelSpec& model, const StateGrid& grid, const ValueTable& V, const DiscreteMeasure& mu,
                  double gamma, double tol) {
    return h1_apply(GridGame(model, grid), V, mu, gamma, tol);
}

DiscreteMeasure h2_apply(const FiniteGame& game, const PolicyTable& policy, const DiscreteMeasure& mu) {
    check_table(game, policy.size(), "h2_apply");
    check_table(game, mu.size(), "h2_apply");
    const std::size_t n = game.size();
    const double mean = game.population_mean(mu);
    std::vector<double> next(n, 0.0), row(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (mu[i] == 0.0) continue;
        game.transition_row(i, policy[i], mean, row);
        for (std::size_t j = 0; j < n; ++j) next[j] += row[j] * mu[i];
    }
    return DiscreteMeasure::renormalized(std::move(next));
}

DiscreteMeasure h2_apply(const ModelSpec& model, const StateGrid& grid, const PolicyTable& policy,
                         const DiscreteMeasure& mu) {
    return h2_apply(GridGame(model, grid), policy, mu);
}

double lipschitz_quotient(const StateGrid& grid, const ValueTable& V) {
    if (V.size() != grid.size()) throw DimensionError("lipschitz_quotient: size mismatch");
    double q = 0.0;
    for (std::size_t i = 0; i < V.size(); ++i)
        for (std::size_t j = i + 1; j < V.size(); ++j)
            q = std::max(q, std::abs(V[i] - V[j]) / (grid.point(j) - grid.point(i)));
    return q;
}

Residuals equilibrium_residuals(const FiniteGame& game, const ValueTable& V, const DiscreteMeasure& mu,
                                const PolicyTable& policy, double gamma, double tol) {
    const H1Result step = h1_apply(game, V, mu, gamma, tol);
    Residuals r;
    r.bellman = sup_distance(step.values.values, V.values);
    r.invariance = game.measure_distance(mu, h2_apply(game, policy, mu));
    return r;
}

EquilibriumResult mfe_iterate(const FiniteGame& game, const ValueTable& V0, const DiscreteMeasure& mu0, double gamma,
                              const SolverConfig& config, const IterateObserver& observer) {
    check_table(game, V0.size(), "mfe_iterate");
    check_table(game, mu0.size(), "mfe_iterate");
    if (!(config.tol_v > 0.0 && config.tol_mu > 0.0 && config.argmin_tol > 0.0) || config.max_iter < 1) {
        throw DomainError("mfe_iterate: tolerances must be positive and max_iter >= 1");
    }
    const double lip_bound = config.value_lipschitz_bound.value_or(game.value_lipschitz_bound(gamma));

    EquilibriumResult res;
    res.gamma = gamma;
    ValueTable V = V0;
    DiscreteMeasure mu = mu0;
    PolicyTable policy;
    bool lip_warned = false;

    for (std::size_t it = 1; it <= config.max_iter; ++it) {
        H1Result step = h1_apply(game, V, mu, gamma, config.argmin_tol);
        DiscreteMeasure next_mu = h2_apply(game, step.policy, mu);
        const double dv = sup_distance(step.values.values, V.values);
        const double dm = game.measure_distance(next_mu, mu);
        res.trace.push_back({it, dv, dm});

        if (!lip_warned && std::isfinite(lip_bound)) {
            const double q = lipschitz_quotient(game.grid(), step.values);
            if (q > lip_bound * (1.0 + 1e-9) + 1e-12) {
                res.warnings.push_back("iteration " + std::to_string(it) + ": value table Lipschitz quotient " +
                                       std::to_string(q) + " exceeds the domain bound " + std::to_string(lip_bound));
                lip_warned = true;
            }
        }

        if (dv < config.tol_v && dm < config.tol_mu) {
            // (V, mu) is within tolerance of its own image; keep it and the
            // policy that is greedy for it.
            res.values = std::move(V);
            res.measure = std::move(mu);
            res.policy = std::move(step.policy);
            res.converged = true;
            res.iterations = it;
            res.bellman_residual = dv;
            res.invariance_residual = dm;
            return res;
        }

        V = std::move(step.values);
        mu = std::move(next_mu);
        policy = std::move(step.policy);
        if (observer) observer(IterateState{V, mu, policy, it, dv, dm});
    }

    const H1Result last = h1_apply(game, V, mu, gamma, config.argmin_tol);
    res.values = std::move(V);
    res.measure = std::move(mu);
    res.policy = last.policy;
    res.converged = false;
    res.iterations = config.max_iter;
    res.bellman_residual = sup_distance(last.values.values, res.values.values);
    res.invariance_residual = game.measure_distance(res.measure, h2_apply(game, res.policy, res.measure));
    return res;
}

ValueTable policy_eval(const FiniteGame& game, const PolicyTable& policy, const DiscreteMeasure& mu, double gamma) {
    check_table(game, policy.size(), "policy_eval");
    check_table(game, mu.size(), "policy_eval");
    const std::size_t n = game.size();
    const double beta = game.discount();
    const double mean = game.population_mean(mu);

    // Dense system (I - beta P) V = gamma c, Gaussian elimination with partial pivoting.
    std::vector<double> A(n * n, 0.0), b(n), row(n);
    for (std::size_t i = 0; i < n; ++i) {
        game.transition_row(i, policy[i], mean, row);
        for (std::size_t j = 0; j < n; ++j) A[i * n + j] = -beta * row[j];
        A[i * n + i] += 1.0;
        b[i] = gamma * game.cost(i, policy[i], mean);
    }
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(A[i * n + k]) > std::abs(A[piv * n + k])) piv = i;
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(A[k * n + j], A[piv * n + j]);
            std::swap(b[k], b[piv]);
        }
        const double d = A[k * n + k];
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = A[i * n + k] / d;
            if (f == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) A[i * n + j] -= f * A[k * n + j];
            b[i] -= f * b[k];
        }
    }
    ValueTable V;
    V.values.assign(n, 0.0);
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= A[k * n + j] * V[j];
        V[k] = s / A[k * n + k];
    }
    return V;
}

}  // namespace mfg
