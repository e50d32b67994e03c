#include "mfg/quantizer.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mfg/argmin.hpp"
#include "mfg/errors.hpp"
#include "mfg/metrics.hpp"

namespace mfg {

QuadratureRule gauss_legendre(std::size_t points) {
    if (points == 0) throw DomainError("gauss_legendre: need at least one point");
    QuadratureRule rule;
    rule.nodes.resize(points);
    rule.weights.resize(points);
    const std::size_t n = points;
    for (std::size_t k = 0; k < (n + 1) / 2; ++k) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(k) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Legendre recurrence for P_n(x) and its derivative.
            double p0 = 1.0, p1 = x;
            for (std::size_t j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / static_cast<double>(j);
                p0 = p1;
                p1 = p2;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        {
            double p0 = 1.0, p1 = x;
            for (std::size_t j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / static_cast<double>(j);
                p0 = p1;
                p1 = p2;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[k] = -x;
        rule.nodes[n - 1 - k] = x;
        rule.weights[k] = w;
        rule.weights[n - 1 - k] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

QuantizedModel::QuantizedModel(ModelSpec base, std::size_t n, std::size_t quad_points)
    : base_(std::move(base)), grid_(make_grid(n)) {
    if (quad_points == 0) throw DomainError("QuantizedModel: quad_points must be positive");
    const QuadratureRule rule = gauss_legendre(quad_points);
    weights_.resize(quad_points);
    for (std::size_t q = 0; q < quad_points; ++q) weights_[q] = 0.5 * rule.weights[q];
    nodes_.resize(grid_.size() * quad_points);
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        const Cell c = grid_.cell(i);
        const double mid = 0.5 * (c.lo + c.hi), half = 0.5 * c.length();
        for (std::size_t q = 0; q < quad_points; ++q) nodes_[i * quad_points + q] = mid + half * rule.nodes[q];
    }
}

std::span<const double> QuantizedModel::cell_nodes(std::size_t i) const {
    return std::span<const double>(nodes_).subspan(i * weights_.size(), weights_.size());
}

double QuantizedModel::cost(std::size_t i, double a, double mean) const {
    const auto z = cell_nodes(i);
    double c = 0.0;
    for (std::size_t q = 0; q < z.size(); ++q) c += weights_[q] * cost_given_mean(base_, z[q], a, mean);
    return c;
}

void QuantizedModel::transition_row(std::size_t i, double a, double mean, std::span<double> out) const {
    if (out.size() != grid_.size()) throw DimensionError("QuantizedModel::transition_row: size mismatch");
    const auto z = cell_nodes(i);
    std::vector<double> row(grid_.size());
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t q = 0; q < z.size(); ++q) {
        kernel_row_at_center(base_, grid_, kernel_center(base_, z[q], a, mean), row);
        for (std::size_t j = 0; j < row.size(); ++j) out[j] += weights_[q] * row[j];
    }
}

double QuantizedModel::expected_value(std::size_t i, double a, double mean, std::span<const double> values) const {
    const auto z = cell_nodes(i);
    double e = 0.0;
    for (std::size_t q = 0; q < z.size(); ++q)
        e += weights_[q] * kernel_expectation_at_center(base_, grid_, kernel_center(base_, z[q], a, mean), values);
    return e;
}

double QuantizedModel::measure_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const {
    return w1_discrete_metric(mu, nu);
}

double QuantizedModel::value_lipschitz_bound(double gamma) const {
    const double f = 1.0 + 2.0 / static_cast<double>(grid_.size());
    const DeclaredConstants& c = base_.constants;
    const double denom = 1.0 - base_.beta * c.K2 * f;
    if (denom <= 0.0) return std::numeric_limits<double>::infinity();
    return gamma * c.L2 * f / denom;
}

double QuantizedModel::cost(std::size_t i, double a, const DiscreteMeasure& mu) const {
    if (a < base_.a_lo || a > base_.a_hi) throw DomainError("QuantizedModel::cost: action out of bounds");
    return cost(i, a, population_mean(mu));
}

DiscreteMeasure QuantizedModel::kernel_row(std::size_t i, double a, const DiscreteMeasure& mu) const {
    if (a < base_.a_lo || a > base_.a_hi) throw DomainError("QuantizedModel::kernel_row: action out of bounds");
    std::vector<double> row(grid_.size());
    transition_row(i, a, population_mean(mu), row);
    return DiscreteMeasure::renormalized(std::move(row));
}

QuantizedModel build_quantized(const ModelSpec& model, std::size_t n, std::size_t quad_points) {
    return QuantizedModel(model, n, quad_points);
}

ExtendedModel::ExtendedModel(const QuantizedModel& quantized) : qm_(&quantized) {}

ExtendedModel extend(const QuantizedModel& qm) { return ExtendedModel(qm); }

double ExtendedModel::mean_of_projection(const AtomicMeasure& mu) const {
    const StateGrid& g = qm_->grid();
    const DiscreteMeasure mu_d = project_measure(g, cell_masses(g, mu));
    return qm_->population_mean(mu_d);
}

double ExtendedModel::cost(double x, double a, const AtomicMeasure& mu) const {
    return qm_->cost(quantize(qm_->grid(), x), a, mean_of_projection(mu));
}

AtomicMeasure ExtendedModel::kernel(double x, double a, const AtomicMeasure& mu) const {
    const StateGrid& g = qm_->grid();
    std::vector<double> row(g.size());
    qm_->transition_row(quantize(g, x), a, mean_of_projection(mu), row);
    AtomicMeasure out;
    out.points.assign(g.points().begin(), g.points().end());
    out.weights = std::move(row);
    return out;
}

double ExtendedModel::bellman_value(double x, double a, const AtomicMeasure& mu, std::span<const double> grid_values,
                                    double gamma) const {
    const std::size_t i = quantize(qm_->grid(), x);
    const double mean = mean_of_projection(mu);
    return gamma * qm_->cost(i, a, mean) + qm_->discount() * qm_->expected_value(i, a, mean, grid_values);
}

double ExtendedModel::argmin_action(double x, const AtomicMeasure& mu, std::span<const double> grid_values,
                                    double gamma, double tol) const {
    const std::size_t i = quantize(qm_->grid(), x);
    const double mean = mean_of_projection(mu);
    auto f = [&](double a) {
        return gamma * qm_->cost(i, a, mean) + qm_->discount() * qm_->expected_value(i, a, mean, grid_values);
    };
    return minimize_unimodal(f, qm_->action_lo(), qm_->action_hi(), tol);
}

std::vector<double> ExtendedModel::grid_values(const ExtendedIterate& state) const {
    const StateGrid& g = qm_->grid();
    std::vector<double> out(g.size());
    std::vector<bool> found(g.size(), false);
    for (std::size_t k = 0; k < state.points.size(); ++k) {
        const std::size_t i = quantize(g, state.points[k]);
        if (state.points[k] == g.point(i)) {
            out[i] = state.values[k];
            found[i] = true;
        }
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!found[i]) throw DimensionError("extended iterate is missing grid point " + std::to_string(i));
    }
    return out;
}

ExtendedIterate ExtendedModel::step(const ExtendedIterate& state, double gamma, double tol) const {
    if (state.values.size() != state.points.size()) throw DimensionError("ExtendedModel::step: ragged iterate");
    const StateGrid& g = qm_->grid();
    const std::vector<double> gv = grid_values(state);
    const double mean = mean_of_projection(state.measure);

    // Everything depends on x only through its cell, so solve once per cell.
    std::vector<double> cell_action(g.size()), cell_value(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto f = [&](double a) {
            return gamma * qm_->cost(i, a, mean) + qm_->discount() * qm_->expected_value(i, a, mean, gv);
        };
        cell_action[i] = minimize_unimodal(f, qm_->action_lo(), qm_->action_hi(), tol);
        cell_value[i] = f(cell_action[i]);
    }

    ExtendedIterate next;
    next.points = state.points;
    next.values.resize(state.points.size());
    next.policy.resize(state.points.size());
    for (std::size_t k = 0; k < state.points.size(); ++k) {
        const std::size_t i = quantize(g, state.points[k]);
        next.values[k] = cell_value[i];
        next.policy[k] = cell_action[i];
    }

    std::vector<double> weights(g.size(), 0.0), row(g.size());
    for (std::size_t k = 0; k < state.measure.points.size(); ++k) {
        const double w = state.measure.weights[k];
        if (w == 0.0) continue;
        const std::size_t i = quantize(g, state.measure.points[k]);
        qm_->transition_row(i, cell_action[i], mean, row);
        for (std::size_t j = 0; j < g.size(); ++j) weights[j] += row[j] * w;
    }
    const DiscreteMeasure m = DiscreteMeasure::renormalized(std::move(weights));
    next.measure = to_atoms(g, m);
    return next;
}

Residuals ExtendedModel::residuals(std::span<const double> grid_values, std::span<const double> grid_policy,
                                   const AtomicMeasure& mu, double gamma, double tol) const {
    const StateGrid& g = qm_->grid();
    if (grid_values.size() != g.size() || grid_policy.size() != g.size())
        throw DimensionError("ExtendedModel::residuals: tables do not match the grid");
    Residuals r;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.point(i);
        const double a = argmin_action(x, mu, grid_values, gamma, tol);
        r.bellman = std::max(r.bellman, std::abs(bellman_value(x, a, mu, grid_values, gamma) - grid_values[i]));
    }
    std::vector<double> pushed(g.size(), 0.0);
    const double mean = mean_of_projection(mu);
    std::vector<double> row(g.size());
    for (std::size_t k = 0; k < mu.points.size(); ++k) {
        const std::size_t i = quantize(g, mu.points[k]);
        qm_->transition_row(i, grid_policy[i], mean, row);
        for (std::size_t j = 0; j < g.size(); ++j) pushed[j] += row[j] * mu.weights[k];
    }
    const DiscreteMeasure before = project_measure(g, cell_masses(g, mu));
    r.invariance = w1_1d(g, before, DiscreteMeasure::renormalized(std::move(pushed)));
    return r;
}

ExtendedIterate lift_iterate(const QuantizedModel& qm, std::span<const double> points, const ValueTable& V,
                             const DiscreteMeasure& mu) {
    const StateGrid& g = qm.grid();
    if (V.size() != g.size() || mu.size() != g.size()) throw DimensionError("lift_iterate: size mismatch");
    ExtendedIterate it;
    it.points.assign(points.begin(), points.end());
    it.values.resize(points.size());
    for (std::size_t k = 0; k < points.size(); ++k) it.values[k] = V[quantize(g, points[k])];
    it.measure = to_atoms(g, lift_measure(mu));
    return it;
}

EquilibriumResult solve_quantized(const QuantizedModel& qm, double gamma, const SolverConfig& config) {
    ValueTable V0;
    V0.values.assign(qm.size(), 0.0);
    return mfe_iterate(qm, V0, DiscreteMeasure::uniform(qm.size()), gamma, config);
}

std::function<double(double)> extend_policy(const QuantizedModel& qm, const PolicyTable& policy) {
    if (policy.size() != qm.size()) throw DimensionError("extend_policy: policy does not match the grid");
    StateGrid g = qm.grid();
    return [g = std::move(g), actions = policy.actions](double x) { return actions[quantize(g, x)]; };
}

std::vector<double> sample_on_grid(const std::function<double(double)>& f, const StateGrid& grid) {
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = f(grid.point(i));
    return out;
}

}  // namespace mfg
