#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mdp_oracle.hpp"
#include "mfg/conditions.hpp"
#include "mfg/errors.hpp"
#include "mfg/metrics.hpp"
#include "mfg/quantizer.hpp"
#include "support.hpp"

using namespace mfg;

namespace {

// Composite Simpson rule, independent of the Gauss-Legendre nodes.
template <class F>
double simpson(F f, double lo, double hi, int panels = 2000) {
    const double h = (hi - lo) / panels;
    double s = f(lo) + f(hi);
    for (int k = 1; k < panels; ++k) s += (k % 2 ? 4.0 : 2.0) * f(lo + k * h);
    return s * h / 3.0;
}

ModelSpec quadratic_only(double kappa_a, std::optional<double> target) {
    ModelParams p;
    p.c_x = 1.0;
    p.c_a = 1.0;
    p.kappa_a = kappa_a;
    p.target = target;
    return make_model(kQuadraticDrift, p, 0.3, 0.0, 1.0);
}

}  // namespace

TEST(GaussLegendre, ExactOnPolynomials) {
    for (std::size_t p = 1; p <= 12; ++p) {
        const auto rule = gauss_legendre(p);
        double wsum = 0.0;
        for (double w : rule.weights) wsum += w;
        EXPECT_NEAR(wsum, 2.0, 1e-14);
        for (std::size_t d = 0; d <= 2 * p - 1; ++d) {
            double s = 0.0;
            for (std::size_t q = 0; q < p; ++q) s += rule.weights[q] * std::pow(rule.nodes[q], static_cast<double>(d));
            const double exact = d % 2 ? 0.0 : 2.0 / static_cast<double>(d + 1);
            EXPECT_NEAR(s, exact, 1e-13) << "p=" << p << " d=" << d;
        }
    }
    EXPECT_THROW(gauss_legendre(0), DomainError);
}

TEST(Quantized, CellAverageOfQuadraticCost) {
    const QuantizedModel qm(quadratic_only(0.0, 0.0), 2);
    EXPECT_NEAR(qm.cost(0, 0.0, DiscreteMeasure::uniform(2)), 1.0 / 12.0, 1e-15);
    EXPECT_NEAR(qm.cost(1, 0.0, DiscreteMeasure::uniform(2)), 7.0 / 12.0, 1e-15);
    for (std::size_t q = 0; q < qm.quad_points(); ++q) {
        EXPECT_GE(qm.cell_nodes(0)[q], 0.0);
        EXPECT_LE(qm.cell_nodes(0)[q], 0.5);
    }
}

TEST(Quantized, CostMatchesIndependentAverage) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 5; ++k) {
        const ModelSpec m = testsupport::random_certified_model(rng);
        const std::size_t n = 3 + static_cast<std::size_t>(k);
        const QuantizedModel qm(m, n, 8);
        const StateGrid& g = qm.grid();
        const auto mu = testsupport::random_measure(n, rng);
        const double mean = mean_of(g, mu);
        for (std::size_t i = 0; i < n; ++i) {
            const double a = u(rng);
            const Cell c = g.cell(i);
            const double ref =
                simpson([&](double x) { return cost_given_mean(m, x, a, mean); }, c.lo, c.hi) / c.length();
            EXPECT_NEAR(qm.cost(i, a, mu), ref, 1e-9);
        }
    }
}

TEST(Quantized, CellConstantCostIsReproduced) {
    // With c_x = 0 and kappa_a = 0 the cost does not depend on the state.
    ModelParams p;
    p.c_x = 0.0;
    p.kappa_a = 0.0;
    const ModelSpec m = make_model(kQuadraticDrift, p, 0.3, 0.0, 1.0);
    const QuantizedModel qm(m, 7, 3);
    for (std::size_t i = 0; i < 7; ++i)
        for (double a : {0.0, 0.25, 0.9}) EXPECT_NEAR(qm.cost(i, a, DiscreteMeasure::uniform(7)), a * a, 1e-15);
}

TEST(Quantized, RowsAreStochastic) {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto& [name, m] : testsupport::builtin_models()) {
        for (std::size_t n : {1, 2, 5, 16}) {
            const QuantizedModel qm(m, n);
            for (std::size_t i = 0; i < n; ++i) {
                const auto row = qm.kernel_row(i, u(rng), testsupport::random_measure(n, rng));
                double s = 0.0;
                for (double w : row.weights()) {
                    EXPECT_GE(w, 0.0);
                    s += w;
                }
                EXPECT_NEAR(s, 1.0, 1e-12) << name;
                if (n == 1) EXPECT_EQ(row[0], 1.0);
            }
        }
    }
}

TEST(Quantized, ConstantKernelRowMatchesOracle) {
    const ModelSpec m = testsupport::decoupled_model();
    const QuantizedModel qm(m, 9);
    const auto ref = oracle::kernel_row(m, 9, 0.5, 0.5);
    for (std::size_t i = 0; i < 9; ++i) {
        const auto row = qm.kernel_row(i, 0.3, DiscreteMeasure::uniform(9));
        for (std::size_t j = 0; j < 9; ++j) EXPECT_NEAR(row[j], ref[j], 1e-14);
    }
}

TEST(Quantized, ActionBoundsAreEnforced) {
    const QuantizedModel qm(default_model(), 4);
    EXPECT_THROW(qm.cost(0, 1.5, DiscreteMeasure::uniform(4)), DomainError);
    EXPECT_THROW(qm.kernel_row(0, -0.5, DiscreteMeasure::uniform(4)), DomainError);
    EXPECT_THROW(QuantizedModel(default_model(), 4, 0), DomainError);
}

TEST(Quantized, SingleCellClosedForm) {
    const double kappa_a = 0.6, beta = 0.3;
    const QuantizedModel qm(quadratic_only(kappa_a, std::nullopt), 1);
    const double gamma = 1.0;
    const auto r = solve_quantized(qm, gamma);
    ASSERT_TRUE(r.converged);
    EXPECT_NEAR(r.policy[0], kappa_a / 2.0, 1e-8);
    const double c_star = 1.0 / 12.0 + kappa_a * kappa_a / 12.0;
    EXPECT_NEAR(r.values[0], gamma * c_star / (1.0 - beta), 1e-8);
    EXPECT_EQ(r.measure[0], 1.0);
}

TEST(Quantized, DecoupledSolveMatchesCellAveragedMdp) {
    const ModelSpec m = testsupport::decoupled_model();
    const auto& p = m.params;
    SolverConfig cfg;
    cfg.tol_v = 1e-11;
    cfg.tol_mu = 1e-11;
    for (std::size_t n : {2, 4, 8, 16}) {
        const QuantizedModel qm(m, n);
        const auto r = solve_quantized(qm, 1.0, cfg);
        ASSERT_TRUE(r.converged);

        // The kernel ignores the action, so the optimal action minimizes the
        // averaged cost alone: a = kappa_a * cell mean.
        const auto row = oracle::kernel_row(m, n, 0.5, 0.5);
        std::vector<double> cstar(n);
        for (std::size_t i = 0; i < n; ++i) {
            const Cell c = qm.grid().cell(i);
            const double xbar = 0.5 * (c.lo + c.hi);
            const double a = std::clamp(p.kappa_a * xbar, m.a_lo, m.a_hi);
            cstar[i] = simpson([&](double x) { return oracle::cost(m, x, a); }, c.lo, c.hi) / c.length();
            EXPECT_NEAR(r.policy[i], a, 1e-7);
        }
        double cont = 0.0;
        for (std::size_t j = 0; j < n; ++j) cont += row[j] * cstar[j];
        for (std::size_t i = 0; i < n; ++i)
            EXPECT_NEAR(r.values[i], cstar[i] + m.beta / (1.0 - m.beta) * cont, 1e-9) << "n=" << n;
        for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(r.measure[j], row[j], 1e-10);
    }
}

TEST(Quantized, LipschitzBoundCarriesGridFactor) {
    const ModelSpec m = default_model();
    const auto& c = m.constants;
    for (std::size_t n : {1, 2, 10, 1000}) {
        const QuantizedModel qm(m, n, 2);
        const double f = 1.0 + 2.0 / static_cast<double>(n);
        EXPECT_NEAR(qm.value_lipschitz_bound(0.7), 0.7 * c.L2 * f / (1.0 - m.beta * c.K2 * f), 1e-14);
    }
    const GridGame g(m, make_grid(4));
    EXPECT_NEAR(g.value_lipschitz_bound(0.7), 0.7 * c.L2 / (1.0 - m.beta * c.K2), 1e-14);
}

TEST(Extended, CostAndKernelAreCellConstant) {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const ModelSpec m = testsupport::builtin_models()[2].model;
    const QuantizedModel qm(m, 6, 5);
    const ExtendedModel ext(qm);
    const auto mu = testsupport::random_measure(6, rng);
    const AtomicMeasure atoms = to_atoms(qm.grid(), mu);
    for (int k = 0; k < 100; ++k) {
        const double x = u(rng), a = u(rng);
        const std::size_t i = quantize(qm.grid(), x);
        EXPECT_NEAR(ext.cost(x, a, atoms), qm.cost(i, a, mu), 1e-15);
        const auto next = ext.kernel(x, a, atoms);
        const auto row = qm.kernel_row(i, a, mu);
        ASSERT_EQ(next.points.size(), 6u);
        for (std::size_t j = 0; j < 6; ++j) {
            EXPECT_EQ(next.points[j], qm.grid().point(j));
            EXPECT_NEAR(next.weights[j], row[j], 1e-15);
        }
    }
    // Off-grid atoms act through their cells.
    const AtomicMeasure shifted{{0.01, 0.99}, {0.5, 0.5}};
    const AtomicMeasure snapped{{qm.grid().point(0), qm.grid().point(5)}, {0.5, 0.5}};
    EXPECT_NEAR(ext.cost(0.4, 0.3, shifted), ext.cost(0.4, 0.3, snapped), 1e-15);
}

TEST(Extended, LiftRoundTrip) {
    std::mt19937_64 rng(43);
    const QuantizedModel qm(default_model(), 5);
    const ExtendedModel ext = extend(qm);
    ValueTable V{{0.1, 0.2, 0.3, 0.4, 0.5}};
    const auto mu = testsupport::random_measure(5, rng);
    std::vector<double> pts{0.0, 0.05, 0.33, 1.0};
    for (double x : qm.grid().points()) pts.push_back(x);
    const auto it = lift_iterate(qm, pts, V, mu);
    EXPECT_EQ(ext.grid_values(it), V.values);
    EXPECT_EQ(it.values[2], V[quantize(qm.grid(), 0.33)]);
    EXPECT_EQ(cell_masses(qm.grid(), it.measure), std::vector<double>(mu.weights().begin(), mu.weights().end()));

    const std::vector<double> no_grid{0.1, 0.2};
    EXPECT_THROW(ext.grid_values(lift_iterate(qm, no_grid, V, mu)), DimensionError);
}

TEST(Extended, StepAgreesWithQuantizedOperator) {
    std::mt19937_64 rng(47);
    const ModelSpec m = testsupport::random_certified_model(rng);
    const double gamma = certify(m).default_gamma;
    const QuantizedModel qm(m, 7, 4);
    const ExtendedModel ext(qm);
    std::vector<double> pts(qm.grid().points().begin(), qm.grid().points().end());
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 20; ++k) pts.push_back(u(rng));

    auto V = testsupport::random_value_table(m, qm.grid(), gamma, rng);
    auto mu = testsupport::random_measure(7, rng);
    auto state = lift_iterate(qm, pts, V, mu);
    for (int t = 0; t < 10; ++t) {
        const auto h = h1_apply(qm, V, mu, gamma);
        const auto next_mu = h2_apply(qm, h.policy, mu);
        state = ext.step(state, gamma);
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const std::size_t i = quantize(qm.grid(), pts[k]);
            EXPECT_NEAR(state.values[k], h.values[i], 1e-12);
            EXPECT_NEAR(state.policy[k], h.policy[i], 1e-12);
        }
        const auto masses = cell_masses(qm.grid(), state.measure);
        for (std::size_t j = 0; j < 7; ++j) EXPECT_NEAR(masses[j], next_mu[j], 1e-12);
        V = h.values;
        mu = next_mu;
    }
}

TEST(Extended, EquilibriumResidualsStaySmall) {
    for (const auto& [name, m] : testsupport::builtin_models()) {
        const double gamma = certify(m).default_gamma;
        const QuantizedModel qm(m, 8);
        const SolverConfig cfg;
        const auto r = solve_quantized(qm, gamma, cfg);
        ASSERT_TRUE(r.converged) << name;
        const auto res = extend(qm).residuals(r.values.values, r.policy.actions, to_atoms(qm.grid(), r.measure), gamma);
        EXPECT_LE(res.bellman, cfg.tol_v) << name;
        EXPECT_LE(res.invariance, cfg.tol_mu) << name;

        const auto pol = extend_policy(qm, r.policy);
        for (double x : {0.0, 0.1, 0.49, 0.77, 1.0}) EXPECT_EQ(pol(x), r.policy[quantize(qm.grid(), x)]);
        const auto sampled = sample_on_grid(pol, qm.grid());
        EXPECT_EQ(sampled, r.policy.actions);
    }
}
