#include <gtest/gtest.h>

#include <random>

#include "mfg/errors.hpp"
#include "mfg/grid.hpp"
#include "support.hpp"

using namespace mfg;

TEST(Grid, SingleCell) {
    const StateGrid g = make_grid(1);
    ASSERT_EQ(g.size(), 1u);
    EXPECT_DOUBLE_EQ(g.point(0), 0.5);
    EXPECT_DOUBLE_EQ(g.cell_bounds()[0], 0.0);
    EXPECT_DOUBLE_EQ(g.cell_bounds()[1], 1.0);
    EXPECT_DOUBLE_EQ(g.mesh(), 0.5);
}

TEST(Grid, TwoCells) {
    const StateGrid g = make_grid(2);
    EXPECT_DOUBLE_EQ(g.point(0), 0.25);
    EXPECT_DOUBLE_EQ(g.point(1), 0.75);
    ASSERT_EQ(g.cell_bounds().size(), 3u);
    EXPECT_DOUBLE_EQ(g.cell_bounds()[1], 0.5);
    EXPECT_DOUBLE_EQ(g.mesh(), 0.25);
}

TEST(Grid, MeshBelowReciprocalSize) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t n = 1; n <= 64; ++n) {
        const StateGrid g = make_grid(n);
        EXPECT_LT(g.mesh(), 1.0 / static_cast<double>(n));
        for (std::size_t i = 0; i < n; ++i) {
            EXPECT_GE(g.point(i), g.cell_bounds()[i]);
            EXPECT_LT(g.point(i), g.cell_bounds()[i + 1]);
            if (i > 0) EXPECT_GT(g.point(i), g.point(i - 1));
            EXPECT_EQ(quantize(g, g.point(i)), i);
        }
        for (int k = 0; k < 50; ++k) {
            const double x = u(rng);
            EXPECT_LE(std::abs(x - g.point(quantize(g, x))), g.mesh() + 1e-15);
        }
    }
}

TEST(Grid, QuantizeNearestWithLowerTie) {
    const StateGrid g = make_grid(2);
    EXPECT_EQ(quantize(g, 0.3), 0u);
    EXPECT_EQ(quantize(g, 0.5), 0u);
    EXPECT_EQ(quantize(g, 0.75), 1u);
    EXPECT_EQ(quantize(g, 0.0), 0u);
    EXPECT_EQ(quantize(g, 1.0), 1u);
    EXPECT_THROW(quantize(g, -0.1), DomainError);
    EXPECT_THROW(quantize(g, 1.5), DomainError);
}

TEST(Measure, Validation) {
    EXPECT_NO_THROW(DiscreteMeasure({0.25, 0.75}));
    EXPECT_THROW(DiscreteMeasure({-0.1, 1.1}), InvalidMeasureError);
    EXPECT_THROW(DiscreteMeasure({0.5, 0.6}), InvalidMeasureError);
    EXPECT_THROW(DiscreteMeasure::renormalized({0.5, 0.6}), InvalidMeasureError);
    const auto m = DiscreteMeasure::renormalized({0.5, 0.5 + 1e-9});
    EXPECT_NEAR(m[0] + m[1], 1.0, 1e-15);
}

TEST(Measure, RandomRenormalizationsStayOnSimplex) {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 200; ++k) {
        const auto mu = testsupport::random_measure(1 + k % 20, rng);
        double s = 0.0;
        for (double w : mu.weights()) {
            EXPECT_GE(w, 0.0);
            s += w;
        }
        EXPECT_NEAR(s, 1.0, 1e-12);
    }
}

TEST(Measure, LiftAndProject) {
    const StateGrid g = make_grid(2);
    const auto d = DiscreteMeasure::dirac(2, 0);
    const auto atoms = to_atoms(g, lift_measure(d));
    ASSERT_EQ(atoms.points.size(), 2u);
    EXPECT_DOUBLE_EQ(atoms.points[0], 0.25);
    EXPECT_DOUBLE_EQ(atoms.weights[0], 1.0);
    EXPECT_EQ(lift_measure(DiscreteMeasure::uniform(2)), DiscreteMeasure::uniform(2));

    std::mt19937_64 rng(9);
    for (int k = 0; k < 50; ++k) {
        const std::size_t n = 1 + k % 12;
        const auto mu = testsupport::random_measure(n, rng);
        const StateGrid gn = make_grid(n);
        EXPECT_EQ(project_measure(gn, lift_measure(mu).weights()), mu);
        EXPECT_EQ(cell_masses(gn, to_atoms(gn, mu)), std::vector<double>(mu.weights().begin(), mu.weights().end()));
    }
}

TEST(Measure, ProjectCellMasses) {
    const StateGrid g = make_grid(2);
    const std::vector<double> delta{1.0, 0.0};
    EXPECT_EQ(project_measure(g, delta), DiscreteMeasure::dirac(2, 0));
    const std::vector<double> masses{0.3, 0.7};
    const auto p = project_measure(g, masses);
    EXPECT_DOUBLE_EQ(p[0], 0.3);
    EXPECT_DOUBLE_EQ(p[1], 0.7);

    // Lebesgue measure: the mass of each cell is its length.
    std::vector<double> lebesgue;
    for (std::size_t i = 0; i < 2; ++i) lebesgue.push_back(g.cell_bounds()[i + 1] - g.cell_bounds()[i]);
    const auto leb = project_measure(g, lebesgue);
    EXPECT_DOUBLE_EQ(leb[0], 0.5);
    EXPECT_DOUBLE_EQ(leb[1], 0.5);

    const std::vector<double> bad{0.3, 0.6};
    EXPECT_THROW(project_measure(g, bad), InvalidMeasureError);
}

TEST(Measure, AtomsOffGridFallIntoCells) {
    const StateGrid g = make_grid(4);
    AtomicMeasure mu{{0.1, 0.2, 0.9}, {0.2, 0.3, 0.5}};
    const auto masses = cell_masses(g, mu);
    EXPECT_DOUBLE_EQ(masses[0], 0.5);
    EXPECT_DOUBLE_EQ(masses[3], 0.5);
    EXPECT_NEAR(mean_of(mu), 0.1 * 0.2 + 0.2 * 0.3 + 0.9 * 0.5, 1e-15);
}

TEST(Tables, SupDistance) {
    const std::vector<double> a{0.0, 1.0, 2.0};
    const std::vector<double> b{0.5, 1.0, 1.0};
    EXPECT_DOUBLE_EQ(sup_distance(a, b), 1.0);
    const std::vector<double> c{0.0};
    EXPECT_THROW(sup_distance(a, c), DimensionError);
}
