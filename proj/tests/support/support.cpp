#include "support.hpp"

#include <algorithm>
#include <cmath>

#include "mfg/conditions.hpp"

namespace testsupport {

std::vector<NamedModel> builtin_models() {
    std::vector<NamedModel> out;
    out.push_back({"quadratic-drift", mfg::default_model()});
    out.push_back({"constant-kernel", mfg::make_model(mfg::kConstantKernel, {}, 0.3, 0.0, 1.0)});

    mfg::ModelParams mixed;
    mixed.mixture = 0.25;
    mixed.bump = 0.05;
    out.push_back({"quadratic-drift-mixed", mfg::make_model(mfg::kQuadraticDrift, mixed, 0.4, 0.0, 1.0)});

    mfg::ModelParams targeted;
    targeted.target = 0.6;
    targeted.kappa_0 = 0.2;
    targeted.kappa_m = 0.3;
    targeted.sigma = 0.8;
    out.push_back({"quadratic-drift-target", mfg::make_model(mfg::kQuadraticDrift, targeted, 0.3, 0.0, 1.0)});
    return out;
}

mfg::ModelSpec decoupled_model() {
    mfg::ModelParams p;
    p.target = 0.35;
    p.bump = 0.05;
    return mfg::make_model(mfg::kConstantKernel, p, 0.5, 0.0, 1.0);
}

mfg::ModelSpec population_free_model() {
    mfg::ModelParams p;
    p.target = 0.5;
    p.kappa_m = 0.0;
    p.kappa_x = 0.3;
    p.kappa_u = 0.25;
    p.sigma = 0.9;
    p.mixture = 0.1;
    return mfg::make_model(mfg::kQuadraticDrift, p, 0.4, 0.0, 1.0);
}

mfg::ModelSpec random_certified_model(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (;;) {
        mfg::ModelParams p;
        p.c_x = 0.3 * u(rng);
        p.c_a = 0.8 + 0.7 * u(rng);
        p.kappa_a = 0.8 * u(rng);
        p.kappa_0 = 0.2 * u(rng);
        p.kappa_x = 0.4 * u(rng);
        p.kappa_u = 0.3 * u(rng);
        p.kappa_m = 0.2 * u(rng);
        p.sigma = 0.5 + u(rng);
        p.mixture = 0.3 * u(rng);
        p.bump = 0.1 * u(rng);
        const double beta = 0.2 + 0.3 * u(rng);
        try {
            mfg::ModelSpec m = mfg::make_model(mfg::kQuadraticDrift, p, beta, 0.0, 1.0);
            if (mfg::certify(m).theorem1_holds) return m;
        } catch (const std::exception&) {
        }
    }
}

mfg::ValueTable random_value_table(const mfg::ModelSpec& model, const mfg::StateGrid& grid, double gamma,
                                   std::mt19937_64& rng) {
    const auto& c = model.constants;
    const double vmax = gamma * c.M / (1.0 - model.beta);
    const double lip = gamma * c.L2 / (1.0 - model.beta * c.K2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    mfg::ValueTable V;
    V.values.resize(grid.size());
    V.values[0] = vmax * u(rng);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double dx = grid.point(i) - grid.point(i - 1);
        V.values[i] = std::clamp(V.values[i - 1] + lip * dx * (2.0 * u(rng) - 1.0), 0.0, vmax);
    }
    return V;
}

mfg::DiscreteMeasure random_measure(std::size_t n, std::mt19937_64& rng) {
    std::exponential_distribution<double> e(1.0);
    std::uniform_int_distribution<int> coin(0, 3);
    const bool sparse = coin(rng) == 0;
    std::vector<double> w(n);
    for (double& v : w) v = (sparse && coin(rng) != 0) ? 0.0 : e(rng);
    if (std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; })) w[0] = 1.0;
    double s = 0.0;
    for (double v : w) s += v;
    for (double& v : w) v /= s;
    return mfg::DiscreteMeasure::renormalized(std::move(w));
}

mfg::DiscreteMeasure nudge(const mfg::DiscreteMeasure& mu, double size, std::mt19937_64& rng) {
    const mfg::DiscreteMeasure other = random_measure(mu.size(), rng);
    std::vector<double> w(mu.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = (1.0 - size) * mu[i] + size * other[i];
    return mfg::DiscreteMeasure::renormalized(std::move(w));
}

}  // namespace testsupport
