#include "mfg/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "mfg/errors.hpp"
#include "mfg/metrics.hpp"

namespace mfg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

void require(bool ok, const std::string& msg) {
    if (!ok) throw ParameterError(msg);
}

// Raw kernel center range over x, m in [0,1] and a in [a_lo, a_hi].
std::pair<double, double> center_range(const ModelParams& p, double a_lo, double a_hi) {
    const double lo = p.kappa_0 + std::min(0.0, p.kappa_x) + std::min(p.kappa_u * a_lo, p.kappa_u * a_hi) +
                      std::min(0.0, p.kappa_m);
    const double hi = p.kappa_0 + std::max(0.0, p.kappa_x) + std::max(p.kappa_u * a_lo, p.kappa_u * a_hi) +
                      std::max(0.0, p.kappa_m);
    return {lo, hi};
}

void apply_overrides(DeclaredConstants& c, const ConstantOverrides& o) {
    if (o.M) c.M = *o.M;
    if (o.L1) c.L1 = *o.L1;
    if (o.L2) c.L2 = *o.L2;
    if (o.K1) c.K1 = *o.K1;
    if (o.K2) c.K2 = *o.K2;
    if (o.alpha) c.alpha = *o.alpha;
    if (o.rho) c.rho = *o.rho;
    if (o.K_F) c.K_F = *o.K_F;
}

void check_overrides(const ConstantOverrides& o) {
    const std::pair<const char*, const std::optional<double>*> fields[] = {
        {"M", &o.M},   {"L1", &o.L1},       {"L2", &o.L2},   {"K1", &o.K1},
        {"K2", &o.K2}, {"alpha", &o.alpha}, {"rho", &o.rho}, {"K_F", &o.K_F}};
    for (const auto& [name, value] : fields) {
        if (*value) require(finite_nonneg(**value), std::string("constant override ") + name + " must be >= 0");
    }
}

}  // namespace

DeclaredConstants derive_constants(const std::string& family, const ModelParams& p, double beta, double a_lo,
                                   double a_hi) {
    const bool constant_kernel = family == kConstantKernel;
    const double kx = constant_kernel ? 0.0 : p.kappa_x;
    const double ku = constant_kernel ? 0.0 : p.kappa_u;
    const double km = constant_kernel ? 0.0 : p.kappa_m;

    // l1 norms of the first and second derivative of the kernel row with
    // respect to its center (truncated Gaussian part only).
    const double s = p.sigma;
    const double l_tv = (1.0 - p.mixture) * std::min(s, 0.5) / (s * s);
    const double l_2 = (1.0 - p.mixture) * 2.0 * std::min(s * s, 0.25) / (s * s * s * s);

    double d_a = 0.0;
    for (double x : {0.0, 1.0})
        for (double a : {a_lo, a_hi}) d_a = std::max(d_a, std::abs(a - p.kappa_a * x));

    DeclaredConstants c;
    c.M = p.c_x + p.c_a * d_a * d_a + p.bump;
    c.L1 = p.target ? 0.0 : 4.0 * p.c_x;
    c.L2 = 2.0 * p.c_x + 2.0 * p.c_a * std::abs(p.kappa_a) * d_a + std::numbers::pi * p.bump;
    c.K1 = l_tv * std::max(std::abs(ku), std::abs(km));
    c.K2 = l_tv * std::max(std::abs(kx), std::abs(ku));
    c.alpha = 1.0;

    const double v_max = c.M / (1.0 - beta);
    const double curvature_swing = l_2 * v_max / 2.0;
    c.rho = 2.0 * p.c_a - beta * ku * ku * curvature_swing;
    c.K_F = std::max({2.0 * p.c_a * std::abs(p.kappa_a) + beta * std::abs(ku * kx) * curvature_swing,
                      beta * std::abs(ku) * l_tv, beta * std::abs(ku * km) * curvature_swing});

    if (ku != 0.0 && !constant_kernel) {
        const auto [lo, hi] = center_range(p, a_lo, a_hi);
        // Clamping makes the action gradient discontinuous.
        if (lo < 0.0 || hi > 1.0) c.K_F = kInf;
    }
    return c;
}

ModelSpec make_model(std::string family, ModelParams params, double beta, double a_lo, double a_hi,
                     ConstantOverrides overrides) {
    require(family == kQuadraticDrift || family == kConstantKernel, "unknown model family '" + family + "'");
    require(std::isfinite(beta) && beta > 0.0 && beta < 1.0, "discount must lie in (0,1)");
    require(std::isfinite(a_lo) && std::isfinite(a_hi) && a_lo < a_hi, "action bounds need a_lo < a_hi");
    require(std::isfinite(params.sigma) && params.sigma > 0.0, "sigma must be positive");
    require(params.mixture >= 0.0 && params.mixture <= 1.0, "mixture weight must lie in [0,1]");
    require(finite_nonneg(params.c_x) && finite_nonneg(params.c_a), "cost weights must be nonnegative");
    require(finite_nonneg(params.bump), "bump weight must be nonnegative");
    for (double k : {params.kappa_a, params.kappa_0, params.kappa_x, params.kappa_u, params.kappa_m})
        require(std::isfinite(k), "kernel coefficients must be finite");
    if (params.target) require(*params.target >= 0.0 && *params.target <= 1.0, "target must lie in [0,1]");
    check_overrides(overrides);

    if (family == kConstantKernel) {
        params.kappa_x = 0.0;
        params.kappa_u = 0.0;
        params.kappa_m = 0.0;
    }

    ModelSpec m;
    m.family = std::move(family);
    m.params = params;
    m.beta = beta;
    m.a_lo = a_lo;
    m.a_hi = a_hi;
    m.overrides = overrides;
    m.constants = derive_constants(m.family, m.params, beta, a_lo, a_hi);
    apply_overrides(m.constants, overrides);

    require(m.constants.alpha * beta < 1.0, "alpha * beta must be below 1");
    require(m.constants.rho > 0.0,
            "strong convexity modulus rho = " + std::to_string(m.constants.rho) +
                " is not positive; raise c_a or supply a rho override");
    if (std::isinf(m.constants.K_F)) {
        m.warnings.push_back("kernel center leaves [0,1] for some (x,a,mu); the action gradient has a kink and K_F is unbounded");
    }
    return m;
}

ModelSpec default_model() { return make_model(kQuadraticDrift, ModelParams{}, 0.3, 0.0, 1.0); }

double mean_field(const ModelSpec&, const StateGrid& grid, const DiscreteMeasure& mu) { return mean_of(grid, mu); }

double cost_given_mean(const ModelSpec& model, double x, double a, double mean) {
    const ModelParams& p = model.params;
    const double m = p.target.value_or(mean);
    const double dx = x - m;
    const double da = a - p.kappa_a * x;
    double c = p.c_x * dx * dx + p.c_a * da * da;
    if (p.bump != 0.0) {
        const double s = std::sin(std::numbers::pi * x);
        c += p.bump * s * s;
    }
    return c;
}

namespace {

void check_point(const ModelSpec& model, double x, double a) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("state " + std::to_string(x) + " outside [0,1]");
    if (!(a >= model.a_lo && a <= model.a_hi)) {
        throw DomainError("action " + std::to_string(a) + " outside [" + std::to_string(model.a_lo) + ", " +
                          std::to_string(model.a_hi) + "]");
    }
}

}  // namespace

double eval_cost(const ModelSpec& model, const StateGrid& grid, double x, double a, const DiscreteMeasure& mu) {
    check_point(model, x, a);
    return cost_given_mean(model, x, a, mean_field(model, grid, mu));
}

double kernel_center(const ModelSpec& model, double x, double a, double mean) {
    const ModelParams& p = model.params;
    const double c = p.kappa_0 + p.kappa_x * x + p.kappa_u * a + p.kappa_m * mean;
    return std::clamp(c, 0.0, 1.0);
}

void kernel_row_at_center(const ModelSpec& model, const StateGrid& grid, double center, std::span<double> out) {
    if (out.size() != grid.size()) throw DimensionError("kernel_row_at_center: output size mismatch");
    const double w = model.params.mixture;
    const auto b = grid.cell_bounds();
    if (w >= 1.0) {
        for (std::size_t j = 0; j < out.size(); ++j) out[j] = b[j + 1] - b[j];
        return;
    }
    const double inv_s = 1.0 / model.params.sigma;
    const double f0 = normal_cdf((b.front() - center) * inv_s);
    const double f1 = normal_cdf((b.back() - center) * inv_s);
    const double scale = (1.0 - w) / (f1 - f0);
    double prev = f0;
    for (std::size_t j = 0; j < out.size(); ++j) {
        const double next = (j + 1 == out.size()) ? f1 : normal_cdf((b[j + 1] - center) * inv_s);
        out[j] = (next - prev) * scale + w * (b[j + 1] - b[j]);
        prev = next;
    }
}

double kernel_expectation_at_center(const ModelSpec& model, const StateGrid& grid, double center,
                                    std::span<const double> values) {
    if (values.size() != grid.size()) throw DimensionError("kernel_expectation_at_center: size mismatch");
    const double w = model.params.mixture;
    const auto b = grid.cell_bounds();
    double total = 0.0;
    if (w >= 1.0) {
        for (std::size_t j = 0; j < values.size(); ++j) total += values[j] * (b[j + 1] - b[j]);
        return total;
    }
    const double inv_s = 1.0 / model.params.sigma;
    const double f0 = normal_cdf((b.front() - center) * inv_s);
    const double f1 = normal_cdf((b.back() - center) * inv_s);
    const double scale = (1.0 - w) / (f1 - f0);
    double prev = f0;
    for (std::size_t j = 0; j < values.size(); ++j) {
        const double next = (j + 1 == values.size()) ? f1 : normal_cdf((b[j + 1] - center) * inv_s);
        total += values[j] * ((next - prev) * scale + w * (b[j + 1] - b[j]));
        prev = next;
    }
    return total;
}

DiscreteMeasure eval_kernel_row(const ModelSpec& model, const StateGrid& grid, double x, double a,
                                const DiscreteMeasure& mu) {
    check_point(model, x, a);
    std::vector<double> row(grid.size());
    kernel_row_at_center(model, grid, kernel_center(model, x, a, mean_field(model, grid, mu)), row);
    return DiscreteMeasure::renormalized(std::move(row));
}

std::string to_string(PerturbationKind kind) {
    switch (kind) {
        case PerturbationKind::KernelMixture: return "kernel-mixture";
        case PerturbationKind::KernelParameterShift: return "kernel-parameter-shift";
        case PerturbationKind::CostShift: return "cost-shift";
        case PerturbationKind::DiscountShift: return "discount-shift";
    }
    return "unknown";
}

PerturbationKind perturbation_from_string(const std::string& name) {
    for (auto k : {PerturbationKind::KernelMixture, PerturbationKind::KernelParameterShift,
                   PerturbationKind::CostShift, PerturbationKind::DiscountShift}) {
        if (to_string(k) == name) return k;
    }
    throw ParameterError("unknown perturbation kind '" + name + "'");
}

ModelSpec perturb(const ModelSpec& model, const PerturbationSpec& pert) {
    const double eps = pert.epsilon;
    require(std::isfinite(eps) && eps >= 0.0, "perturbation magnitude must be >= 0");
    if (eps == 0.0) return model;

    ModelParams p = model.params;
    double beta = model.beta;
    ConstantOverrides o = model.overrides;
    switch (pert.kind) {
        case PerturbationKind::KernelMixture:
            p.mixture = p.mixture + eps * (1.0 - p.mixture);
            if (o.K1) *o.K1 *= (1.0 - eps);
            if (o.K2) *o.K2 *= (1.0 - eps);
            break;
        case PerturbationKind::KernelParameterShift:
            p.sigma *= (1.0 + eps);
            break;
        case PerturbationKind::CostShift:
            p.bump += eps;
            if (o.M) *o.M += eps;
            if (o.L2) *o.L2 += std::numbers::pi * eps;
            break;
        case PerturbationKind::DiscountShift:
            beta *= (1.0 - eps);
            break;
    }
    return make_model(model.family, p, beta, model.a_lo, model.a_hi, o);
}

ModelSpec perturb_jointly(const ModelSpec& model, double epsilon) {
    ModelSpec m = perturb(model, {PerturbationKind::CostShift, epsilon});
    m = perturb(m, {PerturbationKind::KernelMixture, epsilon});
    return perturb(m, {PerturbationKind::DiscountShift, epsilon});
}

namespace {

DiscreteMeasure random_measure(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (u(rng) < 0.2) {
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        return DiscreteMeasure::dirac(n, pick(rng));
    }
    const double sharpness = 1.0 + 4.0 * u(rng);
    std::vector<double> w(n);
    double s = 0.0;
    for (double& v : w) {
        v = std::pow(-std::log(1.0 - u(rng)), sharpness);
        s += v;
    }
    for (double& v : w) v /= s;
    return DiscreteMeasure::renormalized(std::move(w));
}

}  // namespace

ConstantEstimates estimate_constants(const ModelSpec& model, const StateGrid& grid, std::size_t samples,
                                     std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    std::uniform_real_distribution<double> ua(model.a_lo, model.a_hi);
    const std::size_t n = grid.size();
    const double beta = model.beta;
    const double v_max = model.constants.M / (1.0 - beta);
    const double h2 = 1e-3 * (model.a_hi - model.a_lo);
    const double h1 = 1e-4 * (model.a_hi - model.a_lo);
    std::uniform_real_distribution<double> ua_inner(model.a_lo + h2, model.a_hi - h2);
    std::uniform_real_distribution<double> uv(0.0, v_max);

    ConstantEstimates est;
    est.samples = samples;
    est.rho = kInf;
    est.continuation_curvature = kInf;

    std::vector<double> r1(n), r2(n), v1(n), v2(n);
    auto row = [&](double x, double a, double mean, std::vector<double>& out) {
        kernel_row_at_center(model, grid, kernel_center(model, x, a, mean), out);
    };
    auto objective = [&](double x, double a, double mean, const std::vector<double>& v) {
        return cost_given_mean(model, x, a, mean) +
               beta * kernel_expectation_at_center(model, grid, kernel_center(model, x, a, mean), v);
    };
    auto continuation = [&](double x, double a, double mean, const std::vector<double>& v) {
        return kernel_expectation_at_center(model, grid, kernel_center(model, x, a, mean), v);
    };
    auto gradient = [&](double x, double a, double mean, const std::vector<double>& v) {
        return (objective(x, a + h1, mean, v) - objective(x, a - h1, mean, v)) / (2.0 * h1);
    };

    for (std::size_t s = 0; s < samples; ++s) {
        const double x = ux(rng), x2 = ux(rng);
        const double a = ua(rng), a2 = ua(rng);
        const DiscreteMeasure mu1 = random_measure(rng, n);
        const DiscreteMeasure mu2 = random_measure(rng, n);
        const double m1 = mean_of(grid, mu1), m2 = mean_of(grid, mu2);
        const double w1 = w1_1d(grid, mu1, mu2);

        const double c = cost_given_mean(model, x, a, m1);
        est.M = std::max(est.M, c);
        if (w1 > 1e-9) est.L1 = std::max(est.L1, std::abs(c - cost_given_mean(model, x, a, m2)) / w1);
        if (std::abs(x - x2) > 1e-9)
            est.L2 = std::max(est.L2, std::abs(c - cost_given_mean(model, x2, a, m1)) / std::abs(x - x2));

        row(x, a, m1, r1);
        double mass = 0.0;
        for (double r : r1) mass += r;
        est.alpha = std::max(est.alpha, mass);

        row(x, a2, m2, r2);
        const double d1 = std::abs(a - a2) + w1;
        if (d1 > 1e-9) est.K1 = std::max(est.K1, tv(r1, r2) / d1);
        row(x2, a2, m1, r2);
        const double d2 = std::abs(x - x2) + std::abs(a - a2);
        if (d2 > 1e-9) est.K2 = std::max(est.K2, tv(r1, r2) / d2);

        for (std::size_t j = 0; j < n; ++j) {
            v1[j] = uv(rng);
            v2[j] = uv(rng);
        }
        const double ai = ua_inner(rng);
        const double f0 = objective(x, ai, m1, v1);
        const double curv = (objective(x, ai + h2, m1, v1) - 2.0 * f0 + objective(x, ai - h2, m1, v1)) / (h2 * h2);
        est.rho = std::min(est.rho, curv);
        const double g0 = continuation(x, ai, m1, v1);
        const double ccurv =
            beta * (continuation(x, ai + h2, m1, v1) - 2.0 * g0 + continuation(x, ai - h2, m1, v1)) / (h2 * h2);
        est.continuation_curvature = std::min(est.continuation_curvature, ccurv);

        // Gradient variation, one argument at a time.
        const double g = gradient(x, ai, m1, v1);
        if (std::abs(x - x2) > 1e-9)
            est.K_F = std::max(est.K_F, std::abs(g - gradient(x2, ai, m1, v1)) / std::abs(x - x2));
        const double dv = sup_distance(v1, v2);
        if (dv > 1e-9) est.K_F = std::max(est.K_F, std::abs(g - gradient(x, ai, m1, v2)) / dv);
        if (w1 > 1e-9) est.K_F = std::max(est.K_F, std::abs(g - gradient(x, ai, m2, v1)) / w1);
    }
    if (samples == 0) {
        est.rho = 0.0;
        est.continuation_curvature = 0.0;
    }

    const DeclaredConstants& d = model.constants;
    auto over = [&](const char* name, double e, double declared) {
        if (e > declared + 1e-6) {
            est.violations.push_back(std::string(name) + ": estimate " + std::to_string(e) + " exceeds declared " +
                                     std::to_string(declared));
        }
    };
    over("M", est.M, d.M);
    over("L1", est.L1, d.L1);
    over("L2", est.L2, d.L2);
    over("K1", est.K1, d.K1);
    over("K2", est.K2, d.K2);
    over("alpha", est.alpha, d.alpha);
    over("K_F", est.K_F, d.K_F);
    if (samples > 0 && est.rho < d.rho - 1e-6) {
        est.violations.push_back("rho: observed curvature " + std::to_string(est.rho) + " below declared " +
                                 std::to_string(d.rho));
    }
    if (samples > 0 && est.rho <= 0.0) {
        est.warnings.push_back("one-step objective is not strongly convex in the action at some sampled point");
    }
    return est;
}

}  // namespace mfg
