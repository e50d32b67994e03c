#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mfg/grid.hpp"

namespace mfg {

/// Family-specific parameters of the built-in models.
///
/// Cost:   c(x,a,mu) = c_x (x - m)^2 + c_a (a - kappa_a x)^2 + bump sin^2(pi x),
///         where m = m(mu) is the mean of mu, or `target` when that is set.
/// Kernel: (1 - mixture) * N(m_p, sigma) truncated to [0,1] + mixture * Uniform[0,1],
///         m_p = clamp(kappa_0 + kappa_x x + kappa_u a + kappa_m m(mu), 0, 1),
///         integrated over the cells of the grid on which rows are requested.
struct ModelParams {
    double c_x = 0.1;
    double c_a = 1.0;
    double kappa_a = 0.5;
    double kappa_0 = 0.0;
    double kappa_x = 0.3;
    double kappa_u = 0.2;
    double kappa_m = 0.1;
    double sigma = 1.0;
    double mixture = 0.0;
    double bump = 0.0;
    std::optional<double> target;

    bool operator==(const ModelParams&) const = default;
};

/// Regularity constants of a model with weight function w = 1.
struct DeclaredConstants {
    double M = 0.0;
    double L1 = 0.0;
    double L2 = 0.0;
    double K1 = 0.0;
    double K2 = 0.0;
    double alpha = 1.0;
    double rho = 0.0;
    double K_F = 0.0;

    bool operator==(const DeclaredConstants&) const = default;
};

/// Per-constant replacements for the analytically derived values.
struct ConstantOverrides {
    std::optional<double> M, L1, L2, K1, K2, alpha, rho, K_F;

    bool any() const { return M || L1 || L2 || K1 || K2 || alpha || rho || K_F; }
    bool operator==(const ConstantOverrides&) const = default;
};

inline constexpr const char* kQuadraticDrift = "quadratic-drift";
inline constexpr const char* kConstantKernel = "constant-kernel";

struct ModelSpec {
    std::string family = kQuadraticDrift;
    ModelParams params;
    double beta = 0.3;
    double a_lo = 0.0;
    double a_hi = 1.0;
    ConstantOverrides overrides;
    DeclaredConstants constants;  // derived from the fields above by make_model()
    std::vector<std::string> warnings;

    bool operator==(const ModelSpec&) const = default;
};

/// Validates the fields and fills in `constants`. Throws ParameterError.
ModelSpec make_model(std::string family, ModelParams params, double beta, double a_lo, double a_hi,
                     ConstantOverrides overrides = {});

/// The default quadratic-drift model.
ModelSpec default_model();

/// Closed-form constants for the given fields (overrides ignored).
DeclaredConstants derive_constants(const std::string& family, const ModelParams& params, double beta,
                                   double a_lo, double a_hi);

double mean_field(const ModelSpec& model, const StateGrid& grid, const DiscreteMeasure& mu);

double eval_cost(const ModelSpec& model, const StateGrid& grid, double x, double a, const DiscreteMeasure& mu);

/// Cost with the population statistic already reduced to its mean.
double cost_given_mean(const ModelSpec& model, double x, double a, double mean);

DiscreteMeasure eval_kernel_row(const ModelSpec& model, const StateGrid& grid, double x, double a,
                                const DiscreteMeasure& mu);

/// Mean of the untruncated Gaussian component, after clamping to [0,1].
double kernel_center(const ModelSpec& model, double x, double a, double mean);

/// Cell masses of the next-state law for the given kernel center. `out` has
/// one entry per grid cell; the result sums to one up to rounding.
void kernel_row_at_center(const ModelSpec& model, const StateGrid& grid, double center, std::span<double> out);

/// Same as kernel_row_at_center but returns sum_j V_j * row_j without storing the row.
double kernel_expectation_at_center(const ModelSpec& model, const StateGrid& grid, double center,
                                    std::span<const double> values);

enum class PerturbationKind { KernelMixture, KernelParameterShift, CostShift, DiscountShift };

struct PerturbationSpec {
    PerturbationKind kind = PerturbationKind::KernelMixture;
    double epsilon = 0.0;
};

std::string to_string(PerturbationKind kind);
PerturbationKind perturbation_from_string(const std::string& name);

/// Perturbed copy of the model; epsilon = 0 returns an identical model.
ModelSpec perturb(const ModelSpec& model, const PerturbationSpec& pert);

/// Cost, kernel and discount perturbed together by the same magnitude.
ModelSpec perturb_jointly(const ModelSpec& model, double epsilon);

struct ConstantEstimates {
    double M = 0.0;
    double L1 = 0.0;
    double L2 = 0.0;
    double K1 = 0.0;
    double K2 = 0.0;
    double alpha = 0.0;
    double rho = 0.0;  // smallest observed curvature of the one-step objective
    double K_F = 0.0;
    double continuation_curvature = 0.0;  // smallest curvature of the kernel term alone
    std::size_t samples = 0;
    std::vector<std::string> violations;
    std::vector<std::string> warnings;
};

/// Empirical difference quotients over `samples` random pairs, compared with
/// the declared constants of the model.
ConstantEstimates estimate_constants(const ModelSpec& model, const StateGrid& grid, std::size_t samples,
                                     std::uint64_t seed = 1);

}  // namespace mfg
