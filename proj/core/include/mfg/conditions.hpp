#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "mfg/model.hpp"

namespace mfg {

struct ContractionConstants {
    double k1 = 0.0;
    double k2 = 0.0;
    double k = 0.0;

    bool holds() const { return k < 1.0 && k1 < k2; }
};

/// k1 = K_F K1 / (rho (1 - alpha beta)),
/// k2 = (1 - (K_F/rho + 1)(K2 + K1)) / (L1 + beta L2 K1 / (1 - beta K2)),
/// k  = max(alpha beta, (K_F/rho + 1)(K2 + K1)).
/// A vanishing k2 denominator (no interaction) gives k2 = +inf.
/// Throws DegenerateConstants when beta K2 >= 1, alpha beta >= 1 or rho <= 0.
ContractionConstants compute_constants(const DeclaredConstants& c, double beta);
ContractionConstants compute_constants(const ModelSpec& model);

/// Constants of the quantized game on an n-point grid; every K1-free
/// Lipschitz coefficient carries the factor (1 + 2/n) and the discount
/// factor enters as (1 - beta). `n` is real so that limits can be probed.
ContractionConstants compute_quantized_constants(const DeclaredConstants& c, double beta, double n);
ContractionConstants compute_quantized_constants(const ModelSpec& model, double n);

/// The n -> infinity limit of the quantized constants.
ContractionConstants quantized_limit(const DeclaredConstants& c, double beta);

struct QuantizedRecord {
    std::size_t n = 0;
    ContractionConstants constants;
    bool holds = false;
};

struct ConditionReport {
    ContractionConstants continuous;
    std::optional<std::pair<double, double>> gamma_feasible_interval;
    bool theorem1_holds = false;
    double default_gamma = 1.0;

    ContractionConstants quantized_limit;
    bool limit_holds = false;
    // k1 written with (1 - alpha beta) and with (1 - beta); equal when alpha = 1.
    double k1_alpha_form = 0.0;
    double k1_one_minus_beta_form = 0.0;

    std::vector<QuantizedRecord> quantized;  // requested n, then the witness
    std::optional<std::size_t> smallest_certified_n;
    std::size_t scan_cap = 0;
};

/// Default scaling: midpoint of (k1, k2); with k2 infinite, 1 if k1 < 1, else 2 k1.
double default_gamma(const ContractionConstants& c);

/// Pure function of the declared constants. Never throws on infeasible
/// models; degenerate constants simply fail to certify.
ConditionReport certify(const ModelSpec& model, std::optional<std::size_t> n = std::nullopt,
                        std::size_t scan_cap = 1000000);

}  // namespace mfg
