#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mfg/conditions.hpp"
#include "mfg/model.hpp"
#include "mfg/operator.hpp"

namespace mfg {

enum class StudyKind { Robustness, Truncation, Quantization, General };

std::string to_string(StudyKind kind);
StudyKind study_kind_from_string(const std::string& name);

struct StudyRow {
    double sweep = 0.0;  // epsilon, grid size n, or iteration m
    double w1_mu_gap = 0.0;
    double policy_sup_gap = 0.0;
    double value_sup_gap = 0.0;
    std::size_t iterations = 0;
    double bellman_residual = 0.0;
    double invariance_residual = 0.0;
    bool certified = false;
    bool converged = false;
    bool solved = false;
};

struct TrendResult {
    std::string metric;
    double kendall_tau = 0.0;
    double first = 0.0;
    double last = 0.0;
    bool passed = false;
};

struct TruncationTarget {
    double epsilon = 0.0;
    std::optional<std::size_t> first_iteration;  // first m with both gaps below epsilon
    std::size_t allowed_iteration = 0;           // bound implied by the decay ratio
    bool passed = false;
};

struct StudyReport {
    StudyKind kind = StudyKind::Robustness;
    std::string sweep_variable;
    std::vector<StudyRow> rows;
    std::string reference;
    double gamma = 1.0;
    bool nominal_certified = false;
    bool override_certification = false;
    double contraction_k = 0.0;
    std::vector<TrendResult> trends;
    std::vector<TruncationTarget> targets;
    std::vector<std::string> warnings;

    bool trends_pass() const;
};

/// Tau-b rank correlation; 0 when either sequence is constant.
double kendall_tau(const std::vector<double>& x, const std::vector<double>& y);

/// Gaps decrease along the sweep: tau(index, gap) <= -0.6 and last < first / 5.
/// A first gap already at or below `floor` passes trivially.
TrendResult trend_test(const std::string& metric, const std::vector<double>& gaps, double floor);

struct StudyOptions {
    SolverConfig solver;
    std::optional<double> gamma;  // defaults to the nominal model's midpoint scaling
    bool override_certification = false;
    std::size_t quad_points = 8;
};

StudyReport run_robustness_study(const ModelSpec& model, std::size_t grid_n, PerturbationKind kind,
                                 const std::vector<double>& epsilons, const StudyOptions& options = {});

/// Cost, kernel and discount perturbed jointly by each epsilon.
StudyReport run_general_study(const ModelSpec& model, std::size_t grid_n, const std::vector<double>& epsilons,
                              const StudyOptions& options = {});

StudyReport run_truncation_study(const ModelSpec& model, std::size_t grid_n, const std::vector<std::size_t>& checkpoints,
                                 const StudyOptions& options = {},
                                 const std::vector<double>& targets = {1e-2, 1e-4, 1e-6});

/// Quantized equilibrium on the finest grid, used as the stand-in for the
/// continuous-state equilibrium.
struct ReferenceSolution {
    std::size_t n = 0;
    std::size_t quad_points = 0;
    double gamma = 0.0;
    EquilibriumResult result;
};

ReferenceSolution solve_reference(const ModelSpec& model, std::size_t reference_n, double gamma,
                                  const StudyOptions& options = {});

/// reference_n = 0 selects 16 * max(n_list). A cached reference is used when
/// it matches (n, quad_points, gamma).
StudyReport run_quantization_study(const ModelSpec& model, const std::vector<std::size_t>& n_list,
                                   std::size_t reference_n, const StudyOptions& options = {},
                                   const ReferenceSolution* cached = nullptr);

/// Scaling used by the studies when none is given.
double study_gamma(const ModelSpec& model, const StudyOptions& options);

}  // namespace mfg
