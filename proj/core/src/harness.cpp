#include "mfg/harness.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "mfg/errors.hpp"
#include "mfg/game.hpp"
#include "mfg/metrics.hpp"
#include "mfg/quantizer.hpp"

namespace mfg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ValueTable zeros(std::size_t n) {
    ValueTable v;
    v.values.assign(n, 0.0);
    return v;
}

double gap_floor(const SolverConfig& s) { return 2.0 * std::max(s.tol_v, s.tol_mu); }

void add_trends(StudyReport& rep, double floor) {
    std::vector<double> mu_gaps, pol_gaps;
    for (const StudyRow& r : rep.rows) {
        if (!r.solved) continue;
        mu_gaps.push_back(r.w1_mu_gap);
        pol_gaps.push_back(r.policy_sup_gap);
    }
    rep.trends.push_back(trend_test("w1_mu_gap", mu_gaps, floor));
    rep.trends.push_back(trend_test("policy_sup_gap", pol_gaps, floor));
}

StudyRow unsolved_row(double sweep, bool certified) {
    StudyRow r;
    r.sweep = sweep;
    r.w1_mu_gap = r.policy_sup_gap = r.value_sup_gap = kNaN;
    r.bellman_residual = r.invariance_residual = kNaN;
    r.certified = certified;
    return r;
}

StudyReport perturbation_study(StudyKind kind, const ModelSpec& model, std::size_t grid_n,
                               const std::vector<double>& epsilons, const StudyOptions& options,
                               const std::function<ModelSpec(double)>& make) {
    if (epsilons.empty()) throw ParameterError("study needs at least one epsilon");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] >= 0.0)) throw ParameterError("epsilons must be nonnegative");
        if (i > 0 && !(epsilons[i] < epsilons[i - 1])) throw ParameterError("epsilons must be strictly decreasing");
    }
    StudyReport rep;
    rep.kind = kind;
    rep.sweep_variable = "epsilon";
    rep.override_certification = options.override_certification;
    const ConditionReport nominal_cert = certify(model);
    rep.nominal_certified = nominal_cert.theorem1_holds;
    rep.contraction_k = nominal_cert.continuous.k;
    rep.gamma = study_gamma(model, options);
    rep.reference = "nominal model on the " + std::to_string(grid_n) +
                    "-point grid, solved from V = 0 and the uniform measure";

    const StateGrid grid = make_grid(grid_n);
    const ValueTable v0 = zeros(grid.size());
    const DiscreteMeasure mu0 = DiscreteMeasure::uniform(grid.size());
    const EquilibriumResult nominal = mfe_iterate(GridGame(model, grid), v0, mu0, rep.gamma, options.solver);
    if (!nominal.converged) rep.warnings.push_back("nominal solve did not converge");

    for (double eps : epsilons) {
        ModelSpec pm;
        try {
            pm = make(eps);
        } catch (const ParameterError& e) {
            rep.warnings.push_back("epsilon " + std::to_string(eps) + ": " + e.what());
            rep.rows.push_back(unsolved_row(eps, false));
            continue;
        }
        const bool certified = certify(pm).theorem1_holds;
        if (!certified && !options.override_certification) {
            rep.warnings.push_back("epsilon " + std::to_string(eps) + ": perturbed model is not certified; skipped");
            rep.rows.push_back(unsolved_row(eps, false));
            continue;
        }
        const EquilibriumResult res = mfe_iterate(GridGame(pm, grid), v0, mu0, rep.gamma, options.solver);
        StudyRow row;
        row.sweep = eps;
        row.w1_mu_gap = w1_1d(grid, res.measure, nominal.measure);
        row.policy_sup_gap = sup_distance(res.policy.actions, nominal.policy.actions);
        row.value_sup_gap = sup_distance(res.values.values, nominal.values.values);
        row.iterations = res.iterations;
        row.bellman_residual = res.bellman_residual;
        row.invariance_residual = res.invariance_residual;
        row.certified = certified;
        row.converged = res.converged;
        row.solved = true;
        rep.rows.push_back(row);
    }
    add_trends(rep, gap_floor(options.solver));
    return rep;
}

}  // namespace

std::string to_string(StudyKind kind) {
    switch (kind) {
        case StudyKind::Robustness: return "robustness";
        case StudyKind::Truncation: return "truncation";
        case StudyKind::Quantization: return "quantization";
        case StudyKind::General: return "general";
    }
    return "unknown";
}

StudyKind study_kind_from_string(const std::string& name) {
    for (auto k : {StudyKind::Robustness, StudyKind::Truncation, StudyKind::Quantization, StudyKind::General}) {
        if (to_string(k) == name) return k;
    }
    throw ParameterError("unknown study kind '" + name + "'");
}

bool StudyReport::trends_pass() const {
    for (const TrendResult& t : trends)
        if (!t.passed) return false;
    for (const TruncationTarget& t : targets)
        if (!t.passed) return false;
    return true;
}

double kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw DimensionError("kendall_tau: length mismatch");
    long long concordant = 0, discordant = 0, ties_x = 0, ties_y = 0, pairs = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            ++pairs;
            const double dx = x[j] - x[i];
            const double dy = y[j] - y[i];
            if (dx == 0.0) ++ties_x;
            if (dy == 0.0) ++ties_y;
            if (dx == 0.0 || dy == 0.0) continue;
            if ((dx > 0.0) == (dy > 0.0)) {
                ++concordant;
            } else {
                ++discordant;
            }
        }
    }
    const double denom = std::sqrt(static_cast<double>(pairs - ties_x) * static_cast<double>(pairs - ties_y));
    if (denom == 0.0) return 0.0;
    return static_cast<double>(concordant - discordant) / denom;
}

TrendResult trend_test(const std::string& metric, const std::vector<double>& gaps, double floor) {
    TrendResult t;
    t.metric = metric;
    if (gaps.empty()) return t;
    std::vector<double> index(gaps.size());
    for (std::size_t i = 0; i < gaps.size(); ++i) index[i] = static_cast<double>(i);
    t.kendall_tau = kendall_tau(index, gaps);
    t.first = gaps.front();
    t.last = gaps.back();
    if (t.first <= floor) {
        t.passed = t.last <= floor;
    } else {
        t.passed = gaps.size() >= 2 && t.kendall_tau <= -0.6 && t.last < t.first / 5.0;
    }
    return t;
}

double study_gamma(const ModelSpec& model, const StudyOptions& options) {
    if (options.gamma) {
        if (!(*options.gamma > 0.0)) throw ParameterError("gamma must be positive");
        return *options.gamma;
    }
    const ConditionReport rep = certify(model);
    if (rep.theorem1_holds) return rep.default_gamma;
    if (!options.override_certification) {
        throw CertificationError("model does not satisfy the contraction conditions (k = " +
                                 std::to_string(rep.continuous.k) + ", k1 = " + std::to_string(rep.continuous.k1) +
                                 ", k2 = " + std::to_string(rep.continuous.k2) + ")");
    }
    const double g = default_gamma(rep.continuous);
    return (std::isfinite(g) && g > 0.0) ? g : 1.0;
}

StudyReport run_robustness_study(const ModelSpec& model, std::size_t grid_n, PerturbationKind kind,
                                 const std::vector<double>& epsilons, const StudyOptions& options) {
    StudyReport rep = perturbation_study(StudyKind::Robustness, model, grid_n, epsilons, options,
                                         [&](double eps) { return perturb(model, {kind, eps}); });
    rep.reference += "; perturbation " + to_string(kind);
    return rep;
}

StudyReport run_general_study(const ModelSpec& model, std::size_t grid_n, const std::vector<double>& epsilons,
                              const StudyOptions& options) {
    StudyReport rep = perturbation_study(StudyKind::General, model, grid_n, epsilons, options,
                                         [&](double eps) { return perturb_jointly(model, eps); });
    rep.reference += "; cost-shift, kernel-mixture and discount-shift applied jointly";
    return rep;
}

StudyReport run_truncation_study(const ModelSpec& model, std::size_t grid_n, const std::vector<std::size_t>& checkpoints,
                                 const StudyOptions& options, const std::vector<double>& targets) {
    StudyReport rep;
    rep.kind = StudyKind::Truncation;
    rep.sweep_variable = "iteration";
    rep.override_certification = options.override_certification;
    const ConditionReport cert = certify(model);
    rep.nominal_certified = cert.theorem1_holds;
    rep.contraction_k = cert.continuous.k;
    rep.gamma = study_gamma(model, options);
    rep.reference = "converged equilibrium of the nominal model on the " + std::to_string(grid_n) + "-point grid";

    const StateGrid grid = make_grid(grid_n);
    const GridGame game(model, grid);
    std::vector<ValueTable> values{zeros(grid.size())};
    std::vector<DiscreteMeasure> measures{DiscreteMeasure::uniform(grid.size())};
    std::vector<PolicyTable> policies;
    const EquilibriumResult eq =
        mfe_iterate(game, values[0], measures[0], rep.gamma, options.solver, [&](const IterateState& s) {
            policies.push_back(s.policy);  // greedy for the previous iterate
            values.push_back(s.values);
            measures.push_back(s.measure);
        });
    policies.push_back(eq.policy);
    if (!eq.converged) rep.warnings.push_back("truncation study: reference iteration did not converge");

    const std::size_t last = values.size() - 1;
    std::vector<double> mu_gap(last + 1), pol_gap(last + 1), val_gap(last + 1);
    for (std::size_t m = 0; m <= last; ++m) {
        mu_gap[m] = w1_1d(grid, measures[m], eq.measure);
        pol_gap[m] = sup_distance(policies[m].actions, eq.policy.actions);
        val_gap[m] = sup_distance(values[m].values, eq.values.values);
    }

    std::vector<std::size_t> cps = checkpoints;
    std::sort(cps.begin(), cps.end());
    cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
    for (std::size_t c : cps) {
        const std::size_t m = std::min(c, last);
        StudyRow row;
        row.sweep = static_cast<double>(c);
        row.w1_mu_gap = mu_gap[m];
        row.policy_sup_gap = pol_gap[m];
        row.value_sup_gap = val_gap[m];
        row.iterations = m;
        // One-step residuals of iterate m are the step sizes recorded next.
        row.bellman_residual = m < eq.trace.size() ? eq.trace[m].sup_diff_v : eq.bellman_residual;
        row.invariance_residual = m < eq.trace.size() ? eq.trace[m].w1_diff_mu : eq.invariance_residual;
        row.certified = rep.nominal_certified;
        row.converged = eq.converged;
        row.solved = true;
        rep.rows.push_back(row);
    }

    std::vector<double> eps = targets;
    std::sort(eps.begin(), eps.end(), std::greater<>());
    const double ratio = rep.contraction_k + 0.05;
    std::size_t anchor_m = 0;
    double anchor_gap = std::max(mu_gap[0], pol_gap[0]);
    for (double e : eps) {
        TruncationTarget t;
        t.epsilon = e;
        for (std::size_t m = 0; m <= last; ++m) {
            if (mu_gap[m] < e && pol_gap[m] < e) {
                t.first_iteration = m;
                break;
            }
        }
        if (ratio < 1.0) {
            const double steps = anchor_gap > e ? std::ceil(std::log(anchor_gap / e) / std::log(1.0 / ratio)) : 0.0;
            t.allowed_iteration = anchor_m + static_cast<std::size_t>(steps) + 1;
            t.passed = t.first_iteration && *t.first_iteration <= t.allowed_iteration;
        } else {
            t.allowed_iteration = last;
            t.passed = t.first_iteration.has_value();
        }
        if (t.first_iteration) {
            anchor_m = *t.first_iteration;
            anchor_gap = e;
        }
        rep.targets.push_back(t);
    }
    return rep;
}

ReferenceSolution solve_reference(const ModelSpec& model, std::size_t reference_n, double gamma,
                                  const StudyOptions& options) {
    const QuantizedModel qm(model, reference_n, options.quad_points);
    ReferenceSolution ref;
    ref.n = reference_n;
    ref.quad_points = options.quad_points;
    ref.gamma = gamma;
    ref.result = solve_quantized(qm, gamma, options.solver);
    if (!ref.result.converged) {
        throw std::runtime_error("reference solve on the " + std::to_string(reference_n) +
                                 "-point grid did not converge within " + std::to_string(options.solver.max_iter) +
                                 " iterations");
    }
    return ref;
}

StudyReport run_quantization_study(const ModelSpec& model, const std::vector<std::size_t>& n_list,
                                   std::size_t reference_n, const StudyOptions& options,
                                   const ReferenceSolution* cached) {
    if (n_list.empty()) throw ParameterError("quantization study needs a nonempty n_list");
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (n_list[i] < 1) throw ParameterError("n_list entries must be positive");
        if (i > 0 && n_list[i] <= n_list[i - 1]) throw ParameterError("n_list must be strictly increasing");
    }
    const std::size_t ref_n = reference_n ? reference_n : 16 * n_list.back();

    StudyReport rep;
    rep.kind = StudyKind::Quantization;
    rep.sweep_variable = "n";
    rep.override_certification = options.override_certification;
    const ConditionReport cert = certify(model);
    rep.nominal_certified = cert.theorem1_holds;
    rep.contraction_k = cert.continuous.k;
    rep.gamma = study_gamma(model, options);
    rep.reference = "quantized equilibrium on the " + std::to_string(ref_n) +
                    "-point grid (finest-grid stand-in for the continuous-state equilibrium)";

    ReferenceSolution computed;
    const ReferenceSolution* ref = cached;
    if (!ref || ref->n != ref_n || ref->quad_points != options.quad_points || ref->gamma != rep.gamma) {
        computed = solve_reference(model, ref_n, rep.gamma, options);
        ref = &computed;
    }
    const StateGrid ref_grid = make_grid(ref_n);
    const EquilibriumResult& r = ref->result;

    for (std::size_t n : n_list) {
        const ConditionReport qc = certify(model, n);
        const bool certified = !qc.quantized.empty() && qc.quantized.front().holds;
        if (!certified && !options.override_certification) {
            rep.warnings.push_back("n = " + std::to_string(n) + ": quantized game is not certified; skipped");
            rep.rows.push_back(unsolved_row(static_cast<double>(n), false));
            continue;
        }
        const QuantizedModel qm(model, n, options.quad_points);
        const EquilibriumResult res = solve_quantized(qm, rep.gamma, options.solver);

        const DiscreteMeasure projected =
            project_measure(ref_grid, cell_masses(ref_grid, to_atoms(qm.grid(), lift_measure(res.measure))));
        StudyRow row;
        row.sweep = static_cast<double>(n);
        row.w1_mu_gap = w1_1d(ref_grid, projected, r.measure);
        for (std::size_t j = 0; j < ref_grid.size(); ++j) {
            const std::size_t i = quantize(qm.grid(), ref_grid.point(j));
            row.policy_sup_gap = std::max(row.policy_sup_gap, std::abs(res.policy[i] - r.policy[j]));
            row.value_sup_gap = std::max(row.value_sup_gap, std::abs(res.values[i] - r.values[j]));
        }
        row.iterations = res.iterations;
        row.bellman_residual = res.bellman_residual;
        row.invariance_residual = res.invariance_residual;
        row.certified = certified;
        row.converged = res.converged;
        row.solved = true;
        rep.rows.push_back(row);
    }
    add_trends(rep, gap_floor(options.solver));
    return rep;
}

}  // namespace mfg
