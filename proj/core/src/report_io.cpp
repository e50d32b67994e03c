#include "mfg/report_io.hpp"

#include <charconv>
#include <cmath>

namespace mfg {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

nlohmann::json json_number(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

nlohmann::json to_json(const DeclaredConstants& c) {
    return {{"M", json_number(c.M)},     {"L1", json_number(c.L1)},       {"L2", json_number(c.L2)},
            {"K1", json_number(c.K1)},   {"K2", json_number(c.K2)},       {"alpha", json_number(c.alpha)},
            {"rho", json_number(c.rho)}, {"K_F", json_number(c.K_F)}};
}

nlohmann::json to_json(const ModelSpec& m) {
    const ModelParams& p = m.params;
    nlohmann::json params = {{"c_x", p.c_x},         {"c_a", p.c_a},         {"kappa_a", p.kappa_a},
                             {"kappa_0", p.kappa_0}, {"kappa_x", p.kappa_x}, {"kappa_u", p.kappa_u},
                             {"kappa_m", p.kappa_m}, {"sigma", p.sigma},     {"mixture", p.mixture},
                             {"bump", p.bump}};
    if (p.target) params["target"] = *p.target;
    nlohmann::json j = {{"family", m.family},
                        {"params", params},
                        {"discount", m.beta},
                        {"action_bounds", {m.a_lo, m.a_hi}},
                        {"constants", to_json(m.constants)}};
    if (!m.warnings.empty()) j["warnings"] = m.warnings;
    return j;
}

nlohmann::json to_json(const ContractionConstants& c) {
    return {{"k1", json_number(c.k1)}, {"k2", json_number(c.k2)}, {"k", json_number(c.k)}, {"holds", c.holds()}};
}

nlohmann::json to_json(const ConditionReport& r) {
    nlohmann::json j;
    j["k1"] = json_number(r.continuous.k1);
    j["k2"] = json_number(r.continuous.k2);
    j["k"] = json_number(r.continuous.k);
    if (r.gamma_feasible_interval) {
        j["gamma_feasible_interval"] = {json_number(r.gamma_feasible_interval->first),
                                        json_number(r.gamma_feasible_interval->second)};
    } else {
        j["gamma_feasible_interval"] = nullptr;
    }
    j["theorem1_holds"] = r.theorem1_holds;
    j["default_gamma"] = r.theorem1_holds ? json_number(r.default_gamma) : nlohmann::json(nullptr);
    j["k1_with_alpha_beta"] = json_number(r.k1_alpha_form);
    j["k1_with_beta"] = json_number(r.k1_one_minus_beta_form);
    j["quantized_limit"] = to_json(r.quantized_limit);
    nlohmann::json recs = nlohmann::json::array();
    for (const QuantizedRecord& q : r.quantized) {
        recs.push_back({{"n", q.n},
                        {"k1n", json_number(q.constants.k1)},
                        {"k2n", json_number(q.constants.k2)},
                        {"kn", json_number(q.constants.k)},
                        {"holds", q.holds}});
    }
    j["quantized"] = recs;
    j["smallest_certified_n"] = r.smallest_certified_n ? nlohmann::json(*r.smallest_certified_n) : nlohmann::json(nullptr);
    j["scan_cap"] = r.scan_cap;
    return j;
}

nlohmann::json to_json(const EquilibriumResult& r, const StateGrid& grid) {
    nlohmann::json j;
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    j["gamma"] = json_number(r.gamma);
    j["bellman_residual"] = json_number(r.bellman_residual);
    j["invariance_residual"] = json_number(r.invariance_residual);
    j["grid"] = std::vector<double>(grid.points().begin(), grid.points().end());
    j["values"] = r.values.values;
    j["measure"] = std::vector<double>(r.measure.weights().begin(), r.measure.weights().end());
    j["policy"] = r.policy.actions;
    j["warnings"] = r.warnings;
    return j;
}

nlohmann::json to_json(const StudyReport& r) {
    nlohmann::json j;
    j["kind"] = to_string(r.kind);
    j["sweep_variable"] = r.sweep_variable;
    j["reference"] = r.reference;
    j["gamma"] = json_number(r.gamma);
    j["nominal_certified"] = r.nominal_certified;
    j["override_certification"] = r.override_certification;
    j["contraction_k"] = json_number(r.contraction_k);
    nlohmann::json rows = nlohmann::json::array();
    for (const StudyRow& row : r.rows) {
        rows.push_back({{"sweep_var", json_number(row.sweep)},
                        {"w1_mu_gap", json_number(row.w1_mu_gap)},
                        {"policy_sup_gap", json_number(row.policy_sup_gap)},
                        {"value_sup_gap", json_number(row.value_sup_gap)},
                        {"iterations", row.iterations},
                        {"bellman_residual", json_number(row.bellman_residual)},
                        {"invariance_residual", json_number(row.invariance_residual)},
                        {"certified", row.certified},
                        {"converged", row.converged},
                        {"solved", row.solved}});
    }
    j["rows"] = rows;
    nlohmann::json trends = nlohmann::json::array();
    for (const TrendResult& t : r.trends) {
        trends.push_back({{"metric", t.metric},
                          {"kendall_tau", json_number(t.kendall_tau)},
                          {"first", json_number(t.first)},
                          {"last", json_number(t.last)},
                          {"passed", t.passed}});
    }
    j["trends"] = trends;
    if (!r.targets.empty()) {
        nlohmann::json targets = nlohmann::json::array();
        for (const TruncationTarget& t : r.targets) {
            targets.push_back({{"epsilon", t.epsilon},
                               {"first_iteration", t.first_iteration ? nlohmann::json(*t.first_iteration)
                                                                     : nlohmann::json(nullptr)},
                               {"allowed_iteration", t.allowed_iteration},
                               {"passed", t.passed}});
        }
        j["targets"] = targets;
    }
    j["trends_pass"] = r.trends_pass();
    j["warnings"] = r.warnings;
    return j;
}

void write_trace_csv(std::ostream& os, const EquilibriumResult& r) {
    os << "iter,sup_diff_v,w1_diff_mu,bellman_residual,invariance_residual\n";
    for (std::size_t k = 0; k < r.trace.size(); ++k) {
        const TraceRow& t = r.trace[k];
        os << t.iter << ',' << format_double(t.sup_diff_v) << ',' << format_double(t.w1_diff_mu) << ',';
        if (k + 1 == r.trace.size()) {
            os << format_double(r.bellman_residual) << ',' << format_double(r.invariance_residual);
        } else {
            os << ',';
        }
        os << '\n';
    }
}

void write_study_csv(std::ostream& os, const StudyReport& r) {
    os << "sweep_var,w1_mu_gap,policy_sup_gap,value_sup_gap,iterations,bellman_residual,invariance_residual,"
          "certified\n";
    for (const StudyRow& row : r.rows) {
        os << format_double(row.sweep) << ',' << format_double(row.w1_mu_gap) << ','
           << format_double(row.policy_sup_gap) << ',' << format_double(row.value_sup_gap) << ',' << row.iterations
           << ',' << format_double(row.bellman_residual) << ',' << format_double(row.invariance_residual) << ','
           << (row.certified ? "true" : "false") << '\n';
    }
}

}  // namespace mfg
