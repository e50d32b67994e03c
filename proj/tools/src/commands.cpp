#include "mfg/cli/commands.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "mfg/conditions.hpp"
#include "mfg/errors.hpp"
#include "mfg/game.hpp"
#include "mfg/harness.hpp"
#include "mfg/metrics.hpp"
#include "mfg/operator.hpp"
#include "mfg/report_io.hpp"

namespace mfg::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json document(const RunConfig& config, const GlobalOptions& globals) {
    json j;
    j["config"] = config_to_json(config);
    j["override_certification"] = globals.override_certification;
    j["model"] = to_json(config.model);
    return j;
}

fs::path prepare_dir(const RunConfig& config) {
    fs::path dir(config.output.directory);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write '" + path.string() + "'");
    os << content;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

StudyOptions study_options(const RunConfig& config, const GlobalOptions& globals) {
    StudyOptions o;
    o.solver = config.solver;
    o.gamma = config.gamma;
    o.override_certification = globals.override_certification;
    o.quad_points = config.quadrature_points;
    return o;
}

std::optional<std::vector<double>> read_measure_file(const std::string& path, std::ostream& err) {
    std::ifstream in(path);
    if (!in) {
        err << "error: cannot read measure file '" << path << "'\n";
        return std::nullopt;
    }
    std::vector<double> w;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        const char* begin = line.data() + first;
        const char* end = line.data() + last + 1;
        double v = 0.0;
        const auto res = std::from_chars(begin, end, v);
        if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v) || v < 0.0) {
            err << "error: " << path << ":" << lineno << ": expected a nonnegative real\n";
            return std::nullopt;
        }
        w.push_back(v);
    }
    if (w.empty()) {
        err << "error: measure file '" << path << "' is empty\n";
        return std::nullopt;
    }
    double sum = 0.0;
    for (double v : w) sum += v;
    if (std::abs(sum - 1.0) > 1e-9) {
        err << "error: weights in '" << path << "' sum to " << format_double(sum) << ", not 1\n";
        return std::nullopt;
    }
    return w;
}

DiscreteMeasure as_measure(std::vector<double> w) {
    double sum = 0.0;
    for (double v : w) sum += v;
    if (std::abs(sum - 1.0) <= 1e-12) return DiscreteMeasure(std::move(w));
    return DiscreteMeasure::renormalized(std::move(w), 1e-9);
}

}  // namespace

void apply_globals(RunConfig& config, const GlobalOptions& globals) {
    if (globals.out_dir) config.output.directory = *globals.out_dir;
    if (globals.seed) config.seed = *globals.seed;
}

int cmd_solve(const RunConfig& config, const GlobalOptions& globals, std::ostream& out, std::ostream& err) {
    const ConditionReport conditions = certify(config.model, std::nullopt, globals.scan_cap);
    if (!conditions.theorem1_holds && !globals.override_certification) {
        err << "error: contraction conditions fail (k = " << format_double(conditions.continuous.k)
            << ", k1 = " << format_double(conditions.continuous.k1)
            << ", k2 = " << format_double(conditions.continuous.k2) << "); use --override-certification to run anyway\n";
        return kConditionsFail;
    }

    const double gamma = study_gamma(config.model, study_options(config, globals));
    const GridGame game(config.model, make_grid(config.grid_n));
    const EquilibriumResult result = mfe_iterate(game, ValueTable{std::vector<double>(config.grid_n, 0.0)},
                                                 DiscreteMeasure::uniform(config.grid_n), gamma, config.solver);
    for (const std::string& w : result.warnings) err << "warning: " << w << "\n";

    const fs::path dir = prepare_dir(config);
    if (config.output.wants("json")) {
        json j = document(config, globals);
        j["conditions"] = to_json(conditions);
        j["equilibrium"] = to_json(result, game.grid());
        write_file(dir / "equilibrium.json", dump(j));
    }
    if (config.output.wants("csv")) {
        std::ostringstream csv;
        write_trace_csv(csv, result);
        write_file(dir / "trace.csv", csv.str());
    }

    out << (result.converged ? "converged" : "not converged") << " after " << result.iterations
        << " iterations (bellman residual " << format_double(result.bellman_residual) << ", invariance residual "
        << format_double(result.invariance_residual) << ")\n";
    return result.converged ? kSuccess : kNotConverged;
}

int cmd_check(const RunConfig& config, const GlobalOptions& globals, std::ostream& out, std::ostream&) {
    const ConditionReport report = certify(config.model, config.grid_n, globals.scan_cap);
    json j = document(config, globals);
    j["conditions"] = to_json(report);
    out << dump(j);
    return report.theorem1_holds ? kSuccess : kConditionsFail;
}

int cmd_study(const RunConfig& config, const GlobalOptions& globals, std::ostream& out, std::ostream& err) {
    const StudyOptions options = study_options(config, globals);
    const StudyConfig& s = config.study;

    StudyReport report;
    switch (study_kind_from_string(s.kind)) {
        case StudyKind::Robustness:
            report = run_robustness_study(config.model, config.grid_n, perturbation_from_string(s.perturbation),
                                          s.epsilons, options);
            break;
        case StudyKind::Truncation:
            report = run_truncation_study(config.model, config.grid_n, s.checkpoints, options, s.targets);
            break;
        case StudyKind::Quantization:
            report = run_quantization_study(config.model, s.n_list, s.reference_n, options);
            break;
        case StudyKind::General:
            report = run_general_study(config.model, config.grid_n, s.epsilons, options);
            break;
    }
    for (const std::string& w : report.warnings) err << "warning: " << w << "\n";

    const fs::path dir = prepare_dir(config);
    if (config.output.wants("json")) {
        json j = document(config, globals);
        j["study"] = to_json(report);
        write_file(dir / "study.json", dump(j));
    }
    if (config.output.wants("csv")) {
        std::ostringstream csv;
        write_study_csv(csv, report);
        write_file(dir / "study.csv", csv.str());
    }

    const bool pass = report.trends_pass();
    for (const TrendResult& t : report.trends) {
        out << t.metric << ": tau " << format_double(t.kendall_tau) << ", first " << format_double(t.first)
            << ", last " << format_double(t.last) << (t.passed ? " ok" : " FAILED") << "\n";
    }
    for (const TruncationTarget& t : report.targets) {
        out << "target " << format_double(t.epsilon) << ": reached at "
            << (t.first_iteration ? std::to_string(*t.first_iteration) : std::string("never")) << ", allowed "
            << t.allowed_iteration << (t.passed ? " ok" : " FAILED") << "\n";
    }
    return pass ? kSuccess : kTrendFail;
}

int cmd_w1(const std::string& file_mu, const std::string& file_nu, MetricKind metric, std::ostream& out,
           std::ostream& err) {
    auto mu = read_measure_file(file_mu, err);
    if (!mu) return kConfigError;
    auto nu = read_measure_file(file_nu, err);
    if (!nu) return kConfigError;
    if (mu->size() != nu->size()) {
        err << "error: measure lengths differ (" << mu->size() << " vs " << nu->size() << ")\n";
        return kConfigError;
    }
    const DiscreteMeasure a = as_measure(std::move(*mu));
    const DiscreteMeasure b = as_measure(std::move(*nu));
    double d = 0.0;
    switch (metric) {
        case MetricKind::OneD: d = w1_1d(make_grid(a.size()), a, b); break;
        case MetricKind::Discrete: d = w1_discrete_metric(a, b); break;
        case MetricKind::TotalVariation: d = tv(a, b); break;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", d);
    out << buf << "\n";
    return kSuccess;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Mean-field equilibrium solver and experiment runner", "mfg"};
    app.require_subcommand(1);

    std::string config_path;
    GlobalOptions globals;
    std::string out_dir;
    std::uint64_t seed = 0;
    app.add_option("--config", config_path, "JSON run configuration");
    auto* out_opt = app.add_option("--out", out_dir, "Output directory (overrides output.directory)");
    auto* seed_opt = app.add_option("--seed", seed, "Random seed recorded in the outputs");
    app.add_flag("--override-certification", globals.override_certification,
                 "Run even when the contraction conditions fail");

    auto* solve = app.add_subcommand("solve", "Compute the equilibrium on the configured grid");
    auto* check = app.add_subcommand("check", "Print the contraction-condition report");
    auto* study = app.add_subcommand("study", "Run the configured study");
    auto* w1 = app.add_subcommand("w1", "Distance between two measure files");
    for (auto* sc : {solve, check, study, w1}) sc->fallthrough();
    check->add_option("--scan-cap", globals.scan_cap, "Largest n tried when searching for a certified grid size")
        ->check(CLI::PositiveNumber);

    std::string file_mu, file_nu, metric_name = "1d";
    w1->add_option("mu", file_mu, "First measure file")->required();
    w1->add_option("nu", file_nu, "Second measure file")->required();
    w1->add_option("--metric", metric_name, "1d, discrete or tv")->check(CLI::IsMember({"1d", "discrete", "tv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kConfigError;
    }
    if (out_opt->count() > 0) globals.out_dir = out_dir;
    if (seed_opt->count() > 0) globals.seed = seed;

    try {
        if (w1->parsed()) {
            const MetricKind metric = metric_name == "discrete" ? MetricKind::Discrete
                                      : metric_name == "tv"     ? MetricKind::TotalVariation
                                                                : MetricKind::OneD;
            return cmd_w1(file_mu, file_nu, metric, out, err);
        }
        if (config_path.empty()) {
            err << "error: --config is required\n";
            return kConfigError;
        }
        RunConfig config = load_config(config_path);
        apply_globals(config, globals);
        if (solve->parsed()) return cmd_solve(config, globals, out, err);
        if (check->parsed()) return cmd_check(config, globals, out, err);
        return cmd_study(config, globals, out, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const CertificationError& e) {
        err << "error: " << e.what() << "\n";
        return kConditionsFail;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }
}

}  // namespace mfg::cli
