#include "mfg/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <sstream>

#include "mfg/errors.hpp"
#include "mfg/harness.hpp"

namespace mfg::cli {

using nlohmann::json;

bool OutputConfig::wants(const std::string& format) const {
    return std::find(formats.begin(), formats.end(), format) != formats.end();
}

namespace {

std::size_t line_at(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

// Walks a JSON document while remembering where it is, so that errors can
// name the offending key and its line.
class Reader {
public:
    explicit Reader(const std::string& text) : text_(text) {}

    [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& message) const {
        std::string key;
        for (const std::string& p : path) key += (key.empty() ? "" : ".") + p;
        std::string where = key.empty() ? "config" : "key '" + key + "'";
        if (auto line = locate(path)) where += " (line " + std::to_string(*line) + ")";
        throw ConfigError(where + ": " + message);
    }

    void expect_object(const json& j, const std::vector<std::string>& path) const {
        if (!j.is_object()) fail(path, "expected an object");
    }

    void allow_keys(const json& j, const std::vector<std::string>& path,
                    std::initializer_list<const char*> allowed) const {
        expect_object(j, path);
        for (const auto& item : j.items()) {
            const bool known = std::any_of(allowed.begin(), allowed.end(),
                                           [&](const char* k) { return item.key() == k; });
            if (!known) {
                std::vector<std::string> p = path;
                p.push_back(item.key());
                fail(p, "unknown key");
            }
        }
    }

    double number(const json& j, const std::vector<std::string>& path) const {
        if (!j.is_number()) fail(path, "expected a number");
        const double v = j.get<double>();
        if (!std::isfinite(v)) fail(path, "expected a finite number");
        return v;
    }

    double positive(const json& j, const std::vector<std::string>& path) const {
        const double v = number(j, path);
        if (!(v > 0.0)) fail(path, "must be positive");
        return v;
    }

    std::uint64_t unsigned_integer(const json& j, const std::vector<std::string>& path) const {
        if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0))
            fail(path, "expected a nonnegative integer");
        return j.get<std::uint64_t>();
    }

    std::size_t count(const json& j, const std::vector<std::string>& path, std::size_t min) const {
        const std::uint64_t v = unsigned_integer(j, path);
        if (v < min) fail(path, "must be at least " + std::to_string(min));
        return static_cast<std::size_t>(v);
    }

    std::string string(const json& j, const std::vector<std::string>& path) const {
        if (!j.is_string()) fail(path, "expected a string");
        return j.get<std::string>();
    }

    template <typename T, typename F>
    std::vector<T> array(const json& j, const std::vector<std::string>& path, F&& element) const {
        if (!j.is_array()) fail(path, "expected an array");
        std::vector<T> out;
        for (std::size_t i = 0; i < j.size(); ++i) {
            std::vector<std::string> p = path;
            p.back() += "[" + std::to_string(i) + "]";
            out.push_back(element(j[i], p));
        }
        return out;
    }

private:
    // Line of the innermost key of `path` that can be found in the text.
    std::optional<std::size_t> locate(const std::vector<std::string>& path) const {
        std::size_t pos = 0;
        std::optional<std::size_t> found;
        for (const std::string& part : path) {
            const std::string name = part.substr(0, part.find('['));
            const std::size_t at = text_.find("\"" + name + "\"", pos);
            if (at == std::string::npos) break;
            pos = at;
            found = line_at(text_, at);
        }
        return found;
    }

    const std::string& text_;
};

using Path = std::vector<std::string>;

Path sub(const Path& path, const std::string& key) {
    Path p = path;
    p.push_back(key);
    return p;
}

ModelSpec read_model(const Reader& r, const json& j) {
    const Path path{"model"};
    r.allow_keys(j, path, {"family", "params", "discount", "action_bounds", "constants"});

    const ModelSpec defaults = default_model();
    std::string family = defaults.family;
    ModelParams params = defaults.params;
    double beta = defaults.beta;
    double a_lo = defaults.a_lo;
    double a_hi = defaults.a_hi;
    ConstantOverrides overrides;

    if (j.contains("family")) family = r.string(j["family"], sub(path, "family"));
    if (family != kQuadraticDrift && family != kConstantKernel)
        r.fail(sub(path, "family"), "unknown model family '" + family + "'");

    if (j.contains("params")) {
        const Path pp = sub(path, "params");
        const json& p = j["params"];
        r.allow_keys(p, pp,
                     {"c_x", "c_a", "kappa_a", "kappa_0", "kappa_x", "kappa_u", "kappa_m", "sigma", "mixture", "bump",
                      "target"});
        const std::pair<const char*, double*> fields[] = {
            {"c_x", &params.c_x},         {"c_a", &params.c_a},         {"kappa_a", &params.kappa_a},
            {"kappa_0", &params.kappa_0}, {"kappa_x", &params.kappa_x}, {"kappa_u", &params.kappa_u},
            {"kappa_m", &params.kappa_m}, {"sigma", &params.sigma},     {"mixture", &params.mixture},
            {"bump", &params.bump}};
        for (const auto& [key, dst] : fields)
            if (p.contains(key)) *dst = r.number(p[key], sub(pp, key));
        if (p.contains("target") && !p["target"].is_null()) params.target = r.number(p["target"], sub(pp, "target"));
    }

    if (j.contains("discount")) beta = r.number(j["discount"], sub(path, "discount"));

    if (j.contains("action_bounds")) {
        const Path ap = sub(path, "action_bounds");
        const auto bounds = r.array<double>(j["action_bounds"], ap,
                                            [&](const json& e, const Path& p) { return r.number(e, p); });
        if (bounds.size() != 2) r.fail(ap, "expected [lower, upper]");
        a_lo = bounds[0];
        a_hi = bounds[1];
    }

    if (j.contains("constants")) {
        const Path cp = sub(path, "constants");
        const json& c = j["constants"];
        r.allow_keys(c, cp, {"M", "L1", "L2", "K1", "K2", "alpha", "rho", "K_F"});
        const std::pair<const char*, std::optional<double>*> fields[] = {
            {"M", &overrides.M},   {"L1", &overrides.L1},       {"L2", &overrides.L2},   {"K1", &overrides.K1},
            {"K2", &overrides.K2}, {"alpha", &overrides.alpha}, {"rho", &overrides.rho}, {"K_F", &overrides.K_F}};
        for (const auto& [key, dst] : fields)
            if (c.contains(key)) *dst = r.number(c[key], sub(cp, key));
    }

    try {
        return make_model(family, params, beta, a_lo, a_hi, overrides);
    } catch (const ParameterError& e) {
        r.fail(path, e.what());
    }
}

SolverConfig read_solver(const Reader& r, const json& j) {
    const Path path{"solver"};
    r.allow_keys(j, path, {"tol_v", "tol_mu", "max_iter", "argmin_tol"});
    SolverConfig s;
    if (j.contains("tol_v")) s.tol_v = r.positive(j["tol_v"], sub(path, "tol_v"));
    if (j.contains("tol_mu")) s.tol_mu = r.positive(j["tol_mu"], sub(path, "tol_mu"));
    if (j.contains("max_iter")) s.max_iter = r.count(j["max_iter"], sub(path, "max_iter"), 1);
    if (j.contains("argmin_tol")) s.argmin_tol = r.positive(j["argmin_tol"], sub(path, "argmin_tol"));
    return s;
}

StudyConfig read_study(const Reader& r, const json& j) {
    const Path path{"study"};
    r.allow_keys(j, path, {"kind", "epsilons", "n_list", "reference_n", "checkpoints", "perturbation", "targets"});
    StudyConfig s;
    if (j.contains("kind")) s.kind = r.string(j["kind"], sub(path, "kind"));
    try {
        study_kind_from_string(s.kind);
    } catch (const ParameterError&) {
        r.fail(sub(path, "kind"), "unknown study kind '" + s.kind + "'");
    }

    if (j.contains("epsilons")) {
        s.epsilons = r.array<double>(j["epsilons"], sub(path, "epsilons"), [&](const json& e, const Path& p) {
            const double v = r.number(e, p);
            if (v < 0.0 || v >= 1.0) r.fail(p, "must lie in [0, 1)");
            return v;
        });
    }
    if (j.contains("n_list")) {
        s.n_list = r.array<std::size_t>(j["n_list"], sub(path, "n_list"),
                                        [&](const json& e, const Path& p) { return r.count(e, p, 1); });
    }
    if (j.contains("reference_n")) s.reference_n = r.count(j["reference_n"], sub(path, "reference_n"), 0);
    if (j.contains("checkpoints")) {
        s.checkpoints = r.array<std::size_t>(j["checkpoints"], sub(path, "checkpoints"),
                                             [&](const json& e, const Path& p) { return r.count(e, p, 0); });
    }
    if (j.contains("perturbation")) s.perturbation = r.string(j["perturbation"], sub(path, "perturbation"));
    try {
        perturbation_from_string(s.perturbation);
    } catch (const ParameterError&) {
        r.fail(sub(path, "perturbation"), "unknown perturbation kind '" + s.perturbation + "'");
    }
    if (j.contains("targets")) {
        s.targets = r.array<double>(j["targets"], sub(path, "targets"),
                                    [&](const json& e, const Path& p) { return r.positive(e, p); });
    }
    return s;
}

OutputConfig read_output(const Reader& r, const json& j) {
    const Path path{"output"};
    r.allow_keys(j, path, {"directory", "formats"});
    OutputConfig o;
    if (j.contains("directory")) o.directory = r.string(j["directory"], sub(path, "directory"));
    if (o.directory.empty()) r.fail(sub(path, "directory"), "must not be empty");
    if (j.contains("formats")) {
        o.formats = r.array<std::string>(j["formats"], sub(path, "formats"), [&](const json& e, const Path& p) {
            std::string f = r.string(e, p);
            if (f != "csv" && f != "json") r.fail(p, "unknown format '" + f + "' (expected csv or json)");
            return f;
        });
    }
    return o;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed JSON at line " + std::to_string(line_at(text, e.byte == 0 ? 0 : e.byte - 1)) +
                          ": " + e.what());
    }

    const Reader r(text);
    r.allow_keys(j, {}, {"model", "gamma", "grid_n", "quadrature_points", "solver", "study", "output", "seed"});
    if (!j.contains("model")) r.fail({"model"}, "required key is missing");

    RunConfig c;
    c.model = read_model(r, j["model"]);
    if (j.contains("gamma")) {
        const json& g = j["gamma"];
        if (g.is_string()) {
            if (g.get<std::string>() != "auto") r.fail({"gamma"}, "expected \"auto\" or a positive number");
        } else {
            c.gamma = r.positive(g, {"gamma"});
        }
    }
    if (j.contains("grid_n")) c.grid_n = r.count(j["grid_n"], {"grid_n"}, 1);
    if (j.contains("quadrature_points"))
        c.quadrature_points = r.count(j["quadrature_points"], {"quadrature_points"}, 1);
    if (j.contains("solver")) c.solver = read_solver(r, j["solver"]);
    if (j.contains("study")) c.study = read_study(r, j["study"]);
    if (j.contains("output")) c.output = read_output(r, j["output"]);
    if (j.contains("seed")) c.seed = r.unsigned_integer(j["seed"], {"seed"});
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

json config_to_json(const RunConfig& c) {
    const ModelSpec& m = c.model;
    const ModelParams& p = m.params;
    json params = {{"c_x", p.c_x},         {"c_a", p.c_a},         {"kappa_a", p.kappa_a}, {"kappa_0", p.kappa_0},
                   {"kappa_x", p.kappa_x}, {"kappa_u", p.kappa_u}, {"kappa_m", p.kappa_m}, {"sigma", p.sigma},
                   {"mixture", p.mixture}, {"bump", p.bump}};
    params["target"] = p.target ? json(*p.target) : json(nullptr);

    json constants = json::object();
    const ConstantOverrides& o = m.overrides;
    const std::pair<const char*, const std::optional<double>*> fields[] = {
        {"M", &o.M},   {"L1", &o.L1},       {"L2", &o.L2},   {"K1", &o.K1},
        {"K2", &o.K2}, {"alpha", &o.alpha}, {"rho", &o.rho}, {"K_F", &o.K_F}};
    for (const auto& [key, value] : fields)
        if (*value) constants[key] = **value;

    json j;
    j["model"] = {{"family", m.family},
                  {"params", params},
                  {"discount", m.beta},
                  {"action_bounds", {m.a_lo, m.a_hi}},
                  {"constants", constants}};
    j["gamma"] = c.gamma ? json(*c.gamma) : json("auto");
    j["grid_n"] = c.grid_n;
    j["quadrature_points"] = c.quadrature_points;
    j["solver"] = {{"tol_v", c.solver.tol_v},
                   {"tol_mu", c.solver.tol_mu},
                   {"max_iter", c.solver.max_iter},
                   {"argmin_tol", c.solver.argmin_tol}};
    j["study"] = {{"kind", c.study.kind},
                  {"epsilons", c.study.epsilons},
                  {"n_list", c.study.n_list},
                  {"reference_n", c.study.reference_n},
                  {"checkpoints", c.study.checkpoints},
                  {"perturbation", c.study.perturbation},
                  {"targets", c.study.targets}};
    j["output"] = {{"directory", c.output.directory}, {"formats", c.output.formats}};
    j["seed"] = c.seed;
    return j;
}

}  // namespace mfg::cli
