#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mfg/model.hpp"
#include "mfg/operator.hpp"

namespace mfg::cli {

/// Malformed or invalid configuration; `what()` carries the key path and,
/// when it can be located, the line in the source text.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct StudyConfig {
    std::string kind = "quantization";
    std::vector<double> epsilons{0.2, 0.1, 0.05, 0.025, 0.0125, 0.0};
    std::vector<std::size_t> n_list{2, 4, 8, 16, 32};
    std::size_t reference_n = 0;  // 0: sixteen times the largest n
    std::vector<std::size_t> checkpoints{0, 1, 2, 5, 10, 20, 50, 100};
    std::string perturbation = "kernel-mixture";
    std::vector<double> targets{1e-2, 1e-4, 1e-6};
};

struct OutputConfig {
    std::string directory = "out";
    std::vector<std::string> formats{"csv", "json"};

    bool wants(const std::string& format) const;
};

struct RunConfig {
    ModelSpec model;
    std::optional<double> gamma;  // empty: "auto"
    std::size_t grid_n = 16;
    std::size_t quadrature_points = 8;
    SolverConfig solver;
    StudyConfig study;
    OutputConfig output;
    std::uint64_t seed = 0;
};

/// Parses the JSON text of a run configuration. Every key is optional except
/// "model"; unknown keys, wrong types and invalid values throw ConfigError.
RunConfig parse_config(const std::string& text);

RunConfig load_config(const std::string& path);

/// The effective configuration with all defaults filled in. Parsing the dump
/// of this value yields the same RunConfig.
nlohmann::json config_to_json(const RunConfig& config);

}  // namespace mfg::cli
