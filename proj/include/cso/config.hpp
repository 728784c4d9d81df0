#pragma once

#include <filesystem>

#include "json.hpp"

#include "cso/experiments.hpp"

namespace cso {

using Json = nlohmann::json;

// Reads and parses a JSON file; ConfigError when missing or malformed.
Json read_json_file(const std::filesystem::path& path);

// {"type": "RobustLogistic", "d": 10, "sigma_xi2": 1, "sigma_eta2": 10,
//  "x_star": [...], "domain_radius": 100}. x_star defaults to ones / sqrt(d).
// LavRegression takes "smoothing": "None" or {"type": "Huber", "gamma": 0.1}.
InstanceSpec instance_from_json(const Json& j);
Json to_json(const InstanceSpec& spec);

// {"type": "ClosedForm"} or {"type": "MonteCarlo", "N": 1000000, "seed": 7}.
OracleSpec oracle_from_json(const Json& j);
Json to_json(const OracleSpec& oracle);

SolverConfig solver_from_json(const Json& j);

// Strings ("1/2", "alpha=1/2", "n=100"), numbers (0.5) or {"n": 100}.
Strategy strategy_from_json(const Json& j);

ExperimentConfig experiment_from_json(const Json& j);

Scheme parse_scheme(const std::string& s);

}  // namespace cso
