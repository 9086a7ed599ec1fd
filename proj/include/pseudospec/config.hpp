#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pseudospec/errors.hpp"

namespace pseudospec::cli {

// One run of the tool: a command, its flat string parameters, the RNG seed,
// and the directory receiving result.csv / result.json / manifest.json.
struct RunConfig {
  std::string command;
  std::map<std::string, std::string> parameters;
  std::uint64_t seed = 0;
  std::string output_path = ".";
};

bool operator==(const RunConfig& a, const RunConfig& b);

const std::vector<std::string>& command_names();

// Parameter schema entry used for validation and manifest echoing.
struct ParamSpec {
  std::string key;
  std::string type;  // "int", "real", "string", "matrix", "vectors",
                     // "int_list", "real_list"
  bool required = false;
  std::string default_value;  // empty if required or genuinely absent
  std::string help;
};

const std::vector<ParamSpec>& parameter_schema(const std::string& command);

// Rejects unknown commands, unknown keys, missing required keys, and values
// that do not parse at their declared type. Returns the parameters with
// defaults filled in.
std::map<std::string, std::string> validate(const RunConfig& config);

// Flat key-value JSON. Accepts either a plain object of scalars or a
// manifest-shaped object carrying "command" / "parameters" / "seed" /
// "output_path", so a manifest can be replayed as a config.
RunConfig load_config_file(const std::string& path);

// Applies one "key=value" override; the keys "seed" and "out" route to the
// dedicated fields.
void apply_override(RunConfig& config, const std::string& key_equals_value);

// --- string parsing helpers shared by the CLI and the schema validator ---

double parse_real(const std::string& text, const std::string& key);
std::int64_t parse_int(const std::string& text, const std::string& key);
std::vector<double> parse_real_list(const std::string& text,
                                    const std::string& key);
std::vector<std::int64_t> parse_int_list(const std::string& text,
                                         const std::string& key);
// Rows separated by ';', entries by ','. "I" followed by nothing is not
// accepted here; callers wanting identity defaults encode them explicitly.
Eigen::MatrixXd parse_matrix(const std::string& text, const std::string& key);
// Vectors separated by ';', entries by ',' (used for cone generators).
std::vector<Eigen::VectorXd> parse_vectors(const std::string& text,
                                           const std::string& key);

std::string format_real17(double x);

}  // namespace pseudospec::cli
