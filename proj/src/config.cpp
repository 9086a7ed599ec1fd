#include "pseudospec/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pseudospec/detail/format.hpp"

namespace pseudospec::cli {

namespace {

using detail::fmt;

const std::map<std::string, std::vector<ParamSpec>>& schemas() {
  static const std::map<std::string, std::vector<ParamSpec>> table = {
      {"flat-spectrum",
       {
           {"n", "int", true, "", "lattice rank"},
           {"p", "int", true, "", "positive inertia count"},
           {"q", "int", true, "", "negative inertia count"},
           {"g", "matrix", true, "", "deformation matrix, rows ';'-separated"},
           {"box_radius", "int", true, "", "sup-norm lattice box radius"},
           {"lambda_min", "real", true, "", "window lower edge"},
           {"lambda_max", "real", true, "", "window upper edge"},
           {"dedupe_tol", "real", false, "1e-09",
            "eigenvalue clustering width"},
       }},
      {"stability-scan",
       {
           {"n", "int", true, "", "lattice rank"},
           {"p", "int", true, "", "positive inertia count"},
           {"q", "int", true, "", "negative inertia count"},
           {"g", "matrix", true, "", "base deformation matrix"},
           {"radius", "real", true, "", "entrywise perturbation radius"},
           {"samples", "int", true, "", "number of perturbed spectra"},
           {"box_radius", "int", true, "", "sup-norm lattice box radius"},
           {"lambda_min", "real", true, "", "window lower edge"},
           {"lambda_max", "real", true, "", "window upper edge"},
           {"match_tol", "real", false, "1e-06",
            "width for matching eigenvalues across samples"},
           {"dedupe_tol", "real", false, "1e-09",
            "eigenvalue clustering width"},
       }},
      {"oppenheim-scan",
       {
           {"n", "int", true, "", "lattice rank"},
           {"p", "int", true, "", "positive inertia count"},
           {"q", "int", true, "", "negative inertia count"},
           {"g", "matrix", true, "", "deformation matrix"},
           {"boxes", "int_list", true, "",
            "increasing box radii, comma-separated"},
           {"lambda_min", "real", true, "", "window lower edge"},
           {"lambda_max", "real", true, "", "window upper edge"},
           {"rational_search_bound", "int", false, "1000",
            "largest integer entry tried for the certificate"},
           {"rational_tol", "real", false, "1e-09",
            "certificate verification width"},
           {"gap_shrink_factor", "real", false, "4",
            "min-gap shrink declaring the dense side"},
           {"dedupe_tol", "real", false, "1e-09",
            "eigenvalue clustering width"},
       }},
      {"cartan",
       {
           {"group", "string", true, "", "sl<N> or sl2xsl2"},
           {"a", "matrix", true, "", "the element (first factor)"},
           {"b", "matrix", false, "", "second factor, sl2xsl2 only"},
       }},
      {"properness",
       {
           {"cone_l", "string", true, "",
            "first-axis | diagonal | full-chamber | generator rows"},
           {"cone_h", "string", true, "", "same encodings as cone_l"},
           {"probes", "int", false, "64", "random probes guarding Boundary"},
       }},
      {"sharpness",
       {
           {"presentation", "string", true, "", "standard | rank-one"},
           {"t", "real", false, "1", "rank-one diagonal exponent"},
           {"word_radius", "int", true, "", "word ball radius"},
           {"cone", "string", false, "diagonal", "reference cone"},
           {"c_prime_cap", "real", false, "0", "additive slack at the head"},
           {"dedupe_tol", "real", false, "1e-08", "word-ball merge width"},
       }},
      {"ads3-stable",
       {
           {"C", "real", true, "", "sharpness constant in (0,1]"},
           {"l_max", "int", true, "", "largest spectral parameter listed"},
       }},
      {"orbit-count",
       {
           {"presentation", "string", true, "", "standard | rank-one"},
           {"t", "real", false, "1", "rank-one diagonal exponent"},
           {"word_radius", "int", true, "", "word ball radius"},
           {"radii", "real_list", true, "",
            "increasing pseudo-ball radii, comma-separated"},
           {"dedupe_tol", "real", false, "1e-08", "word-ball merge width"},
       }},
      {"poincare",
       {
           {"presentation", "string", true, "", "standard | rank-one"},
           {"t", "real", false, "1", "rank-one diagonal exponent"},
           {"decay_rate", "real", true, "", "exponent a in exp(-a|mu|)"},
           {"schedule", "int_list", true, "",
            "increasing word radii, comma-separated"},
           {"dedupe_tol", "real", false, "1e-08", "word-ball merge width"},
       }},
  };
  return table;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) parts.push_back(part);
  if (!text.empty() && text.back() == sep) parts.push_back("");
  return parts;
}

void check_parses(const ParamSpec& spec, const std::string& value) {
  if (spec.type == "int")
    parse_int(value, spec.key);
  else if (spec.type == "real")
    parse_real(value, spec.key);
  else if (spec.type == "int_list")
    parse_int_list(value, spec.key);
  else if (spec.type == "real_list")
    parse_real_list(value, spec.key);
  else if (spec.type == "matrix")
    parse_matrix(value, spec.key);
  else if (spec.type == "vectors")
    parse_vectors(value, spec.key);
  // "string": anything goes; the dispatcher interprets it.
}

std::string json_scalar_to_string(const nlohmann::json& v,
                                  const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer())
    return std::to_string(v.get<std::int64_t>());
  if (v.is_number_unsigned())
    return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_float()) return format_real17(v.get<double>());
  throw input_error("config key \"" + key + "\" must be a scalar");
}

}  // namespace

bool operator==(const RunConfig& a, const RunConfig& b) {
  return a.command == b.command && a.parameters == b.parameters &&
         a.seed == b.seed && a.output_path == b.output_path;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, specs] : schemas()) out.push_back(name);
    return out;
  }();
  return names;
}

const std::vector<ParamSpec>& parameter_schema(const std::string& command) {
  const auto it = schemas().find(command);
  if (it == schemas().end())
    throw input_error("unknown command \"" + command + "\"");
  return it->second;
}

std::map<std::string, std::string> validate(const RunConfig& config) {
  const auto it = schemas().find(config.command);
  if (it == schemas().end()) {
    std::string known;
    for (const auto& name : command_names()) {
      if (!known.empty()) known += ", ";
      known += name;
    }
    throw input_error("unknown command \"" + config.command +
                      "\"; commands: " + known);
  }
  const auto& specs = it->second;
  for (const auto& [key, value] : config.parameters) {
    const bool known =
        std::any_of(specs.begin(), specs.end(),
                    [&](const ParamSpec& s) { return s.key == key; });
    if (!known)
      throw input_error("unknown parameter \"" + key + "\" for " +
                        config.command);
  }
  std::map<std::string, std::string> filled = config.parameters;
  for (const auto& spec : specs) {
    const auto have = filled.find(spec.key);
    if (have == filled.end()) {
      if (spec.required)
        throw input_error("missing required parameter \"" + spec.key +
                          "\" (" + spec.help + ")");
      if (!spec.default_value.empty()) filled[spec.key] = spec.default_value;
      continue;
    }
    check_parses(spec, have->second);
  }
  return filled;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot read config file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw input_error("config file " + path + " is not valid JSON: " +
                      e.what());
  }
  if (!doc.is_object())
    throw input_error("config file " + path + " must hold a JSON object");

  RunConfig config;
  for (const auto& [key, value] : doc.items()) {
    if (key == "tool" || key == "version" || key == "duration_seconds" ||
        key == "tolerances" || key == "warnings")
      continue;  // manifest metadata, not configuration
    if (key == "command") {
      config.command = value.get<std::string>();
    } else if (key == "seed") {
      config.seed = value.is_string()
                        ? static_cast<std::uint64_t>(
                              parse_int(value.get<std::string>(), "seed"))
                        : value.get<std::uint64_t>();
    } else if (key == "output_path" || key == "out") {
      config.output_path = value.get<std::string>();
    } else if (key == "parameters") {
      if (!value.is_object())
        throw input_error("\"parameters\" must be an object in " + path);
      for (const auto& [pkey, pvalue] : value.items())
        config.parameters[pkey] = json_scalar_to_string(pvalue, pkey);
    } else {
      config.parameters[key] = json_scalar_to_string(value, key);
    }
  }
  return config;
}

void apply_override(RunConfig& config, const std::string& key_equals_value) {
  const auto eq = key_equals_value.find('=');
  if (eq == std::string::npos || eq == 0)
    throw input_error("override \"" + key_equals_value +
                      "\" must look like key=value");
  const std::string key = key_equals_value.substr(0, eq);
  const std::string value = key_equals_value.substr(eq + 1);
  if (key == "seed")
    config.seed = static_cast<std::uint64_t>(parse_int(value, "seed"));
  else if (key == "out" || key == "output_path")
    config.output_path = value;
  else
    config.parameters[key] = value;
}

double parse_real(const std::string& text, const std::string& key) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw input_error("parameter \"" + key + "\": cannot parse \"" + text +
                      "\" as a real number");
  }
  if (used != text.size())
    throw input_error("parameter \"" + key + "\": trailing characters in \"" +
                      text + "\"");
  return value;
}

std::int64_t parse_int(const std::string& text, const std::string& key) {
  std::size_t used = 0;
  std::int64_t value = 0;
  try {
    value = std::stoll(text, &used);
  } catch (const std::exception&) {
    throw input_error("parameter \"" + key + "\": cannot parse \"" + text +
                      "\" as an integer");
  }
  if (used != text.size())
    throw input_error("parameter \"" + key + "\": trailing characters in \"" +
                      text + "\"");
  return value;
}

std::vector<double> parse_real_list(const std::string& text,
                                    const std::string& key) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) out.push_back(parse_real(part, key));
  if (out.empty())
    throw input_error("parameter \"" + key + "\" must not be empty");
  return out;
}

std::vector<std::int64_t> parse_int_list(const std::string& text,
                                         const std::string& key) {
  std::vector<std::int64_t> out;
  for (const auto& part : split(text, ',')) out.push_back(parse_int(part, key));
  if (out.empty())
    throw input_error("parameter \"" + key + "\" must not be empty");
  return out;
}

Eigen::MatrixXd parse_matrix(const std::string& text, const std::string& key) {
  const auto row_texts = split(text, ';');
  std::vector<std::vector<double>> rows;
  for (const auto& row_text : row_texts)
    rows.push_back(parse_real_list(row_text, key));
  const std::size_t cols = rows.front().size();
  for (const auto& row : rows)
    if (row.size() != cols)
      throw input_error("parameter \"" + key +
                        "\": rows have unequal lengths");
  Eigen::MatrixXd m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
  return m;
}

std::vector<Eigen::VectorXd> parse_vectors(const std::string& text,
                                           const std::string& key) {
  std::vector<Eigen::VectorXd> out;
  for (const auto& part : split(text, ';')) {
    const auto entries = parse_real_list(part, key);
    Eigen::VectorXd v(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i)
      v(static_cast<Eigen::Index>(i)) = entries[i];
    out.push_back(std::move(v));
  }
  return out;
}

std::string format_real17(double x) { return fmt("%.17g", x); }

}  // namespace pseudospec::cli
