#include "pseudospec/run.hpp"

#include <chrono>
#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "pseudospec/ads3.hpp"
#include "pseudospec/cartan.hpp"
#include "pseudospec/flat_spectra.hpp"
#include "pseudospec/quadform.hpp"
#include "pseudospec/report.hpp"
#include "pseudospec/version.hpp"

namespace pseudospec::cli {

namespace {

using nlohmann::json;

struct Outputs {
  CsvTable csv;
  json result;
  std::map<std::string, double> tolerances;
  std::vector<std::string> warnings;
};

// Typed access to the validated parameter map; keys are known to exist for
// required entries and for optional entries with defaults.
struct Params {
  const std::map<std::string, std::string>& map;

  const std::string& str(const std::string& key) const { return map.at(key); }
  bool has(const std::string& key) const { return map.count(key) != 0; }
  double real(const std::string& key) const {
    return parse_real(map.at(key), key);
  }
  std::int64_t integer(const std::string& key) const {
    return parse_int(map.at(key), key);
  }
  int small_int(const std::string& key) const {
    const std::int64_t v = integer(key);
    if (v < std::numeric_limits<int>::min() ||
        v > std::numeric_limits<int>::max())
      throw input_error("parameter \"" + key + "\" is out of range");
    return static_cast<int>(v);
  }
  Eigen::MatrixXd matrix(const std::string& key) const {
    return parse_matrix(map.at(key), key);
  }
};

std::string join_ints(const quadform::LatticePoint& m) {
  std::string out;
  for (int i = 0; i < m.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(m(i));
  }
  return out;
}

std::string join_reals(const Eigen::VectorXd& v) {
  std::string out;
  for (int i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_real17(v(i));
  }
  return out;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

flat::DeformationParameter deformation_of(const Params& p) {
  const int n = p.small_int("n");
  const int pos = p.small_int("p");
  const int neg = p.small_int("q");
  const Eigen::MatrixXd g = p.matrix("g");
  if (pos + neg != n)
    throw input_error("parameters \"p\" + \"q\" must equal \"n\"");
  if (g.rows() != n || g.cols() != n)
    throw input_error("parameter \"g\" must be an n x n matrix");
  return {g, quadform::Signature{pos, neg, 0}};
}

flat::SpectrumWindow window_of(const Params& p, int box_radius) {
  return {p.real("lambda_min"), p.real("lambda_max"), box_radius};
}

Outputs run_flat_spectrum(const Params& p) {
  const flat::DeformationParameter param = deformation_of(p);
  flat::EnumerationOptions opts;
  opts.dedupe_tol = p.real("dedupe_tol");
  const flat::SpectrumSample sample =
      flat::enumerate_spectrum(param, window_of(p, p.small_int("box_radius")),
                               opts);

  Outputs out;
  out.csv.header = {"eigenvalue", "multiplicity", "witness"};
  json entries = json::array();
  for (const auto& entry : sample.entries) {
    out.csv.rows.push_back({format_real17(entry.eigenvalue),
                            std::to_string(entry.multiplicity()),
                            join_ints(entry.witnesses.front())});
    json witnesses = json::array();
    for (const auto& w : entry.witnesses) {
      json coords = json::array();
      for (int i = 0; i < w.size(); ++i) coords.push_back(w(i));
      witnesses.push_back(coords);
    }
    entries.push_back({{"eigenvalue", entry.eigenvalue},
                       {"multiplicity", entry.multiplicity()},
                       {"witnesses", witnesses}});
  }
  out.result = {{"window",
                 {{"lambda_min", sample.window.lambda_min},
                  {"lambda_max", sample.window.lambda_max},
                  {"box_radius", sample.window.box_radius}}},
                {"complete_below_box", sample.complete_below_box},
                {"entries", entries}};
  out.tolerances = {{"dedupe_tol", opts.dedupe_tol}};
  return out;
}

Outputs run_stability_scan(const Params& p, std::uint64_t seed) {
  const flat::DeformationParameter g0 = deformation_of(p);
  flat::EnumerationOptions opts;
  opts.dedupe_tol = p.real("dedupe_tol");
  const double match_tol = p.real("match_tol");
  const std::vector<double> stable = flat::stability_scan(
      g0, p.real("radius"), p.small_int("samples"),
      window_of(p, p.small_int("box_radius")), match_tol, seed, opts);

  Outputs out;
  out.csv.header = {"eigenvalue"};
  for (const double v : stable) out.csv.rows.push_back({format_real17(v)});
  out.result = {{"stable_eigenvalues", stable},
                {"samples", p.integer("samples")},
                {"radius", p.real("radius")},
                {"match_tol", match_tol},
                {"seed", seed}};
  out.tolerances = {{"match_tol", match_tol}, {"dedupe_tol", opts.dedupe_tol}};
  return out;
}

Outputs run_oppenheim_scan(const Params& p) {
  const flat::DeformationParameter param = deformation_of(p);
  std::vector<flat::SpectrumWindow> windows;
  for (const std::int64_t box : parse_int_list(p.str("boxes"), "boxes")) {
    if (box < 0 || box > std::numeric_limits<int>::max())
      throw input_error("parameter \"boxes\": radius out of range");
    windows.push_back(window_of(p, static_cast<int>(box)));
  }
  flat::DensityOptions opts;
  opts.dedupe_tol = p.real("dedupe_tol");
  opts.rational_search_bound = p.integer("rational_search_bound");
  opts.rational_tol = p.real("rational_tol");
  opts.gap_shrink_factor = p.real("gap_shrink_factor");
  const flat::DensityReport report =
      flat::density_diagnostics(param, windows, opts);

  Outputs out;
  out.csv.header = {"box_radius", "distinct_values", "min_gap"};
  json boxes = json::array();
  for (const auto& stat : report.boxes) {
    out.csv.rows.push_back({std::to_string(stat.box_radius),
                            std::to_string(stat.distinct_values),
                            format_real17(stat.min_gap)});
    boxes.push_back({{"box_radius", stat.box_radius},
                     {"distinct_values", stat.distinct_values},
                     {"min_gap", stat.min_gap}});
  }
  json rationality;  // null unless certified
  if (report.rationality) {
    json matrix = json::array();
    for (int i = 0; i < report.rationality->matrix.rows(); ++i) {
      json row = json::array();
      for (int j = 0; j < report.rationality->matrix.cols(); ++j)
        row.push_back(report.rationality->matrix(i, j));
      matrix.push_back(row);
    }
    rationality = {{"scale", report.rationality->scale}, {"matrix", matrix}};
  }
  out.result = {{"classification", flat::to_string(report.classification)},
                {"boxes", boxes},
                {"observed_shrink", report.observed_shrink},
                {"gap_shrink_factor", report.gap_shrink_factor},
                {"rationality", rationality},
                {"rational_search_bound", report.rational_search_bound},
                {"rational_tol", report.rational_tol},
                {"warning", report.warning}};
  out.tolerances = {{"dedupe_tol", opts.dedupe_tol},
                    {"rational_tol", opts.rational_tol}};
  if (!report.warning.empty()) out.warnings.push_back(report.warning);
  return out;
}

Eigen::Matrix2d as_2x2(const Eigen::MatrixXd& m, const std::string& key) {
  if (m.rows() != 2 || m.cols() != 2)
    throw input_error("parameter \"" + key + "\" must be a 2x2 matrix");
  return m;
}

cartan::AmbientGroup group_of(const std::string& text) {
  if (text == "sl2xsl2") return cartan::AmbientGroup::sl2_pair();
  if (text.size() > 2 && text.compare(0, 2, "sl") == 0) {
    const std::int64_t n = parse_int(text.substr(2), "group");
    if (n >= 2 && n <= 64) return cartan::AmbientGroup::sl(static_cast<int>(n));
  }
  throw input_error("parameter \"group\": want sl<N> (N in 2..64) or sl2xsl2");
}

Outputs run_cartan(const Params& p) {
  const cartan::AmbientGroup group = group_of(p.str("group"));
  const Eigen::MatrixXd a = p.matrix("a");
  cartan::Element element = cartan::Element::sl(a);
  if (group.kind == cartan::GroupKind::SL2xSL2) {
    if (!p.has("b"))
      throw input_error("parameter \"b\" is required for group sl2xsl2");
    element = cartan::Element::pair(as_2x2(a, "a"),
                                    as_2x2(p.matrix("b"), "b"));
  } else if (p.has("b")) {
    throw input_error("parameter \"b\" only applies to group sl2xsl2");
  }
  const cartan::CartanVector mu = cartan::cartan_projection(group, element);

  Outputs out;
  std::vector<std::string> row;
  for (int i = 0; i < mu.coords.size(); ++i) {
    out.csv.header.push_back("mu_" + std::to_string(i));
    row.push_back(format_real17(mu.coords(i)));
  }
  out.csv.rows.push_back(row);
  out.result = {{"group", p.str("group")},
                {"coords", vector_to_json(mu.coords)},
                {"norm", mu.norm()}};
  out.tolerances = {{"determinant_tol", 1e-6}};
  return out;
}

cartan::ConeSubset cone_of(const std::string& text, const std::string& key) {
  const cartan::AmbientGroup pair = cartan::AmbientGroup::sl2_pair();
  if (text == "first-axis") return cartan::first_axis_ray(pair);
  if (text == "diagonal") return cartan::diagonal_ray(pair);
  if (text == "full-chamber") return cartan::full_chamber(pair);
  return {pair, parse_vectors(text, key)};
}

Outputs run_properness(const Params& p, std::uint64_t seed) {
  const cartan::ConeSubset mu_l = cone_of(p.str("cone_l"), "cone_l");
  const cartan::ConeSubset mu_h = cone_of(p.str("cone_h"), "cone_h");
  const cartan::PropernessResult res =
      cartan::properness_check(mu_l, mu_h, p.small_int("probes"), seed);

  Outputs out;
  out.csv.header = {"verdict", "min_probe_distance", "witness"};
  out.csv.rows.push_back({cartan::to_string(res.verdict),
                          format_real17(res.min_probe_distance),
                          res.witness ? join_reals(*res.witness) : ""});
  out.result = {{"verdict", cartan::to_string(res.verdict)},
                {"min_probe_distance", res.min_probe_distance},
                {"witness",
                 res.witness ? vector_to_json(*res.witness) : json()},
                {"probes", p.integer("probes")},
                {"seed", seed}};
  out.tolerances = {{"exact_residual_tol", 1e-12}, {"boundary_tol", 1e-9}};
  return out;
}

ads3::GroupPresentation presentation_of(const Params& p) {
  const std::string& name = p.str("presentation");
  if (name == "standard") return ads3::standard_presentation();
  if (name == "rank-one") return ads3::rank_one_presentation(p.real("t"));
  throw input_error(
      "parameter \"presentation\": want \"standard\" or \"rank-one\"");
}

Outputs run_sharpness(const Params& p) {
  const ads3::GroupPresentation pres = presentation_of(p);
  const int word_radius = p.small_int("word_radius");
  const double dedupe_tol = p.real("dedupe_tol");
  const ads3::WordBall ball =
      ads3::enumerate_ball(pres, word_radius, dedupe_tol);
  std::vector<cartan::Element> elems;
  elems.reserve(ball.words.size());
  for (const auto& w : ball.words) elems.push_back(w.element);
  const cartan::SharpnessEstimate est = cartan::estimate_sharpness(
      cartan::AmbientGroup::sl2_pair(), elems,
      cone_of(p.str("cone"), "cone"), p.real("c_prime_cap"), word_radius);

  Outputs out;
  out.csv.header = {"c_prime", "C"};
  json pareto = json::array();
  for (const auto& [cp, c] : est.pareto) {
    out.csv.rows.push_back({format_real17(cp), format_real17(c)});
    pareto.push_back({cp, c});
  }
  out.result = {{"C", est.C},
                {"c_prime", est.c_prime},
                {"word_radius", est.word_radius},
                {"samples", est.samples},
                {"skipped", est.skipped},
                {"sharp", est.sharp},
                {"pareto", pareto},
                {"merged_duplicates", ball.merged_duplicates}};
  out.tolerances = {{"sharpness_floor", cartan::kSharpnessFloor},
                    {"dedupe_tol", dedupe_tol}};
  if (ball.merged_duplicates > 0)
    out.warnings.push_back("merged " +
                           std::to_string(ball.merged_duplicates) +
                           " nearly coincident words; the presentation may "
                           "not be faithful at this tolerance");
  return out;
}

Outputs run_ads3_stable(const Params& p) {
  const ads3::StableSpectrum spec =
      ads3::stable_spectrum(p.real("C"), p.integer("l_max"));

  Outputs out;
  out.csv.header = {"l", "eigenvalue"};
  long long l = spec.l_min;
  for (const long long e : spec.eigenvalues)
    out.csv.rows.push_back({std::to_string(l++), std::to_string(e)});
  out.result = {{"C", spec.C},
                {"l_min", spec.l_min},
                {"eigenvalues", spec.eigenvalues}};
  out.tolerances = {{"l_min_rounding_guard", 1e-9}};
  return out;
}

Outputs run_orbit_count(const Params& p) {
  const std::vector<double> radii = parse_real_list(p.str("radii"), "radii");
  const ads3::OrbitCount oc =
      ads3::orbit_count(presentation_of(p), p.small_int("word_radius"), radii,
                        p.real("dedupe_tol"));

  Outputs out;
  out.csv.header = {"radius", "count"};
  for (std::size_t i = 0; i < oc.radii.size(); ++i)
    out.csv.rows.push_back(
        {format_real17(oc.radii[i]), std::to_string(oc.counts[i])});
  out.result = {{"radii", oc.radii},
                {"counts", oc.counts},
                {"fitted_slope", oc.fitted_slope},
                {"fit_points", oc.fit_points},
                {"max_mu_norm", oc.max_mu_norm},
                {"complete", oc.complete}};
  out.tolerances = {{"dedupe_tol", p.real("dedupe_tol")}};
  if (!oc.complete)
    out.warnings.push_back(
        "word ball stops short of the largest radius; counts there are "
        "lower bounds");
  return out;
}

Outputs run_poincare(const Params& p) {
  std::vector<int> schedule;
  for (const std::int64_t r : parse_int_list(p.str("schedule"), "schedule")) {
    if (r < 0 || r > std::numeric_limits<int>::max())
      throw input_error("parameter \"schedule\": radius out of range");
    schedule.push_back(static_cast<int>(r));
  }
  const ads3::PoincareSums ps = ads3::poincare_partial_sums(
      presentation_of(p), p.real("decay_rate"), schedule,
      p.real("dedupe_tol"));

  Outputs out;
  out.csv.header = {"radius", "partial_sum", "increment"};
  json rows = json::array();
  for (const auto& row : ps.rows) {
    out.csv.rows.push_back({std::to_string(row.radius),
                            format_real17(row.partial_sum),
                            format_real17(row.increment)});
    rows.push_back({{"radius", row.radius},
                    {"partial_sum", row.partial_sum},
                    {"increment", row.increment}});
  }
  out.result = {{"rows", rows},
                {"decay_rate", ps.decay_rate},
                {"c_est", ps.c_est},
                {"expected_divergent", ps.expected_divergent}};
  out.tolerances = {{"dedupe_tol", p.real("dedupe_tol")}};
  return out;
}

Outputs dispatch(const std::string& command,
                 const std::map<std::string, std::string>& params,
                 std::uint64_t seed) {
  const Params p{params};
  if (command == "flat-spectrum") return run_flat_spectrum(p);
  if (command == "stability-scan") return run_stability_scan(p, seed);
  if (command == "oppenheim-scan") return run_oppenheim_scan(p);
  if (command == "cartan") return run_cartan(p);
  if (command == "properness") return run_properness(p, seed);
  if (command == "sharpness") return run_sharpness(p);
  if (command == "ads3-stable") return run_ads3_stable(p);
  if (command == "orbit-count") return run_orbit_count(p);
  if (command == "poincare") return run_poincare(p);
  throw input_error("unknown command \"" + command + "\"");  // unreachable
}

}  // namespace

int run(const RunConfig& config, std::string* error_out) {
  const auto start = std::chrono::steady_clock::now();
  const auto fail = [&](const char* kind, const char* what, int code) {
    if (error_out)
      *error_out = config.command + ": " + kind + ": " + what;
    return code;
  };
  try {
    const std::map<std::string, std::string> params = validate(config);
    Outputs out = dispatch(config.command, params, config.seed);

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(config.output_path, ec);
    if (ec && !fs::is_directory(config.output_path))
      throw input_error("cannot create output directory " +
                        config.output_path + ": " + ec.message());
    const fs::path dir(config.output_path);
    write_file_atomic((dir / "result.csv").string(), out.csv.to_string());
    write_json_atomic((dir / "result.json").string(), out.result);

    const double duration =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    const json manifest = {{"tool", kToolName},
                           {"version", kVersion},
                           {"command", config.command},
                           {"parameters", params},
                           {"seed", config.seed},
                           {"output_path", config.output_path},
                           {"duration_seconds", duration},
                           {"tolerances", out.tolerances},
                           {"warnings", out.warnings}};
    write_json_atomic((dir / "manifest.json").string(), manifest);
    return kOk;
  } catch (const input_error& e) {
    return fail("input error", e.what(), kInputError);
  } catch (const budget_error& e) {
    return fail("budget error", e.what(), kBudgetError);
  } catch (const std::exception& e) {
    return fail("internal error", e.what(), kInternalError);
  }
}

}  // namespace pseudospec::cli
