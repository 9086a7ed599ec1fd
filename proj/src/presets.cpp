#include "pseudospec/presets.hpp"

#include <cmath>
#include <map>

namespace pseudospec::cli {

namespace {

std::map<std::string, RunConfig> build_presets() {
  std::map<std::string, RunConfig> out;

  {
    // One-dimensional circle at doubled circumference: the three lowest
    // modes. Shorter strings would move every line up in pitch.
    RunConfig c;
    c.command = "flat-spectrum";
    c.parameters = {{"n", "1"},          {"p", "1"},
                    {"q", "0"},          {"g", "2"},
                    {"box_radius", "3"}, {"lambda_min", "-50"},
                    {"lambda_max", "1"}};
    out["string-1d"] = c;
  }
  {
    // Lorentzian square torus: the whole null cone of the standard form
    // piles multiplicity onto the zero eigenvalue.
    RunConfig c;
    c.command = "flat-spectrum";
    c.parameters = {{"n", "2"},           {"p", "1"},
                    {"q", "1"},           {"g", "1,0;0,1"},
                    {"box_radius", "10"}, {"lambda_min", "-1e-9"},
                    {"lambda_max", "1e-9"}};
    out["null-directions"] = c;
  }
  {
    // Values of m1^2 + m2^2 - sqrt(2) m3^2: not proportional to an integer
    // form, so the minimum gap collapses as the box grows.
    RunConfig c;
    c.command = "oppenheim-scan";
    const std::string scale = format_real17(std::pow(2.0, -0.25));
    c.parameters = {{"n", "3"},
                    {"p", "2"},
                    {"q", "1"},
                    {"g", "1,0,0;0,1,0;0,0," + scale},
                    {"boxes", "10,20,40,60"},
                    {"lambda_min", "-500"},
                    {"lambda_max", "500"},
                    {"rational_search_bound", "1000"}};
    out["oppenheim-irrational"] = c;
  }
  {
    // The undeformed integral counterpart: certificate found, gaps pinned
    // to multiples of 4 pi^2.
    RunConfig c;
    c.command = "oppenheim-scan";
    c.parameters = {{"n", "3"},
                    {"p", "2"},
                    {"q", "1"},
                    {"g", "1,0,0;0,1,0;0,0,1"},
                    {"boxes", "10,20,40,60"},
                    {"lambda_min", "-500"},
                    {"lambda_max", "500"},
                    {"rational_search_bound", "1000"}};
    out["oppenheim-integer"] = c;
  }
  {
    // Rank-two first-factor group against the diagonal reference ray; the
    // analytic constant is 1/sqrt(2).
    RunConfig c;
    c.command = "sharpness";
    c.parameters = {{"presentation", "standard"},
                    {"word_radius", "6"},
                    {"cone", "diagonal"}};
    out["ads3-standard"] = c;
  }
  return out;
}

const std::map<std::string, RunConfig>& presets() {
  static const std::map<std::string, RunConfig> table = build_presets();
  return table;
}

}  // namespace

const std::vector<PresetInfo>& preset_registry() {
  static const std::vector<PresetInfo> registry = {
      {"string-1d", "circle of circumference 2: eigenvalues 0, -pi^2, -4pi^2"},
      {"null-directions",
       "Lorentzian square torus: null modes stack multiplicity on zero"},
      {"oppenheim-irrational",
       "indefinite irrational form diag(1,1,-sqrt 2): gaps collapse"},
      {"oppenheim-integer",
       "integral form diag(1,1,-1): certificate plus 4pi^2 gap floor"},
      {"ads3-standard",
       "sharpness of the rank-two first-factor group on the diagonal ray"},
  };
  return registry;
}

RunConfig preset(const std::string& name) {
  const auto it = presets().find(name);
  if (it != presets().end()) return it->second;
  std::string listing;
  for (const auto& info : preset_registry()) {
    if (!listing.empty()) listing += ", ";
    listing += info.name;
  }
  throw input_error("unknown preset \"" + name + "\"; presets: " + listing);
}

}  // namespace pseudospec::cli
