#pragma once

#include <string>
#include <vector>

#include "pseudospec/config.hpp"

namespace pseudospec::cli {

struct PresetInfo {
  std::string name;
  std::string summary;
};

const std::vector<PresetInfo>& preset_registry();

// Fully populated config for a registered demo case. Unknown names raise an
// input_error whose message lists the registry.
RunConfig preset(const std::string& name);

}  // namespace pseudospec::cli
