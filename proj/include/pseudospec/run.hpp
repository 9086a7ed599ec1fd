#pragma once

#include <string>

#include "pseudospec/config.hpp"

namespace pseudospec::cli {

// Exit code classes; anything unexpected maps to kInternalError.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 2;
inline constexpr int kBudgetError = 3;
inline constexpr int kInternalError = 4;

// Validates, dispatches, and writes result.csv, result.json, manifest.json
// under config.output_path (created if missing; files replaced atomically).
// Returns an exit code instead of throwing; error text goes to error_out.
int run(const RunConfig& config, std::string* error_out = nullptr);

}  // namespace pseudospec::cli
