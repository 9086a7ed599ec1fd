#pragma once

#include <stdexcept>
#include <string>

namespace pseudospec {

// Caller-fixable problems: bad dimensions, invalid parameters, inverted
// windows, empty sample sets. The CLI maps this class to its own exit code.
class input_error : public std::runtime_error {
 public:
  explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// A (near-)singular matrix where an invertible one is required.
class singular_error : public input_error {
 public:
  explicit singular_error(const std::string& what) : input_error(what) {}
};

// An enumeration would exceed its configured budget. The message says which
// knob to shrink.
class budget_error : public std::runtime_error {
 public:
  explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

// Enumeration budget shared by the lattice-box and word-ball enumerators.
// PSEUDOSPEC_BUDGET in the environment overrides the built-in default.
std::int64_t enumeration_budget(std::int64_t fallback = 100'000'000);

}  // namespace pseudospec
