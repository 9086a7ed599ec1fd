#pragma once

#include <cstdio>
#include <string>

namespace pseudospec::detail {

// snprintf into a std::string; big enough for every message we build.
template <class... Args>
std::string fmt(const char* f, Args... args) {
  char buf[320];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

}  // namespace pseudospec::detail
