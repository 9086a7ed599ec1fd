#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace pseudospec::cli {

// Rectangular CSV payload: comma separators, '.' decimal point, header row,
// LF line endings, floats at 17 significant digits.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_string() const;
};

// Writes content to path atomically (temp file + rename).
void write_file_atomic(const std::string& path, const std::string& content);

void write_json_atomic(const std::string& path, const nlohmann::json& value);

}  // namespace pseudospec::cli
