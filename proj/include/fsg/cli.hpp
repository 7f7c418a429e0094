#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace fsg::cli {

inline constexpr const char* kVersion = "0.1.0";

enum class Format { Csv, Json };

struct Table {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row) { rows.push_back(std::move(row)); }
};

/// CSV: header row then rows with 17 significant digits.
/// JSON: {"meta": {...}, "columns": [...], "rows": [[...], ...]}.
std::string render(const Table& t, Format f);

/// Writes via a temporary file in the same directory and a rename.
void write_atomic(const std::string& path, const std::string& content);

/// Runs the experiment driver.  Exit codes: 0 success, 1 numerical defect,
/// 2 usage or input error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fsg::cli
