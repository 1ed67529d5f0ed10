#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "pencil/numeric.hpp"

namespace pencil {

/// Shortest representation that round-trips a double; deterministic across
/// runs, so identical configs produce byte-identical tables.
std::string fmt_double(double x);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);

  void row(const std::vector<std::string>& cells);
  const std::string& path() const { return path_; }

  static std::string cell(double x) { return fmt_double(x); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(int i) { return std::to_string(i); }

 private:
  std::string path_;
  std::ofstream out_;
};

}  // namespace pencil
