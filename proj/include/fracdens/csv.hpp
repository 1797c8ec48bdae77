#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracdens/grid.hpp"

namespace fracdens {

// CSV conventions: comma separators, '.' decimal, one header row, comment
// lines prefixed with '#'. The first comment carries the schema version, the
// second the config echo.
constexpr const char* kCsvSchema = "# fracdens csv v1";

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& config_echo, const std::vector<std::string>& columns)
      : out_(path) {
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
    out_ << kCsvSchema << "\n";
    if (!config_echo.empty()) out_ << "# config: " << config_echo << "\n";
    for (size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << "\n";
    out_ << std::setprecision(17);
  }

  void row(const std::vector<double>& values) {
    for (size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << values[i];
    out_ << "\n";
  }

  void row(const std::vector<std::string>& values) {
    for (size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << values[i];
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

inline void write_path_csv(const std::string& path, const SampledPath& p, const std::string& config_echo) {
  std::vector<std::string> cols{"t"};
  for (int c = 0; c < p.n_comp(); ++c) cols.push_back("y" + std::to_string(c + 1));
  CsvWriter w(path, config_echo, cols);
  for (int k = 0; k < p.n_nodes(); ++k) {
    std::vector<double> row{p.grid.node(k)};
    for (int c = 0; c < p.n_comp(); ++c) row.push_back(p.values(k, c));
    w.row(row);
  }
}

}  // namespace fracdens
