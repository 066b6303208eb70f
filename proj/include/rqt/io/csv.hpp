#pragma once

// Minimal CSV emitter: '#' comment header, one column-name line, then rows of
// numbers in %.15e. Output is byte-identical for identical inputs.

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "rqt/errors.hpp"

namespace rqt::io {

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15e", v);
  return buf;
}

using HeaderLines = std::vector<std::pair<std::string, std::string>>;

class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const HeaderLines& header, std::vector<std::string> columns)
      : os_(os), width_(columns.size()) {
    for (const auto& [k, v] : header) os_ << "# " << k << ": " << v << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) os_ << (i ? "," : "") << columns[i];
    os_ << '\n';
  }

  void row(std::initializer_list<double> values) { row(std::vector<double>(values)); }
  void row(const std::vector<double>& values) {
    if (values.size() != width_) throw Error("csv row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) os_ << (i ? "," : "") << format_number(values[i]);
    os_ << '\n';
    ++rows_;
  }
  std::size_t rows() const { return rows_; }

 private:
  std::ostream& os_;
  std::size_t width_;
  std::size_t rows_ = 0;
};

inline std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open " + path + " for writing");
  return f;
}

}  // namespace rqt::io
