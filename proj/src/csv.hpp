#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace tdlsys {

// Shortest exact decimal form of a double: %.17g round-trips every finite
// 64-bit value, so downstream consumers see bit-faithful numbers.
inline std::string csv_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

class CsvBuilder {
 public:
  explicit CsvBuilder(std::vector<std::string> header) {
    append_row(header);
  }

  void append_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ',';
      text_ += cells[i];
    }
    text_ += '\n';
  }

  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

}  // namespace tdlsys
