#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

namespace ringmpc {

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);

  void cell(std::string_view s);
  void cell(const char* s) { cell(std::string_view(s)); }
  void cell(const std::string& s) { cell(std::string_view(s)); }
  void cell(double v);
  void cell(int v);
  void cell(std::int64_t v);
  void cell(bool v);
  void end_row();

  template <class... Ts>
  void row(const Ts&... ts) {
    (cell(ts), ...);
    end_row();
  }

 private:
  std::ofstream out_;
  bool line_start_ = true;
};

}  // namespace ringmpc
