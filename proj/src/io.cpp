#include "ringmpc/io.hpp"

#include <charconv>
#include <stdexcept>

namespace ringmpc {

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path) : out_(path) {
  if (!out_) throw std::runtime_error("cannot open " + path.string());
}

void CsvWriter::cell(std::string_view s) {
  if (!line_start_) out_ << ',';
  line_start_ = false;
  const bool quote = s.find_first_of(",\"\n") != std::string_view::npos;
  if (!quote) {
    out_ << s;
    return;
  }
  out_ << '"';
  for (char c : s) {
    if (c == '"') out_ << '"';
    out_ << c;
  }
  out_ << '"';
}

void CsvWriter::cell(double v) { cell(std::string_view(format_double(v))); }
void CsvWriter::cell(int v) { cell(std::string_view(std::to_string(v))); }
void CsvWriter::cell(std::int64_t v) {
  cell(std::string_view(std::to_string(v)));
}
void CsvWriter::cell(bool v) { cell(std::string_view(v ? "true" : "false")); }

void CsvWriter::end_row() {
  out_ << '\n';
  line_start_ = true;
}

}  // namespace ringmpc
