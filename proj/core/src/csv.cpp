#include "hen/csv.hpp"

#include "hen/error.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

namespace hen {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) {
    throw Error(ErrorCode::InvalidArgument, "CSV row width differs from header");
  }
  rows_.push_back(std::move(cells));
}

void CsvTable::write(std::ostream& out) const {
  const auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
}

std::string CsvTable::str() const {
  std::ostringstream ss;
  write(ss);
  return ss.str();
}

}  // namespace hen
