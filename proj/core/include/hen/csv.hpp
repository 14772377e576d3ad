#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hen {

/// Shortest round-trip decimal form; identical input gives identical text.
std::string format_number(double v);

/// In-memory CSV table with a fixed header. Cells are written verbatim
/// (no quoting is needed for the numeric and identifier content used here).
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<std::string> cells);

  const std::vector<std::string>& header() const noexcept { return header_; }
  const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }

  void write(std::ostream& out) const;
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

inline std::string cell(double v) { return format_number(v); }
inline std::string cell(bool v) { return v ? "true" : "false"; }
inline std::string cell(std::int64_t v) { return std::to_string(v); }
inline std::string cell(int v) { return std::to_string(v); }
inline std::string cell(std::uint32_t v) { return std::to_string(v); }
inline std::string cell(std::size_t v) { return std::to_string(v); }
inline std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : "NA"; }

}  // namespace hen
