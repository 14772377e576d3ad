#pragma once

#include "hen/csv.hpp"
#include "hen/metrics.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace hen {

/// One evaluated query. CSV column order:
/// id, mse, one_minus_ssim, matched_index, correct_identity.
struct PairRow {
  std::uint32_t id = 0;
  double mse = 0.0;
  std::optional<double> one_minus_ssim;
  std::int64_t matched_index = -1;
  bool correct_identity = false;
};

CsvTable pair_table(std::span<const PairRow> rows);

/// Columns: label, bin_low, bin_high, self_count, cross_count.
void append_histogram_rows(CsvTable& table, std::string_view label, const SeparabilityReport& report);
CsvTable histogram_table();

/// Summary statistics and histogram as a JSON object (pretty-printed).
std::string separability_json(const SeparabilityReport& report, std::string_view label);

}  // namespace hen
