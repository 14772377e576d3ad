#include "hen/report.hpp"

#include <json.hpp>

namespace hen {

CsvTable pair_table(std::span<const PairRow> rows) {
  CsvTable table({"id", "mse", "one_minus_ssim", "matched_index", "correct_identity"});
  for (const auto& r : rows) {
    table.add_row({cell(r.id), cell(r.mse), cell(r.one_minus_ssim), cell(r.matched_index),
                   cell(r.correct_identity)});
  }
  return table;
}

CsvTable histogram_table() {
  return CsvTable({"label", "bin_low", "bin_high", "self_count", "cross_count"});
}

void append_histogram_rows(CsvTable& table, std::string_view label, const SeparabilityReport& report) {
  for (const auto& bin : report.histogram) {
    table.add_row({std::string(label), cell(bin.low), cell(bin.high), cell(bin.self_count),
                   cell(bin.cross_count)});
  }
}

std::string separability_json(const SeparabilityReport& report, std::string_view label) {
  nlohmann::ordered_json j;
  j["label"] = label;
  j["pairs"] = report.self_sims.size();
  j["self_mean"] = report.self_mean;
  j["self_std"] = report.self_std;
  j["cross_mean"] = report.cross_mean;
  j["cross_std"] = report.cross_std;
  j["gap"] = report.gap;
  j["zero_norm_pairs"] = report.zero_norm_pairs;
  auto& hist = j["histogram"] = nlohmann::ordered_json::array();
  for (const auto& bin : report.histogram) {
    hist.push_back({{"low", bin.low}, {"high", bin.high}, {"self", bin.self_count}, {"cross", bin.cross_count}});
  }
  return j.dump(2);
}

}  // namespace hen
