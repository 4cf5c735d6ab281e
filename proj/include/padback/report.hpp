#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "padback/eval.hpp"

namespace padback {

// One experimental condition. `mode` is "zero", "wrap" or "none" (no trigger
// in training).
struct ResultRow {
  std::string condition;
  double rate = 0.0;
  std::size_t trigger_len = 0;
  std::string mode;
  AttackMetrics metrics;
};

inline constexpr std::string_view kCsvHeader = "condition,rate,trigger_len,mode,ba,asr,dacc,dasr";

std::string format_csv(std::span<const ResultRow> rows);
nlohmann::json summary_json(std::span<const ResultRow> rows, const nlohmann::json& meta);

enum class ReportFormat { Csv, Json };

// Atomic write (temp file + rename). Output is byte-stable for identical
// inputs.
void emit_report(std::span<const ResultRow> rows, const std::filesystem::path& path,
                 ReportFormat format, const nlohmann::json& meta = nlohmann::json::object());

}  // namespace padback
