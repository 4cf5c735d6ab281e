#include "padback/report.hpp"

#include <cstdio>

#include "padback/errors.hpp"
#include "padback/manifest.hpp"

namespace padback {
using nlohmann::json;

std::string format_csv(std::span<const ResultRow> rows) {
  std::string out(kCsvHeader);
  out += '\n';
  char line[512];
  for (const auto& r : rows) {
    require(r.condition.find_first_of(",\n\"") == std::string::npos,
            "report: condition names must not contain commas, quotes or newlines");
    std::snprintf(line, sizeof line, "%s,%g,%zu,%s,%.6f,%.6f,%.6f,%.6f\n", r.condition.c_str(),
                  r.rate, r.trigger_len, r.mode.c_str(), r.metrics.ba, r.metrics.asr,
                  r.metrics.dacc, r.metrics.dasr);
    out += line;
  }
  return out;
}

json summary_json(std::span<const ResultRow> rows, const json& meta) {
  json j;
  j["meta"] = meta;
  json list = json::array();
  for (const auto& r : rows) {
    list.push_back({{"condition", r.condition},
                    {"rate", r.rate},
                    {"trigger_len", r.trigger_len},
                    {"mode", r.mode},
                    {"ba", r.metrics.ba},
                    {"asr", r.metrics.asr},
                    {"dacc", r.metrics.dacc},
                    {"dasr", r.metrics.dasr},
                    {"ba_correct", r.metrics.ba_correct},
                    {"n_eval_clean", r.metrics.n_eval_clean},
                    {"asr_hits", r.metrics.asr_hits},
                    {"n_eval_triggered", r.metrics.n_eval_triggered},
                    {"eval_fingerprint", r.metrics.eval_fingerprint}});
  }
  j["results"] = std::move(list);
  return j;
}

void emit_report(std::span<const ResultRow> rows, const std::filesystem::path& path,
                 ReportFormat format, const json& meta) {
  require(!rows.empty(), "report: no results to write");
  if (format == ReportFormat::Csv) {
    write_file_atomic(path, format_csv(rows));
  } else {
    write_file_atomic(path, summary_json(rows, meta).dump(2) + "\n");
  }
}

}  // namespace padback
