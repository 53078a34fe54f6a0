#pragma once

#include <string>

#include "json.hpp"
#include "katok/pipeline.hpp"

namespace katok {

// Canonical JSON form of a report. Timings are deliberately excluded so that
// two runs with the same config and seed serialize byte-identically.
nlohmann::json report_to_json(const RunReport& report);

void write_report_json(const RunReport& report, const std::string& path);

// CSV tables under `dir`: separated.csv, symbols.csv, traced.csv,
// buckets.csv, dropped.csv, ledger.csv, pressure.csv, selections.csv,
// stages.csv. Empty tables keep their header line.
void write_report_csv(const RunReport& report, const std::string& dir);

// key=value per line, '#' comments, list values comma-separated, system
// parameters as params.<name>; unknown keys are errors.
PipelineConfig parse_config_text(const std::string& text);
PipelineConfig load_config(const std::string& path);

// The documented schema: one line per key with its default and meaning.
std::string config_schema();

}  // namespace katok
