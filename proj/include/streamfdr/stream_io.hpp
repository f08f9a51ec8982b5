#pragma once

#include "streamfdr/core.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace streamfdr {

// Newline-delimited JSON, one object per line:
//   {"t": 1, "p": 0.45, "label": "B", "batch": 1}
// `t` and `p` are required; other keys are ignored, so a decision log can be
// replayed as input. Blank lines are skipped. Errors name the line number.
std::vector<PValueRecord> read_stream(std::istream& in);

struct CsvColumns {
    std::string p = "p";
    std::string label = "label";
    std::string batch = "batch";
    std::string index;  // empty: rows are numbered from first_index
};

// Header row required; records keep file order. Errors name the data row
// (1-based, header excluded).
std::vector<PValueRecord> ingest_csv(std::istream& in, const CsvColumns& columns = {},
                                     std::uint64_t first_index = 1);
std::vector<PValueRecord> ingest_csv(const std::filesystem::path& path, const CsvColumns& columns = {},
                                     std::uint64_t first_index = 1);

struct LogEntry {
    DecisionRecord decision;
    double p = 0.0;
    std::optional<std::string> label;
    std::optional<std::uint64_t> batch;
    std::optional<double> wealth;
};

// Validates every record (contiguous indices from engine.t() + 1, p in
// [0, 1]) before touching the engine, then processes them in order.
std::vector<LogEntry> run_stream(Engine& engine, std::span<const PValueRecord> records);

std::string format_log_line(const LogEntry& entry);
void write_log(std::ostream& out, std::span<const LogEntry> log);

}  // namespace streamfdr
