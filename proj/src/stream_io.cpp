#include "streamfdr/stream_io.hpp"

#include "streamfdr/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace streamfdr {

using nlohmann::ordered_json;

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

bool valid_p(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

std::vector<PValueRecord> read_stream(std::istream& in) {
    std::vector<PValueRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto where = "line " + std::to_string(line_no) + ": ";
        ordered_json obj;
        try {
            obj = ordered_json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(ErrorKind::input, where + "not valid JSON (" + e.what() + ")");
        }
        if (!obj.is_object()) throw Error(ErrorKind::input, where + "expected a JSON object");
        if (!obj.contains("t") || !obj["t"].is_number_unsigned()) {
            throw Error(ErrorKind::input, where + "missing or non-positive integer key 't'");
        }
        if (!obj.contains("p") || !obj["p"].is_number()) {
            throw Error(ErrorKind::input, where + "missing numeric key 'p'");
        }
        PValueRecord rec;
        rec.index = obj["t"].get<std::uint64_t>();
        rec.p = obj["p"].get<double>();
        if (rec.index == 0) throw Error(ErrorKind::input, where + "indices are 1-based");
        if (!valid_p(rec.p)) throw Error(ErrorKind::input, where + "p-value outside [0, 1]");
        if (obj.contains("label") && !obj["label"].is_null()) {
            if (!obj["label"].is_string()) throw Error(ErrorKind::input, where + "'label' must be a string");
            rec.label = obj["label"].get<std::string>();
        }
        if (obj.contains("batch") && !obj["batch"].is_null()) {
            if (!obj["batch"].is_number_unsigned()) {
                throw Error(ErrorKind::input, where + "'batch' must be a non-negative integer");
            }
            rec.batch = obj["batch"].get<std::uint64_t>();
        }
        records.push_back(std::move(rec));
    }
    return records;
}

namespace {

// RFC 4180 fields: commas separate, double quotes enclose, "" escapes.
std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(trim(field));
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(trim(field));
    return fields;
}

std::optional<std::size_t> column_of(const std::vector<std::string>& header, const std::string& name) {
    if (name.empty()) return std::nullopt;
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
}

template <typename T>
bool parse_number(const std::string& text, T& value) {
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

}  // namespace

std::vector<PValueRecord> ingest_csv(std::istream& in, const CsvColumns& columns,
                                     std::uint64_t first_index) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::input, "CSV input has no header row");
    const auto header = split_csv(line);
    const auto p_col = column_of(header, columns.p);
    if (!p_col) throw Error(ErrorKind::input, "CSV header has no column '" + columns.p + "'");
    const auto label_col = column_of(header, columns.label);
    const auto batch_col = column_of(header, columns.batch);
    const auto index_col = column_of(header, columns.index);
    if (!columns.index.empty() && !index_col) {
        throw Error(ErrorKind::input, "CSV header has no column '" + columns.index + "'");
    }

    std::vector<PValueRecord> records;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++row;
        const auto where = "row " + std::to_string(row) + ": ";
        const auto fields = split_csv(line);
        if (fields.size() != header.size()) {
            throw Error(ErrorKind::input, where + "expected " + std::to_string(header.size()) +
                                              " fields, found " + std::to_string(fields.size()));
        }
        PValueRecord rec;
        if (!parse_number(fields[*p_col], rec.p)) {
            throw Error(ErrorKind::input, where + "cannot parse p-value '" + fields[*p_col] + "'");
        }
        if (!valid_p(rec.p)) {
            throw Error(ErrorKind::input, where + "p-value " + fields[*p_col] + " outside [0, 1]");
        }
        if (index_col) {
            if (!parse_number(fields[*index_col], rec.index) || rec.index == 0) {
                throw Error(ErrorKind::input, where + "cannot parse index '" + fields[*index_col] + "'");
            }
        } else {
            rec.index = first_index + row - 1;
        }
        if (label_col && !fields[*label_col].empty()) rec.label = fields[*label_col];
        if (batch_col && !fields[*batch_col].empty()) {
            std::uint64_t batch = 0;
            if (!parse_number(fields[*batch_col], batch)) {
                throw Error(ErrorKind::input, where + "cannot parse batch '" + fields[*batch_col] + "'");
            }
            rec.batch = batch;
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<PValueRecord> ingest_csv(const std::filesystem::path& path, const CsvColumns& columns,
                                     std::uint64_t first_index) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
    return ingest_csv(in, columns, first_index);
}

std::vector<LogEntry> run_stream(Engine& engine, std::span<const PValueRecord> records) {
    std::uint64_t expected = engine.t() + 1;
    for (const auto& rec : records) {
        if (rec.index != expected) {
            throw Error(ErrorKind::sequencing, "expected index " + std::to_string(expected) + ", got " +
                                                   std::to_string(rec.index));
        }
        if (!valid_p(rec.p)) {
            throw Error(ErrorKind::input, "p-value at index " + std::to_string(rec.index) + " outside [0, 1]");
        }
        ++expected;
    }

    std::vector<LogEntry> log;
    log.reserve(records.size());
    const bool wealth = engine.procedure().tracks_wealth();
    for (const auto& rec : records) {
        engine.next_level();
        LogEntry entry;
        entry.decision = engine.feed(rec);
        entry.p = rec.p;
        entry.label = rec.label;
        entry.batch = rec.batch;
        if (wealth) entry.wealth = engine.state().ledger.wealth();
        log.push_back(std::move(entry));
    }
    return log;
}

std::string format_log_line(const LogEntry& entry) {
    ordered_json obj;
    obj["t"] = entry.decision.index;
    if (entry.label) obj["label"] = *entry.label;
    if (entry.batch) obj["batch"] = *entry.batch;
    obj["p"] = entry.p;
    obj["alpha"] = entry.decision.alpha;
    obj["rejected"] = entry.decision.rejected;
    if (entry.wealth) obj["wealth"] = *entry.wealth;
    return obj.dump();
}

void write_log(std::ostream& out, std::span<const LogEntry> log) {
    for (const auto& entry : log) out << format_log_line(entry) << '\n';
}

}  // namespace streamfdr
