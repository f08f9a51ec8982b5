#pragma once

#include "streamfdr/core.hpp"
#include "streamfdr/report.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace streamfdr {

// Seven arms of the STAMPEDE platform trial in processing order
// (alphabetical within batch): B C E | D F | G | H.
std::vector<PValueRecord> stampede_fixture();

// Reference outcome per procedure: rejected arms and alpha_8.
const std::vector<SummaryRow>& stampede_reference();

struct StampedeSettings {
    double alpha = 0.05;
    std::uint64_t horizon = 20;        // M
    std::map<std::string, double> w0;  // per procedure; missing entries use defaults
};

// Bounded variants used for the case study: alpha-spending with 1/M, and
// LORD, SAFFRON, ADDIS with their default gamma truncated at M and
// renormalized.
ProcedureConfig stampede_config(const std::string& procedure, const StampedeSettings& settings);

// Rows in the order uncorrected, alpha-spending, bh, addis, saffron, lord.
std::vector<SummaryRow> run_stampede(const StampedeSettings& settings,
                                     const std::vector<PValueRecord>& records = stampede_fixture());

struct CalibrationEntry {
    std::string procedure;
    std::vector<double> grid;
    std::optional<double> matched_w0;  // first grid point matching rejections and alpha_8
    double best_w0 = 0.0;              // closest alpha_8 among grid points with matching rejections
    double best_level = 0.0;
    double reference_level = 0.0;
    bool rejections_match = false;
};

// Grid search over {alpha/10, alpha/4, alpha/2} for lord, saffron, addis.
std::vector<CalibrationEntry> calibrate_w0(double alpha = 0.05, std::uint64_t horizon = 20);

std::string calibration_manifest(const std::vector<CalibrationEntry>& entries, double alpha,
                                 std::uint64_t horizon);
StampedeSettings load_manifest(const std::filesystem::path& path);

// alpha_8 rounded to 4 dp as printed.
std::string four_dp(double value);

}  // namespace streamfdr
