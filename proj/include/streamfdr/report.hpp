#pragma once

#include "streamfdr/simlab.hpp"
#include "streamfdr/stream_io.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace streamfdr {

// Shortest decimal that round-trips the binary64 value.
std::string format_real(double value);

// t,label,p,alpha,rejected,wealth
void write_decision_csv(std::ostream& out, std::span<const LogEntry> log);

struct SummaryRow {
    std::string procedure;
    std::vector<std::string> rejections;
    std::optional<double> next_level;  // none for offline comparators
};

// Fixed-width table: procedure | rejections | next level (4 dp).
void write_summary_text(std::ostream& out, std::span<const SummaryRow> rows);

// Long form: pi1,procedure,metric,value,mc_se
void write_experiment_csv(std::ostream& out, std::span<const ExperimentCell> cells);
// Wide form: procedure,pi1,fdr,mfdr,fdx,fwer,power,mean_rejections
void write_metrics_csv(std::ostream& out, std::span<const ExperimentCell> cells);
// pi1,procedure,t,mean_alpha for cells that recorded trajectories.
void write_trajectory_csv(std::ostream& out, std::span<const ExperimentCell> cells);

// Renders into memory, then writes atomically; io error if the path is unwritable.
void emit_to_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& render);

}  // namespace streamfdr
