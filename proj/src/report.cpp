#include "streamfdr/report.hpp"

#include "streamfdr/errors.hpp"
#include "streamfdr/snapshot.hpp"

#include <charconv>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace streamfdr {

std::string format_real(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

void write_decision_csv(std::ostream& out, std::span<const LogEntry> log) {
    out << "t,label,p,alpha,rejected,wealth\n";
    for (const auto& e : log) {
        out << e.decision.index << ',' << csv_field(e.label.value_or("")) << ',' << format_real(e.p) << ','
            << format_real(e.decision.alpha) << ',' << (e.decision.rejected ? 1 : 0) << ','
            << (e.wealth ? format_real(*e.wealth) : "") << '\n';
    }
}

void write_summary_text(std::ostream& out, std::span<const SummaryRow> rows) {
    out << std::left << std::setw(16) << "Algorithm" << "| " << std::setw(12) << "Rejections" << "| alpha_next\n";
    out << std::string(16, '-') << "+-" << std::string(12, '-') << "+-" << std::string(10, '-') << '\n';
    for (const auto& row : rows) {
        std::string rejected;
        for (const auto& label : row.rejections) rejected += (rejected.empty() ? "" : ", ") + label;
        if (rejected.empty()) rejected = "--";
        char level[32] = "--";
        if (row.next_level) std::snprintf(level, sizeof level, "%.4f", *row.next_level);
        out << std::setw(16) << row.procedure << "| " << std::setw(12) << rejected << "| " << level << '\n';
    }
}

void write_experiment_csv(std::ostream& out, std::span<const ExperimentCell> cells) {
    out << "pi1,procedure,metric,value,mc_se\n";
    for (const auto& c : cells) {
        const auto& m = c.metrics;
        const auto row = [&](const char* metric, double value, std::optional<double> se) {
            out << format_real(c.pi1) << ',' << c.procedure << ',' << metric << ',' << format_real(value) << ','
                << (se ? format_real(*se) : "") << '\n';
        };
        row("fdr", m.fdr, m.fdr_se);
        row("mfdr", m.mfdr, std::nullopt);
        row("fdx", m.fdx, m.fdx_se);
        row("fwer", m.fwer, m.fwer_se);
        row("power", m.power, m.power_se);
        row("mean_rejections", m.mean_rejections, m.mean_rejections_se);
    }
}

void write_metrics_csv(std::ostream& out, std::span<const ExperimentCell> cells) {
    out << "procedure,pi1,fdr,mfdr,fdx,fwer,power,mean_rejections\n";
    for (const auto& c : cells) {
        const auto& m = c.metrics;
        out << c.procedure << ',' << format_real(c.pi1) << ',' << format_real(m.fdr) << ',' << format_real(m.mfdr)
            << ',' << format_real(m.fdx) << ',' << format_real(m.fwer) << ',' << format_real(m.power) << ','
            << format_real(m.mean_rejections) << '\n';
    }
}

void write_trajectory_csv(std::ostream& out, std::span<const ExperimentCell> cells) {
    out << "pi1,procedure,t,mean_alpha\n";
    for (const auto& c : cells) {
        for (std::size_t t = 0; t < c.mean_levels.size(); ++t) {
            out << format_real(c.pi1) << ',' << c.procedure << ',' << t + 1 << ',' << format_real(c.mean_levels[t])
                << '\n';
        }
    }
}

void emit_to_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& render) {
    std::ostringstream buf;
    render(buf);
    write_file_atomic(path, buf.str());
}

}  // namespace streamfdr
