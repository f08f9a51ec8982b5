#include "streamfdr/metrics.hpp"

#include "streamfdr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace streamfdr {

MetricsReport score_rejections(const std::vector<bool>& rejected, const GroundTruth& truth) {
    if (rejected.size() != truth.is_null.size()) {
        throw Error(ErrorKind::input, "decision and ground-truth lengths differ (" +
                                          std::to_string(rejected.size()) + " vs " +
                                          std::to_string(truth.is_null.size()) + ")");
    }
    MetricsReport report;
    for (std::size_t i = 0; i < rejected.size(); ++i) {
        const bool null = truth.is_null[i];
        if (!null) ++report.non_nulls;
        if (rejected[i]) {
            ++report.rejections;
            if (null) ++report.false_rejections;
            const double fdp = static_cast<double>(report.false_rejections) /
                               static_cast<double>(report.rejections);
            report.sup_fdp = std::max(report.sup_fdp, fdp);
        }
    }
    const auto r = static_cast<double>(std::max<std::size_t>(report.rejections, 1));
    report.fdp = static_cast<double>(report.false_rejections) / r;
    const auto true_rejections = report.rejections - report.false_rejections;
    report.power = static_cast<double>(true_rejections) /
                   static_cast<double>(std::max<std::size_t>(report.non_nulls, 1));
    return report;
}

MetricsReport score_stream(std::span<const DecisionRecord> decisions, const GroundTruth& truth) {
    std::vector<bool> rejected(decisions.size());
    for (std::size_t i = 0; i < decisions.size(); ++i) rejected[i] = decisions[i].rejected;
    return score_rejections(rejected, truth);
}

namespace {

struct MeanSe {
    double mean;
    double se;
};

template <typename F>
MeanSe mean_se(std::span<const MetricsReport> reports, F value) {
    const auto n = static_cast<double>(reports.size());
    double sum = 0.0;
    for (const auto& r : reports) sum += value(r);
    const double mean = sum / n;
    if (reports.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (const auto& r : reports) {
        const double d = value(r) - mean;
        ss += d * d;
    }
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

AggregateReport aggregate(std::span<const MetricsReport> reports, double epsilon) {
    if (reports.empty()) throw Error(ErrorKind::input, "cannot aggregate zero replicates");

    AggregateReport out;
    out.replicates = reports.size();
    out.epsilon = epsilon;

    const auto fdr = mean_se(reports, [](const MetricsReport& r) { return r.fdp; });
    const auto power = mean_se(reports, [](const MetricsReport& r) { return r.power; });
    const auto fwer = mean_se(reports, [](const MetricsReport& r) { return r.false_rejections >= 1 ? 1.0 : 0.0; });
    const auto fdx = mean_se(reports, [&](const MetricsReport& r) { return r.sup_fdp >= epsilon ? 1.0 : 0.0; });
    const auto rej = mean_se(reports, [](const MetricsReport& r) { return static_cast<double>(r.rejections); });
    const auto v = mean_se(reports, [](const MetricsReport& r) { return static_cast<double>(r.false_rejections); });
    const auto r_or_one = mean_se(reports, [](const MetricsReport& r) {
        return static_cast<double>(std::max<std::size_t>(r.rejections, 1));
    });

    out.fdr = fdr.mean;
    out.fdr_se = fdr.se;
    out.power = power.mean;
    out.power_se = power.se;
    out.fwer = fwer.mean;
    out.fwer_se = fwer.se;
    out.fdx = fdx.mean;
    out.fdx_se = fdx.se;
    out.mean_rejections = rej.mean;
    out.mean_rejections_se = rej.se;
    out.mfdr = v.mean / r_or_one.mean;
    return out;
}

std::vector<std::size_t> bh_offline(std::span<const double> pvalues, double alpha) {
    const std::size_t n = pvalues.size();
    std::vector<double> sorted(pvalues.begin(), pvalues.end());
    std::sort(sorted.begin(), sorted.end());

    std::size_t k = 0;
    for (std::size_t i = n; i >= 1; --i) {
        if (sorted[i - 1] <= static_cast<double>(i) * alpha / static_cast<double>(n)) {
            k = i;
            break;
        }
    }
    std::vector<std::size_t> rejected;
    if (k == 0) return rejected;
    const double threshold = sorted[k - 1];
    for (std::size_t i = 0; i < n; ++i) {
        if (pvalues[i] <= threshold) rejected.push_back(i);
    }
    return rejected;
}

}  // namespace streamfdr
