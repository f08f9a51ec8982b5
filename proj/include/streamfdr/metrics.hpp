#pragma once

#include "streamfdr/core.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace streamfdr {

struct GroundTruth {
    std::vector<bool> is_null;
};

// Realized error quantities of a single stream.
struct MetricsReport {
    std::size_t rejections = 0;        // R(T)
    std::size_t false_rejections = 0;  // V(T)
    std::size_t non_nulls = 0;
    double fdp = 0.0;      // V / (R v 1)
    double sup_fdp = 0.0;  // max over t of FDP(t)
    double power = 0.0;    // true rejections / (non-nulls v 1)
};

// Monte Carlo estimates over replicates. *_se are standard errors of the mean.
struct AggregateReport {
    std::size_t replicates = 0;
    double epsilon = 0.0;
    double fdr = 0.0;
    double fdr_se = 0.0;
    double mfdr = 0.0;  // mean(V) / mean(R v 1)
    double fdx = 0.0;   // Pr[sup_t FDP(t) >= epsilon]
    double fdx_se = 0.0;
    double fwer = 0.0;  // Pr[V >= 1]
    double fwer_se = 0.0;
    double power = 0.0;
    double power_se = 0.0;
    double mean_rejections = 0.0;
    double mean_rejections_se = 0.0;
};

MetricsReport score_stream(std::span<const DecisionRecord> decisions, const GroundTruth& truth);
MetricsReport score_rejections(const std::vector<bool>& rejected, const GroundTruth& truth);

AggregateReport aggregate(std::span<const MetricsReport> reports, double epsilon);

// Offline Benjamini-Hochberg step-up. Returns rejected positions (0-based,
// ascending). Rejects every p <= p_(k) for the largest k with p_(k) <= k alpha / n.
std::vector<std::size_t> bh_offline(std::span<const double> pvalues, double alpha);

}  // namespace streamfdr
