#pragma once

#include "streamfdr/core.hpp"
#include "streamfdr/metrics.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace streamfdr {

// Distribution of the means mu_t: a point mass when sd == 0.
struct MeanSpec {
    double mean = 0.0;
    double sd = 0.0;
};

struct SimConfig {
    std::uint64_t horizon = 1000;  // T
    double pi1 = 0.1;
    MeanSpec null_means{-0.5, 0.1};  // F0
    MeanSpec alt_means{3.0, 1.0};    // F1
    double alpha = 0.05;
    std::uint64_t seed = 20240601;
    std::size_t replicates = 2000;
};

struct StreamSample {
    std::vector<double> z;
    std::vector<double> p;  // Phi(-z)
    GroundTruth truth;
};

// Stateless counter-based generator: every draw is a pure function of
// (seed, replicate, t, slot), so replicates are independent of scheduling.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t replicate);

    // Uniform on (0, 1).
    double uniform(std::uint64_t t, std::uint32_t slot) const;
    // Standard normal via Box-Muller on slots (slot, slot + 1).
    double normal(std::uint64_t t, std::uint32_t slot) const;

private:
    std::uint64_t key_;
};

// Upper-tail standard normal probability Phi(-z), clamped to [0, 1].
double normal_upper_tail(double z);

void validate(const SimConfig& config);

StreamSample gaussian_stream(const SimConfig& config, std::uint64_t replicate);

enum class Ordering { favourable, adversarial, shuffled };

Ordering parse_ordering(const std::string& text);

// favourable: non-nulls by ascending p first, then nulls in stream order.
// adversarial: nulls in stream order first, then non-nulls by descending p.
// shuffled: uniform permutation. Labels move with their p-values.
StreamSample ordering_scenario(const StreamSample& sample, Ordering mode, std::uint64_t seed);

// A roster entry is an online procedure, or "bh" for the offline comparator.
struct ExperimentGrid {
    SimConfig base;
    std::vector<double> pi1_values{0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::vector<ProcedureConfig> roster;
    double epsilon = 0.1;
    unsigned threads = 0;  // 0: hardware concurrency
    std::optional<Ordering> ordering;
    bool trajectories = false;
};

struct ExperimentCell {
    double pi1 = 0.0;
    std::string procedure;
    AggregateReport metrics;
    std::vector<double> mean_levels;  // averaged alpha_t, when requested
};

// Default roster: uncorrected, alpha-spending, lord, saffron, addis, bh.
std::vector<ProcedureConfig> default_roster(double alpha);

std::vector<ExperimentCell> run_experiment(const ExperimentGrid& grid);

}  // namespace streamfdr
