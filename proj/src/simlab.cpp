#include "streamfdr/simlab.hpp"

#include "streamfdr/errors.hpp"
#include "streamfdr/procedures.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <numeric>
#include <thread>

namespace streamfdr {

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Slots per time step.
constexpr std::uint32_t kSlotMixture = 0;
constexpr std::uint32_t kSlotMean = 2;
constexpr std::uint32_t kSlotNoise = 4;

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t replicate)
    : key_(splitmix64(splitmix64(seed) ^ (replicate * 0xd1342543de82ef95ULL + 1))) {}

double CounterRng::uniform(std::uint64_t t, std::uint32_t slot) const {
    const std::uint64_t bits = splitmix64(key_ ^ splitmix64(t * 8 + slot));
    // 53 random bits, shifted off zero.
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t t, std::uint32_t slot) const {
    const double u1 = uniform(t, slot);
    const double u2 = uniform(t, slot + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double normal_upper_tail(double z) {
    const double p = 0.5 * std::erfc(z / std::numbers::sqrt2);
    return std::clamp(p, 0.0, 1.0);
}

void validate(const SimConfig& c) {
    if (!(c.pi1 >= 0.0 && c.pi1 <= 1.0)) throw Error(ErrorKind::parameter, "pi1 must lie in [0, 1]");
    if (!(c.null_means.sd >= 0.0) || !(c.alt_means.sd >= 0.0)) {
        throw Error(ErrorKind::parameter, "mean distributions need sd >= 0");
    }
    if (c.horizon < 1) throw Error(ErrorKind::parameter, "horizon must be >= 1");
    if (c.replicates < 1) throw Error(ErrorKind::parameter, "replicates must be >= 1");
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw Error(ErrorKind::parameter, "alpha must lie in (0, 1)");
}

StreamSample gaussian_stream(const SimConfig& config, std::uint64_t replicate) {
    const CounterRng rng(config.seed, replicate);
    StreamSample sample;
    sample.z.resize(config.horizon);
    sample.p.resize(config.horizon);
    sample.truth.is_null.resize(config.horizon);
    for (std::uint64_t t = 1; t <= config.horizon; ++t) {
        const bool non_null = rng.uniform(t, kSlotMixture) < config.pi1;
        const MeanSpec& spec = non_null ? config.alt_means : config.null_means;
        const double mu = spec.sd > 0.0 ? spec.mean + spec.sd * rng.normal(t, kSlotMean) : spec.mean;
        const double z = mu + rng.normal(t, kSlotNoise);
        sample.z[t - 1] = z;
        sample.p[t - 1] = normal_upper_tail(z);
        sample.truth.is_null[t - 1] = !non_null;
    }
    return sample;
}

Ordering parse_ordering(const std::string& text) {
    if (text == "favourable" || text == "favorable") return Ordering::favourable;
    if (text == "adversarial") return Ordering::adversarial;
    if (text == "shuffled") return Ordering::shuffled;
    throw Error(ErrorKind::parameter, "unknown ordering '" + text + "'");
}

StreamSample ordering_scenario(const StreamSample& sample, Ordering mode, std::uint64_t seed) {
    const std::size_t n = sample.p.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    const auto& is_null = sample.truth.is_null;

    if (mode == Ordering::shuffled) {
        const CounterRng rng(seed, 0);
        for (std::size_t i = n; i > 1; --i) {
            const auto j = static_cast<std::size_t>(rng.uniform(i, 0) * static_cast<double>(i));
            std::swap(order[i - 1], order[std::min(j, i - 1)]);
        }
    } else {
        std::vector<std::size_t> nulls;
        std::vector<std::size_t> signals;
        for (std::size_t i = 0; i < n; ++i) (is_null[i] ? nulls : signals).push_back(i);
        const auto by_p = [&](std::size_t a, std::size_t b) { return sample.p[a] < sample.p[b]; };
        std::stable_sort(signals.begin(), signals.end(), by_p);
        order.clear();
        if (mode == Ordering::favourable) {
            order.insert(order.end(), signals.begin(), signals.end());
            order.insert(order.end(), nulls.begin(), nulls.end());
        } else {
            order.insert(order.end(), nulls.begin(), nulls.end());
            order.insert(order.end(), signals.rbegin(), signals.rend());
        }
    }

    StreamSample out;
    out.z.reserve(n);
    out.p.reserve(n);
    out.truth.is_null.reserve(n);
    for (std::size_t i : order) {
        out.z.push_back(sample.z[i]);
        out.p.push_back(sample.p[i]);
        out.truth.is_null.push_back(is_null[i]);
    }
    return out;
}

std::vector<ProcedureConfig> default_roster(double alpha) {
    std::vector<ProcedureConfig> roster;
    for (const char* name : {"uncorrected", "alpha-spending", "lord", "saffron", "addis", "bh"}) {
        ProcedureConfig config;
        config.name = name;
        config.alpha = alpha;
        roster.push_back(config);
    }
    return roster;
}

namespace {

constexpr std::size_t kBlock = 64;

struct BlockResult {
    // [procedure][replicate within block]
    std::vector<std::vector<MetricsReport>> reports;
    // [procedure][t]
    std::vector<std::vector<double>> level_sums;
};

}  // namespace

std::vector<ExperimentCell> run_experiment(const ExperimentGrid& grid) {
    if (grid.roster.empty()) throw Error(ErrorKind::parameter, "experiment roster is empty");
    validate(grid.base);

    // Procedures are built once and shared by every replicate.
    std::vector<std::shared_ptr<const Procedure>> procedures;
    for (const auto& entry : grid.roster) {
        procedures.push_back(entry.name == "bh" ? nullptr : make_procedure(entry));
    }
    const std::size_t n_proc = procedures.size();
    const std::uint64_t horizon = grid.base.horizon;

    std::vector<ExperimentCell> cells;
    for (double pi1 : grid.pi1_values) {
        SimConfig config = grid.base;
        config.pi1 = pi1;
        validate(config);

        const std::size_t n_blocks = (config.replicates + kBlock - 1) / kBlock;
        std::vector<BlockResult> blocks(n_blocks);
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;

        auto run_block = [&](std::size_t b) {
            BlockResult& block = blocks[b];
            block.reports.assign(n_proc, {});
            if (grid.trajectories) block.level_sums.assign(n_proc, std::vector<double>(horizon, 0.0));
            const std::size_t first = b * kBlock;
            const std::size_t last = std::min(first + kBlock, config.replicates);
            std::vector<bool> rejected(horizon);
            for (std::size_t rep = first; rep < last; ++rep) {
                StreamSample sample = gaussian_stream(config, rep);
                if (grid.ordering) sample = ordering_scenario(sample, *grid.ordering, config.seed ^ rep);
                for (std::size_t k = 0; k < n_proc; ++k) {
                    if (!procedures[k]) {
                        std::fill(rejected.begin(), rejected.end(), false);
                        for (std::size_t i : bh_offline(sample.p, grid.roster[k].alpha)) rejected[i] = true;
                    } else {
                        Engine engine(procedures[k]);
                        for (std::uint64_t t = 0; t < horizon; ++t) {
                            const auto decision = engine.step(sample.p[t]);
                            rejected[t] = decision.rejected;
                            if (grid.trajectories) block.level_sums[k][t] += decision.alpha;
                        }
                    }
                    block.reports[k].push_back(score_rejections(rejected, sample.truth));
                }
            }
        };
        auto worker = [&] {
            try {
                for (std::size_t b = next++; b < n_blocks; b = next++) run_block(b);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = n_blocks;
            }
        };

        unsigned threads = grid.threads ? grid.threads : std::max(1u, std::thread::hardware_concurrency());
        threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_blocks));
        {
            std::vector<std::jthread> pool;
            for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
            worker();
        }
        if (failure) std::rethrow_exception(failure);

        // Deterministic fold in replicate order.
        for (std::size_t k = 0; k < n_proc; ++k) {
            std::vector<MetricsReport> reports;
            reports.reserve(config.replicates);
            std::vector<double> levels;
            if (grid.trajectories && procedures[k]) levels.assign(horizon, 0.0);
            for (const auto& block : blocks) {
                reports.insert(reports.end(), block.reports[k].begin(), block.reports[k].end());
                if (!levels.empty()) {
                    for (std::uint64_t t = 0; t < horizon; ++t) levels[t] += block.level_sums[k][t];
                }
            }
            for (auto& v : levels) v /= static_cast<double>(config.replicates);
            cells.push_back({pi1, grid.roster[k].name, aggregate(reports, grid.epsilon), std::move(levels)});
        }
    }
    return cells;
}

}  // namespace streamfdr
