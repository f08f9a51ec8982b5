#include "streamfdr/errors.hpp"
#include "streamfdr/simlab.hpp"

#include <boost/math/distributions/normal.hpp>
#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace streamfdr;

TEST_CASE("upper tail against an independent normal CDF") {
    const boost::math::normal_distribution<double> n01;
    CHECK(normal_upper_tail(3.0) == doctest::Approx(0.001350).epsilon(1e-3));
    for (double z = -8.0; z <= 8.0; z += 0.125) {
        CAPTURE(z);
        CHECK(normal_upper_tail(z) == doctest::Approx(boost::math::cdf(boost::math::complement(n01, z))).epsilon(1e-12));
    }
    CHECK(normal_upper_tail(-40.0) == 1.0);
    CHECK(normal_upper_tail(40.0) >= 0.0);
}

TEST_CASE("null p-values are uniform") {
    // Null z-scores are standard normal when the null mean is a point mass at 0.
    SimConfig cfg;
    cfg.horizon = 100000;
    cfg.pi1 = 0.0;
    cfg.null_means = {0.0, 0.0};
    auto p = gaussian_stream(cfg, 0).p;
    std::sort(p.begin(), p.end());
    const double n = static_cast<double>(p.size());
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max({d, p[i] - lo, hi - p[i]});
    }
    // 1% critical value of the Kolmogorov-Smirnov statistic.
    CHECK(d < 1.628 / std::sqrt(n));
}

TEST_CASE("streams are reproducible and replicates differ") {
    SimConfig cfg;
    cfg.horizon = 500;
    const auto a = gaussian_stream(cfg, 7);
    const auto b = gaussian_stream(cfg, 7);
    CHECK(a.p == b.p);
    CHECK(a.truth.is_null == b.truth.is_null);
    CHECK(gaussian_stream(cfg, 8).p != a.p);
    cfg.seed += 1;
    CHECK(gaussian_stream(cfg, 7).p != a.p);
}

TEST_CASE("mixture proportion") {
    SimConfig cfg;
    cfg.horizon = 50000;
    cfg.pi1 = 0.3;
    const auto s = gaussian_stream(cfg, 0);
    const double non_null = static_cast<double>(std::count(s.truth.is_null.begin(), s.truth.is_null.end(), false));
    const double n = static_cast<double>(cfg.horizon);
    CHECK(std::abs(non_null / n - 0.3) <= 3.0 * std::sqrt(0.3 * 0.7 / n));

    cfg.pi1 = 0.0;
    const auto nulls = gaussian_stream(cfg, 0);
    CHECK(std::all_of(nulls.truth.is_null.begin(), nulls.truth.is_null.end(), [](bool b) { return b; }));
}

TEST_CASE("configuration errors") {
    SimConfig cfg;
    cfg.pi1 = 1.5;
    CHECK_THROWS_AS(validate(cfg), Error);
    cfg = {};
    cfg.horizon = 0;
    CHECK_THROWS_AS(validate(cfg), Error);
    cfg = {};
    cfg.alt_means.sd = -1.0;
    CHECK_THROWS_AS(validate(cfg), Error);
    CHECK_THROWS_AS(parse_ordering("sorted"), Error);
}

TEST_CASE("ordering scenarios") {
    StreamSample s;
    s.p = {0.3, 0.01, 0.5, 0.002, 0.9};
    s.z = {0, 0, 0, 0, 0};
    s.truth.is_null = {true, false, true, false, true};
    const auto fav = ordering_scenario(s, Ordering::favourable, 1);
    CHECK(fav.p == std::vector<double>{0.002, 0.01, 0.3, 0.5, 0.9});
    CHECK(fav.truth.is_null == std::vector<bool>{false, false, true, true, true});
    const auto adv = ordering_scenario(s, Ordering::adversarial, 1);
    CHECK(adv.p == std::vector<double>{0.3, 0.5, 0.9, 0.01, 0.002});
    CHECK(adv.truth.is_null == std::vector<bool>{true, true, true, false, false});
    auto sh = ordering_scenario(s, Ordering::shuffled, 1);
    CHECK(sh.p == ordering_scenario(s, Ordering::shuffled, 1).p);
    std::sort(sh.p.begin(), sh.p.end());
    CHECK(sh.p == std::vector<double>{0.002, 0.01, 0.3, 0.5, 0.9});
}

TEST_CASE("all-null grid has zero power") {
    ExperimentGrid grid;
    grid.base.replicates = 50;
    grid.base.horizon = 200;
    grid.pi1_values = {0.0};
    grid.roster = default_roster(0.05);
    for (const auto& cell : run_experiment(grid)) {
        CAPTURE(cell.procedure);
        CHECK(cell.metrics.power == 0.0);
        CHECK(cell.metrics.fdr == doctest::Approx(cell.metrics.fwer));
    }
}

TEST_CASE("LORD++ gains from favourable ordering") {
    ExperimentGrid grid;
    grid.base.replicates = 300;
    grid.pi1_values = {0.1};
    ProcedureConfig lord;
    lord.name = "lord";
    grid.roster = {lord};
    grid.ordering = Ordering::favourable;
    const auto fav = run_experiment(grid).at(0).metrics;
    grid.ordering = Ordering::adversarial;
    const auto adv = run_experiment(grid).at(0).metrics;
    CHECK(fav.power - adv.power > 2.0 * std::hypot(fav.power_se, adv.power_se));
}

TEST_CASE("results do not depend on the thread count") {
    ExperimentGrid grid;
    grid.base.replicates = 200;
    grid.base.horizon = 300;
    grid.pi1_values = {0.05, 0.5};
    grid.roster = default_roster(0.05);
    grid.trajectories = true;
    grid.threads = 1;
    const auto one = run_experiment(grid);
    grid.threads = 4;
    const auto four = run_experiment(grid);
    REQUIRE(one.size() == four.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].procedure == four[i].procedure);
        CHECK(one[i].metrics.fdr == four[i].metrics.fdr);
        CHECK(one[i].metrics.power == four[i].metrics.power);
        CHECK(one[i].metrics.fdx == four[i].metrics.fdx);
        CHECK(one[i].mean_levels == four[i].mean_levels);
    }
}
