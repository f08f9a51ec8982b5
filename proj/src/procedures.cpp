#include "streamfdr/procedures.hpp"

#include "streamfdr/errors.hpp"

#include <algorithm>
#include <cmath>

namespace streamfdr {

namespace {

using Index = std::int64_t;

Index as_index(std::uint64_t v) { return static_cast<Index>(v); }

}  // namespace

double alpha_spending_level(std::uint64_t t, double alpha, const GammaSequence& gamma) {
    return alpha * gamma.at(as_index(t));
}

double lord_level(std::uint64_t t, double alpha, double w0, const GammaSequence& gamma,
                  const StreamSummary& history) {
    const Index now = as_index(t);
    double level = w0 * gamma.at(now);
    for (std::size_t j = 0; j < history.rejection_times.size(); ++j) {
        const Index tau = as_index(history.rejection_times[j]);
        if (tau >= now) break;
        level += (j == 0 ? alpha - w0 : alpha) * gamma.at(now - tau);
    }
    return level;
}

double saffron_level(std::uint64_t t, double alpha, double w0, double lambda,
                     const GammaSequence& gamma, const StreamSummary& history,
                     const CandidateCounts& candidates) {
    const Index now = as_index(t);
    const Index c_total = as_index(candidates.total);
    double sum = w0 * gamma.at(now - c_total);
    for (std::size_t j = 0; j < history.rejection_times.size(); ++j) {
        const Index tau = as_index(history.rejection_times[j]);
        if (tau >= now) break;
        const Index c_after = c_total - as_index(candidates.through_rejection[j]);
        sum += (j == 0 ? alpha - w0 : alpha) * gamma.at(now - tau - c_after);
    }
    return std::min(lambda, (1.0 - lambda) * sum);
}

double addis_level(std::uint64_t t, double alpha, double w0, double lambda, double eta,
                   const GammaSequence& gamma, const StreamSummary& history,
                   const CandidateCounts& candidates, const SelectionCounts& selection) {
    const Index now = as_index(t);
    const Index selected = as_index(selection.total);
    const Index c_total = as_index(candidates.total);
    double sum = w0 * gamma.at(selected - c_total);
    for (std::size_t j = 0; j < history.rejection_times.size(); ++j) {
        if (as_index(history.rejection_times[j]) >= now) break;
        const Index rank = as_index(selection.rejection_ranks[j]);
        const Index c_after = c_total - as_index(candidates.through_rejection[j]);
        sum += (j == 0 ? alpha - w0 : alpha) * gamma.at(selected - rank - c_after);
    }
    return std::min(lambda, (eta - lambda) * sum);
}

void gai_step(WealthLedger& ledger, double level, double penalty, double payout, bool rejected) {
    ledger.step(level, penalty, payout, rejected);
}

namespace {

class Uncorrected final : public Procedure {
public:
    using Procedure::Procedure;
    double level(const ProcedureState&) const override { return params().alpha; }
    bool tracks_wealth() const override { return false; }

protected:
    void charge(WealthLedger&, double, double, bool) const override {}
};

// Bonferroni-style spending of the full budget: phi_t = alpha_t, no payout.
class AlphaSpending final : public Procedure {
public:
    using Procedure::Procedure;
    double level(const ProcedureState& s) const override {
        return alpha_spending_level(s.summary.t + 1, params().alpha, params().gamma);
    }

protected:
    void charge(WealthLedger& ledger, double, double level, bool rejected) const override {
        ledger.step(level, level, 0.0, rejected);
    }
};

// Generic GAI++ rule: after each rejection the current wealth is re-anchored
// and spent along gamma, phi_t = alpha_t = W(tau_last) gamma_{t - tau_last};
// each rejection earns the maximal payout b_t.
class GaiPlusPlus final : public Procedure {
public:
    using Procedure::Procedure;
    double level(const ProcedureState& s) const override {
        const auto& times = s.summary.rejection_times;
        const std::uint64_t last = times.empty() ? 0 : times.back();
        const double level = s.ledger.anchor() * params().gamma.at(as_index(s.summary.t + 1 - last));
        return std::min(level, s.ledger.wealth());
    }

protected:
    void charge(WealthLedger& ledger, double, double level, bool rejected) const override {
        ledger.step(level, level, ledger.bound(), rejected);
    }
};

// LORD++ as a GAI++ rule: phi_t = alpha_t, psi_t = b_t.
class Lord final : public Procedure {
public:
    using Procedure::Procedure;
    double level(const ProcedureState& s) const override {
        const auto& p = params();
        return lord_level(s.summary.t + 1, p.alpha, p.w0, p.gamma, s.summary);
    }

protected:
    void charge(WealthLedger& ledger, double, double level, bool rejected) const override {
        ledger.step(level, level, ledger.bound(), rejected);
    }
};

// SAFFRON spends alpha_t / (1 - lambda) only on non-candidates and earns
// b_t per rejection; the balance is the slack in its FDP estimate.
class Saffron final : public Procedure {
public:
    using Procedure::Procedure;
    double level(const ProcedureState& s) const override {
        const auto& p = params();
        return saffron_level(s.summary.t + 1, p.alpha, p.w0, p.lambda, p.gamma, s.summary,
                             s.candidates);
    }

protected:
    void charge(WealthLedger& ledger, double pv, double level, bool rejected) const override {
        const double penalty = pv > params().lambda ? level / (1.0 - params().lambda) : 0.0;
        ledger.step_uncapped(penalty, ledger.bound(), rejected);
    }
};

// ADDIS spends alpha_t / (eta - lambda) on selected non-candidates.
class Addis final : public Procedure {
public:
    using Procedure::Procedure;
    double level(const ProcedureState& s) const override {
        const auto& p = params();
        return addis_level(s.summary.t + 1, p.alpha, p.w0, p.lambda, p.eta, p.gamma, s.summary,
                           s.candidates, s.selection);
    }

protected:
    void charge(WealthLedger& ledger, double pv, double level, bool rejected) const override {
        const auto& p = params();
        const bool spent = pv > p.lambda && pv <= p.eta;
        ledger.step_uncapped(spent ? level / (p.eta - p.lambda) : 0.0, ledger.bound(), rejected);
    }
};

void require(bool ok, const std::string& message) {
    if (!ok) throw Error(ErrorKind::parameter, message);
}

}  // namespace

const std::vector<std::string_view>& procedure_names() {
    static const std::vector<std::string_view> names{"uncorrected", "alpha-spending", "gai++",
                                                     "lord",        "saffron",        "addis"};
    return names;
}

ProcedureParams resolve_params(const ProcedureConfig& config) {
    const auto& names = procedure_names();
    require(std::find(names.begin(), names.end(), config.name) != names.end(),
            "unknown procedure '" + config.name + "'");
    require(config.alpha > 0.0 && config.alpha < 1.0, "alpha must lie in (0, 1)");

    ProcedureParams params;
    params.name = config.name;
    params.alpha = config.alpha;
    const std::string& name = config.name;
    const bool uses_w0 = name == "lord" || name == "gai++" || name == "saffron" || name == "addis";
    const bool screens = name == "saffron" || name == "addis";

    if (uses_w0) {
        const double fallback = screens ? config.alpha / 2.0 : config.alpha / 10.0;
        params.w0 = config.w0.value_or(fallback);
        require(params.w0 >= 0.0 && params.w0 <= config.alpha, "w0 must satisfy 0 <= w0 <= alpha");
    } else {
        // The spending budget is the whole of alpha.
        params.w0 = config.alpha;
    }

    if (name == "saffron") {
        params.lambda = config.lambda.value_or(0.5);
        require(params.lambda > 0.0 && params.lambda < 1.0, "lambda must lie in (0, 1)");
    } else if (name == "addis") {
        params.lambda = config.lambda.value_or(0.25);
        params.eta = config.eta.value_or(0.5);
        require(params.lambda > 0.0 && params.lambda < 1.0, "lambda must lie in (0, 1)");
        require(params.lambda < params.eta && params.eta <= 1.0, "ADDIS needs lambda < eta <= 1");
    }

    const int origin = name == "addis" ? 0 : 1;
    if (config.gamma_sequence) {
        require(config.gamma_sequence->origin() == origin,
                name + " expects a gamma sequence with origin " + std::to_string(origin));
        params.gamma = *config.gamma_sequence;
    } else if (name != "uncorrected") {
        std::string spec = config.gamma;
        if (spec == "auto") spec = screens ? "power:1.6" : "lord-default";
        params.gamma = parse_gamma(spec, origin);
    }
    return params;
}

std::shared_ptr<const Procedure> make_procedure(const ProcedureParams& params) {
    const std::string& name = params.name;
    if (name == "uncorrected") return std::make_shared<Uncorrected>(params);
    if (name == "alpha-spending") return std::make_shared<AlphaSpending>(params);
    if (name == "gai++") return std::make_shared<GaiPlusPlus>(params);
    if (name == "lord") return std::make_shared<Lord>(params);
    if (name == "saffron") return std::make_shared<Saffron>(params);
    if (name == "addis") return std::make_shared<Addis>(params);
    throw Error(ErrorKind::parameter, "unknown procedure '" + name + "'");
}

std::shared_ptr<const Procedure> make_procedure(const ProcedureConfig& config) {
    return make_procedure(resolve_params(config));
}

}  // namespace streamfdr
