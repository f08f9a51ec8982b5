#pragma once

#include "streamfdr/gamma.hpp"
#include "streamfdr/wealth.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace streamfdr {

// One hypothesis in the stream. Indices are 1-based and contiguous.
struct PValueRecord {
    std::uint64_t index = 0;
    double p = 0.0;
    std::optional<std::string> label;
    std::optional<std::uint64_t> batch;
};

// R_t = 1 iff p <= alpha_t (ties reject).
struct DecisionRecord {
    std::uint64_t index = 0;
    double alpha = 0.0;
    bool rejected = false;

    bool operator==(const DecisionRecord&) const = default;
};

struct StreamSummary {
    std::uint64_t t = 0;                       // steps processed
    std::vector<std::uint64_t> rejection_times;  // tau_1 < tau_2 < ...

    std::size_t rejections() const { return rejection_times.size(); }
};

// C_i = 1{P_i <= lambda}. `through_rejection[j]` is the candidate count over
// indices 1..tau_{j+1}, so C_{j+}(t) = total - through_rejection[j-1].
struct CandidateCounts {
    std::uint64_t total = 0;
    std::vector<std::uint64_t> through_rejection;
};

// S_i = 1{P_i <= eta}. `rejection_ranks[j]` is tau*_{j+1}.
struct SelectionCounts {
    std::uint64_t total = 0;
    std::vector<std::uint64_t> rejection_ranks;
};

// User-facing configuration; unset fields take the procedure's defaults.
struct ProcedureConfig {
    std::string name;
    double alpha = 0.05;
    std::optional<double> w0;
    std::optional<double> lambda;
    std::optional<double> eta;
    std::string gamma = "auto";
    // Set when the sequence is built programmatically rather than from
    // `gamma`; its origin must match the procedure's convention.
    std::optional<GammaSequence> gamma_sequence;
};

// Fully resolved parameters of a constructed procedure.
struct ProcedureParams {
    std::string name;
    double alpha = 0.05;
    double w0 = 0.0;
    double lambda = 1.0;  // 1 disables candidate screening
    double eta = 1.0;     // 1 disables discarding
    GammaSequence gamma = GammaSequence::constant_bounded(1);
};

// Evolving state shared by every procedure.
struct ProcedureState {
    StreamSummary summary;
    CandidateCounts candidates;
    SelectionCounts selection;
    WealthLedger ledger;
    double level_sum = 0.0;  // sum of alpha_j over processed steps
    std::optional<double> pending_level;
};

// A level-assignment rule. Procedures are stateless policies over a
// ProcedureState; a single instance may back many engines.
class Procedure {
public:
    explicit Procedure(ProcedureParams params) : params_(std::move(params)) {}
    virtual ~Procedure() = default;

    // alpha_t for t = state.summary.t + 1, from past decisions only.
    virtual double level(const ProcedureState& state) const = 0;
    // Whether the wealth column is meaningful for this procedure.
    virtual bool tracks_wealth() const { return true; }

    ProcedureState initial_state() const;
    // Advances counters and wealth after the decision at t = summary.t + 1.
    void settle(ProcedureState& state, double p, double level, bool rejected) const;

    const ProcedureParams& params() const { return params_; }
    const std::string& name() const { return params_.name; }

protected:
    virtual void charge(WealthLedger& ledger, double p, double level, bool rejected) const = 0;

private:
    ProcedureParams params_;
};

// Synchronous decision engine enforcing strict (next_level, feed)* alternation.
class Engine {
public:
    explicit Engine(std::shared_ptr<const Procedure> procedure);
    Engine(std::shared_ptr<const Procedure> procedure, ProcedureState state);

    // Registers alpha_t before P_t is seen. Throws contract error if a level
    // is already outstanding.
    double next_level();
    DecisionRecord feed(const PValueRecord& record);
    // Convenience for a bare p-value at the next index.
    DecisionRecord step(double p);
    // Level the next hypothesis would receive; no mutation.
    double preview() const;

    std::uint64_t t() const { return state_.summary.t; }
    const ProcedureState& state() const { return state_; }
    const Procedure& procedure() const { return *procedure_; }
    std::shared_ptr<const Procedure> procedure_handle() const { return procedure_; }

private:
    std::shared_ptr<const Procedure> procedure_;
    ProcedureState state_;
};

}  // namespace streamfdr
