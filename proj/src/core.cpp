#include "streamfdr/core.hpp"

#include "streamfdr/errors.hpp"

#include <cmath>

namespace streamfdr {

ProcedureState Procedure::initial_state() const {
    ProcedureState state;
    state.ledger = WealthLedger(params_.alpha, params_.w0);
    return state;
}

void Procedure::settle(ProcedureState& state, double p, double level, bool rejected) const {
    charge(state.ledger, p, level, rejected);

    const std::uint64_t t = ++state.summary.t;
    if (p <= params_.lambda) ++state.candidates.total;
    if (p <= params_.eta) ++state.selection.total;
    if (rejected) {
        state.summary.rejection_times.push_back(t);
        state.candidates.through_rejection.push_back(state.candidates.total);
        state.selection.rejection_ranks.push_back(state.selection.total);
    }
    state.level_sum += level;
}

Engine::Engine(std::shared_ptr<const Procedure> procedure)
    : procedure_(std::move(procedure)), state_(procedure_->initial_state()) {}

Engine::Engine(std::shared_ptr<const Procedure> procedure, ProcedureState state)
    : procedure_(std::move(procedure)), state_(std::move(state)) {}

double Engine::next_level() {
    if (state_.pending_level) {
        throw Error(ErrorKind::contract,
                    "level for t=" + std::to_string(t() + 1) + " already requested; feed a p-value first");
    }
    state_.pending_level = procedure_->level(state_);
    return *state_.pending_level;
}

DecisionRecord Engine::feed(const PValueRecord& record) {
    if (!state_.pending_level) {
        throw Error(ErrorKind::contract, "feed without an outstanding level request");
    }
    if (record.index != t() + 1) {
        throw Error(ErrorKind::sequencing, "expected index " + std::to_string(t() + 1) + ", got " +
                                               std::to_string(record.index));
    }
    if (!(record.p >= 0.0 && record.p <= 1.0)) {
        throw Error(ErrorKind::input, "p-value at index " + std::to_string(record.index) +
                                          " is outside [0, 1]");
    }
    const double level = *state_.pending_level;
    const bool rejected = record.p <= level;
    procedure_->settle(state_, record.p, level, rejected);
    state_.pending_level.reset();
    return {record.index, level, rejected};
}

DecisionRecord Engine::step(double p) {
    next_level();
    return feed({t() + 1, p, {}, {}});
}

double Engine::preview() const {
    if (state_.pending_level) return *state_.pending_level;
    return procedure_->level(state_);
}

}  // namespace streamfdr
