#pragma once

#include "streamfdr/core.hpp"
#include "streamfdr/gamma.hpp"

#include <memory>
#include <string_view>
#include <vector>

namespace streamfdr {

// Pure level formulas. Each is an exact evaluation at time t given the
// history of steps 1..t-1; out-of-range gamma indices contribute zero.

// alpha_t = alpha * gamma_t
double alpha_spending_level(std::uint64_t t, double alpha, const GammaSequence& gamma);

// LORD++: w0 gamma_t + (alpha - w0) gamma_{t - tau_1} + alpha sum_{j>=2} gamma_{t - tau_j}
double lord_level(std::uint64_t t, double alpha, double w0, const GammaSequence& gamma,
                  const StreamSummary& history);

// SAFFRON: min{lambda, (1 - lambda)[w0 gamma_{t - C_0+} + (alpha - w0) gamma_{t - tau_1 - C_1+}
//                                   + alpha sum_{j>=2} gamma_{t - tau_j - C_j+}]}
// `candidates.total` counts candidates among 1..t-1.
double saffron_level(std::uint64_t t, double alpha, double w0, double lambda,
                     const GammaSequence& gamma, const StreamSummary& history,
                     const CandidateCounts& candidates);

// ADDIS: min{lambda, (eta - lambda)[w0 gamma_{S^t - C_0+} + (alpha - w0) gamma_{S^t - tau*_1 - C_1+}
//                                   + alpha sum_{j>=2} gamma_{S^t - tau*_j - C_j+}]}
// gamma must have origin 0.
double addis_level(std::uint64_t t, double alpha, double w0, double lambda, double eta,
                   const GammaSequence& gamma, const StreamSummary& history,
                   const CandidateCounts& candidates, const SelectionCounts& selection);

// One GAI++ wealth update; validates phi_t <= W(t-1) and the payout cap.
void gai_step(WealthLedger& ledger, double level, double penalty, double payout, bool rejected);

// Procedure names: "uncorrected", "alpha-spending", "gai++", "lord",
// "saffron", "addis".
const std::vector<std::string_view>& procedure_names();

// Resolves defaults and validates parameters:
//   w0 "auto": alpha/10 for lord and gai++, alpha/2 for saffron and addis
//   gamma "auto": lord-default for alpha-spending, lord and gai++;
//                 power:1.6 for saffron; power:1.6 at origin 0 for addis
//   saffron lambda 0.5; addis lambda 0.25, eta 0.5
ProcedureParams resolve_params(const ProcedureConfig& config);

std::shared_ptr<const Procedure> make_procedure(const ProcedureConfig& config);
std::shared_ptr<const Procedure> make_procedure(const ProcedureParams& params);

}  // namespace streamfdr
