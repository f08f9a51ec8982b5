#pragma once

#include <cstdint>
#include <deque>

namespace streamfdr {

struct LedgerEntry {
    double penalty = 0.0;  // phi_t
    double payout = 0.0;   // psi_t
    double bound = 0.0;    // b_t in force at step t
    bool rejected = false;
};

// Alpha-wealth account of a generalized alpha-investing rule:
//   W(t) = W(t-1) - phi_t + R_t psi_t,  W(0) = w0.
// step() enforces the GAI++ constraints (phi_t <= W(t-1) and the payout cap);
// step_uncapped() keeps only the overdraft check, for budgets whose reward
// accounting is not of GAI++ form.
class WealthLedger {
public:
    static constexpr double kTolerance = 1e-12;
    static constexpr std::size_t kTailLength = 32;

    WealthLedger() = default;
    WealthLedger(double alpha, double w0);

    // b_t = alpha - w0 before the first rejection, alpha afterward.
    double bound() const;
    // min{phi + b_t, phi / alpha_t + b_t - 1}
    double payout_cap(double level, double penalty) const;

    void step(double level, double penalty, double payout, bool rejected);
    void step_uncapped(double penalty, double payout, bool rejected);

    double wealth() const { return wealth_; }
    double alpha() const { return alpha_; }
    double initial() const { return w0_; }
    std::uint64_t rejections() const { return rejections_; }
    // Wealth right after the most recent rejection (w0 before any).
    double anchor() const { return anchor_; }
    const std::deque<LedgerEntry>& tail() const { return tail_; }

    // Snapshot restore.
    static WealthLedger restore(double alpha, double w0, double wealth, double anchor,
                                std::uint64_t rejections, std::deque<LedgerEntry> tail);

private:
    void apply(double penalty, double payout, bool rejected, double bound);

    double alpha_ = 0.0;
    double w0_ = 0.0;
    double wealth_ = 0.0;
    double anchor_ = 0.0;
    std::uint64_t rejections_ = 0;
    std::deque<LedgerEntry> tail_;
};

}  // namespace streamfdr
