#include "streamfdr/wealth.hpp"

#include "streamfdr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace streamfdr {

WealthLedger::WealthLedger(double alpha, double w0)
    : alpha_(alpha), w0_(w0), wealth_(w0), anchor_(w0) {
    if (!(w0 >= 0.0 && w0 <= alpha)) {
        throw Error(ErrorKind::parameter, "initial wealth must satisfy 0 <= w0 <= alpha");
    }
}

double WealthLedger::bound() const { return rejections_ == 0 ? alpha_ - w0_ : alpha_; }

double WealthLedger::payout_cap(double level, double penalty) const {
    const double b = bound();
    if (level <= 0.0) return penalty + b;
    return std::min(penalty + b, penalty / level + b - 1.0);
}

void WealthLedger::step(double level, double penalty, double payout, bool rejected) {
    if (rejected) {
        const double cap = payout_cap(level, penalty);
        if (payout > cap + kTolerance) {
            std::ostringstream msg;
            msg << "payout " << payout << " exceeds GAI++ cap " << cap;
            throw Error(ErrorKind::payout_cap, msg.str());
        }
    }
    apply(penalty, payout, rejected, bound());
}

void WealthLedger::step_uncapped(double penalty, double payout, bool rejected) {
    apply(penalty, payout, rejected, bound());
}

void WealthLedger::apply(double penalty, double payout, bool rejected, double bound) {
    if (penalty < 0.0 || penalty > wealth_ + kTolerance) {
        std::ostringstream msg;
        msg << "penalty " << penalty << " overdraws wealth " << wealth_;
        throw Error(ErrorKind::overdraft, msg.str());
    }
    wealth_ = wealth_ - penalty + (rejected ? payout : 0.0);
    if (rejected) {
        ++rejections_;
        anchor_ = wealth_;
    }
    tail_.push_back({penalty, payout, bound, rejected});
    if (tail_.size() > kTailLength) tail_.pop_front();
}

WealthLedger WealthLedger::restore(double alpha, double w0, double wealth, double anchor,
                                   std::uint64_t rejections, std::deque<LedgerEntry> tail) {
    WealthLedger ledger(alpha, w0);
    ledger.wealth_ = wealth;
    ledger.anchor_ = anchor;
    ledger.rejections_ = rejections;
    ledger.tail_ = std::move(tail);
    return ledger;
}

}  // namespace streamfdr
