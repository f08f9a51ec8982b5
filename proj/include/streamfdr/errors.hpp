#pragma once

#include <stdexcept>
#include <string>

namespace streamfdr {

enum class ErrorKind {
    contract,    // level/feed alternation broken
    sequencing,  // out-of-order or gapped index
    input,       // malformed or out-of-range data
    parameter,   // incoherent configuration
    overdraft,   // penalty larger than available wealth
    payout_cap,  // GAI++ reward above its cap
    integrity,   // corrupt or incompatible snapshot
    io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// CLI exit code for an error: 2 for bad input, 3 for state/integrity problems.
inline int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::integrity:
        case ErrorKind::contract:
        case ErrorKind::overdraft:
        case ErrorKind::payout_cap:
            return 3;
        default:
            return 2;
    }
}

}  // namespace streamfdr
