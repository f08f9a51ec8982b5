#include "streamfdr/gamma.hpp"

#include "streamfdr/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

namespace streamfdr {

namespace {

double lord_raw(double n) {
    return std::log(std::max(n, 2.0)) / (n * std::exp(std::sqrt(std::log(n))));
}

double power_raw(double n, double s) { return std::pow(n, -s); }

// Sum of raw terms over positions > n0 by Euler-Maclaurin: integral from
// a = n0 + 1, plus f(a)/2 - f'(a)/12. Remaining error is O(f'''(a)).
double lord_tail(double n0) {
    const double a = n0 + 1.0;
    const double u = std::log(a);
    const double v = std::sqrt(u);
    const double integral = 2.0 * std::exp(-v) * (v * v * v + 3.0 * v * v + 6.0 * v + 6.0);
    const double f = lord_raw(a);
    const double df = std::exp(-v) * (1.0 - v / 2.0 - u) / (a * a);
    return integral + f / 2.0 - df / 12.0;
}

double power_tail(double n0, double s) {
    const double a = n0 + 1.0;
    const double integral = std::pow(a, 1.0 - s) / (s - 1.0);
    const double f = std::pow(a, -s);
    const double df = -s * std::pow(a, -s - 1.0);
    return integral + f / 2.0 - df / 12.0;
}

// Kahan sum, smallest terms first.
double sum_reversed(const std::vector<double>& raw) {
    double sum = 0.0;
    double carry = 0.0;
    for (auto it = raw.rbegin(); it != raw.rend(); ++it) {
        const double y = *it - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum;
}

struct BuiltPrefix {
    double normalization;
    std::shared_ptr<const std::vector<double>> prefix;
};

using PrefixKey = std::tuple<int, double, std::uint64_t>;

// Prefix tables are expensive (10^6 transcendental evaluations) and
// identical for identical parameters, so they are memoized process-wide.
std::mutex cache_mutex;
std::map<PrefixKey, BuiltPrefix>& prefix_cache() {
    static std::map<PrefixKey, BuiltPrefix> cache;
    return cache;
}

}  // namespace

GammaSequence GammaSequence::lord_default(int origin, std::optional<std::uint64_t> horizon) {
    GammaSequence g;
    g.kind_ = GammaKind::lord_default;
    g.origin_ = origin;
    g.horizon_ = horizon;
    g.build();
    return g;
}

GammaSequence GammaSequence::power_law(double exponent, int origin,
                                       std::optional<std::uint64_t> horizon) {
    if (!(exponent > 1.0) || !std::isfinite(exponent)) {
        throw Error(ErrorKind::parameter,
                    "power-law gamma needs exponent > 1 to be summable");
    }
    GammaSequence g;
    g.kind_ = GammaKind::power_law;
    g.exponent_ = exponent;
    g.origin_ = origin;
    g.horizon_ = horizon;
    g.build();
    return g;
}

GammaSequence GammaSequence::constant_bounded(std::uint64_t horizon, int origin) {
    if (horizon < 1) {
        throw Error(ErrorKind::parameter, "bounded gamma needs M >= 1");
    }
    GammaSequence g;
    g.kind_ = GammaKind::constant_bounded;
    g.origin_ = origin;
    g.horizon_ = horizon;
    g.build();
    return g;
}

GammaSequence GammaSequence::custom(std::vector<double> values, int origin, bool normalize) {
    if (values.empty()) {
        throw Error(ErrorKind::parameter, "custom gamma list is empty");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]) || values[i] < 0.0) {
            throw Error(ErrorKind::parameter,
                        "custom gamma term " + std::to_string(i + 1) + " is negative or not finite");
        }
        if (i > 0 && values[i] > values[i - 1]) {
            throw Error(ErrorKind::parameter,
                        "custom gamma list increases at term " + std::to_string(i + 1));
        }
    }
    const double total = sum_reversed(values);
    if (normalize) {
        if (!(total > 0.0)) {
            throw Error(ErrorKind::parameter, "custom gamma list sums to zero");
        }
        for (auto& v : values) v /= total;
    } else if (total > 1.0 + 1e-9) {
        throw Error(ErrorKind::parameter, "custom gamma list sums to more than one");
    }
    GammaSequence g;
    g.kind_ = GammaKind::custom;
    g.origin_ = origin;
    g.horizon_ = values.size();
    g.custom_ = std::make_shared<const std::vector<double>>(std::move(values));
    g.build();
    return g;
}

void GammaSequence::build() {
    if (origin_ != 0 && origin_ != 1) {
        throw Error(ErrorKind::parameter, "gamma origin must be 0 or 1");
    }
    if (horizon_ && *horizon_ < 1) {
        throw Error(ErrorKind::parameter, "gamma horizon must be >= 1");
    }
    if (kind_ == GammaKind::custom) {
        normalization_ = 1.0;
        prefix_ = custom_;
        return;
    }

    const PrefixKey key{static_cast<int>(kind_), exponent_, horizon_.value_or(0)};
    {
        std::lock_guard lock(cache_mutex);
        auto it = prefix_cache().find(key);
        if (it != prefix_cache().end()) {
            normalization_ = it->second.normalization;
            prefix_ = it->second.prefix;
            return;
        }
    }

    const std::uint64_t count = horizon_ ? std::min<std::uint64_t>(*horizon_, kCachedPrefix) : kCachedPrefix;
    std::vector<double> raw(count);
    for (std::uint64_t n = 1; n <= count; ++n) raw[n - 1] = raw_term(n);

    double total = sum_reversed(raw);
    if (horizon_ && *horizon_ > count) {
        // Truncated beyond the cached prefix: finish the finite sum directly.
        for (std::uint64_t n = *horizon_; n > count; --n) total += raw_term(n);
    } else if (!horizon_) {
        total += kind_ == GammaKind::lord_default ? lord_tail(static_cast<double>(count))
                                                  : power_tail(static_cast<double>(count), exponent_);
    }
    for (auto& v : raw) v /= total;

    BuiltPrefix built{total, std::make_shared<const std::vector<double>>(std::move(raw))};
    {
        std::lock_guard lock(cache_mutex);
        prefix_cache().emplace(key, built);
    }
    normalization_ = built.normalization;
    prefix_ = built.prefix;
}

double GammaSequence::raw_term(std::uint64_t n) const {
    if (n < 1 || (horizon_ && n > *horizon_)) return 0.0;
    switch (kind_) {
        case GammaKind::lord_default:
            return lord_raw(static_cast<double>(n));
        case GammaKind::power_law:
            return power_raw(static_cast<double>(n), exponent_);
        case GammaKind::constant_bounded:
            return 1.0;
        case GammaKind::custom:
            return (*custom_)[n - 1];
    }
    return 0.0;
}

double GammaSequence::at(std::int64_t k) const {
    const std::int64_t pos = k - origin_ + 1;
    if (pos < 1) return 0.0;
    const auto n = static_cast<std::uint64_t>(pos);
    if (horizon_ && n > *horizon_) return 0.0;
    if (n <= prefix_->size()) return (*prefix_)[n - 1];
    return raw_term(n) / normalization_;
}

std::string GammaSequence::describe() const {
    std::ostringstream out;
    switch (kind_) {
        case GammaKind::lord_default:
            out << "lord-default";
            break;
        case GammaKind::power_law: {
            char buf[64];
            auto res = std::to_chars(buf, buf + sizeof buf, exponent_);
            out << "power:" << std::string_view(buf, res.ptr - buf);
            break;
        }
        case GammaKind::constant_bounded:
            return "bounded:" + std::to_string(*horizon_);
        case GammaKind::custom:
            return "custom";
    }
    if (horizon_) out << '@' << *horizon_;
    return out.str();
}

const std::vector<double>& GammaSequence::custom_values() const {
    static const std::vector<double> none;
    return custom_ ? *custom_ : none;
}

GammaSequence GammaSequence::with_origin(int origin) const {
    if (origin != 0 && origin != 1) {
        throw Error(ErrorKind::parameter, "gamma origin must be 0 or 1");
    }
    GammaSequence g = *this;
    g.origin_ = origin;
    return g;
}

namespace {

double parse_real(std::string_view text, std::string_view what) {
    double value = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw Error(ErrorKind::parameter, "cannot parse " + std::string(what) + " '" + std::string(text) + "'");
    }
    return value;
}

std::uint64_t parse_count(std::string_view text, std::string_view what) {
    std::uint64_t value = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw Error(ErrorKind::parameter, "cannot parse " + std::string(what) + " '" + std::string(text) + "'");
    }
    return value;
}

std::vector<double> read_gamma_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open gamma file " + path);
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        values.push_back(parse_real(std::string_view(line).substr(first, last - first + 1),
                                    "gamma value on line " + std::to_string(line_no)));
    }
    return values;
}

}  // namespace

GammaSequence parse_gamma(std::string_view spec, int origin) {
    if (spec.starts_with("file:")) {
        return GammaSequence::custom(read_gamma_file(std::string(spec.substr(5))), origin);
    }
    if (spec.starts_with("bounded:")) {
        return GammaSequence::constant_bounded(parse_count(spec.substr(8), "bounded horizon"), origin);
    }

    std::optional<std::uint64_t> horizon;
    if (auto at = spec.find('@'); at != std::string_view::npos) {
        horizon = parse_count(spec.substr(at + 1), "gamma horizon");
        spec = spec.substr(0, at);
    }
    if (spec == "lord-default") return GammaSequence::lord_default(origin, horizon);
    if (spec.starts_with("power:")) {
        return GammaSequence::power_law(parse_real(spec.substr(6), "power-law exponent"), origin, horizon);
    }
    throw Error(ErrorKind::parameter, "unknown gamma sequence '" + std::string(spec) + "'");
}

}  // namespace streamfdr
