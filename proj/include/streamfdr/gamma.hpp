#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace streamfdr {

enum class GammaKind {
    lord_default,      // log(t v 2) / (t exp(sqrt(log t)))
    power_law,         // t^-s
    constant_bounded,  // 1/M for the first M indices
    custom,
};

// A non-negative, non-increasing spending sequence {gamma_k} that sums to at
// most one. Immutable once built; copies share the cached prefix.
//
// Index semantics: the first valid index is `origin()` (0 or 1). Terms are
// stored by position n = k - origin + 1, so an origin-0 power law evaluates
// (k+1)^-s at index k. gamma_at() is zero before the origin and beyond the
// horizon, which keeps shifted-index level formulas total.
class GammaSequence {
public:
    static constexpr std::size_t kCachedPrefix = 1'000'000;

    static GammaSequence lord_default(int origin = 1, std::optional<std::uint64_t> horizon = {});
    static GammaSequence power_law(double exponent, int origin = 1,
                                   std::optional<std::uint64_t> horizon = {});
    static GammaSequence constant_bounded(std::uint64_t horizon, int origin = 1);
    // Values are used as given unless `normalize` is set, in which case they
    // are scaled to sum to one.
    static GammaSequence custom(std::vector<double> values, int origin = 1, bool normalize = false);

    double at(std::int64_t k) const;

    GammaKind kind() const { return kind_; }
    int origin() const { return origin_; }
    double exponent() const { return exponent_; }
    std::optional<std::uint64_t> horizon() const { return horizon_; }
    // Sum of the unnormalized terms; at(k) * normalization() == raw term.
    double normalization() const { return normalization_; }
    // Unnormalized term at position n >= 1 (closed form or custom value).
    double raw_term(std::uint64_t n) const;
    // Canonical config string, e.g. "power:1.6@20"; custom sequences render
    // as "custom" and carry their values separately.
    std::string describe() const;
    const std::vector<double>& custom_values() const;

    // Same terms, different first index.
    GammaSequence with_origin(int origin) const;

private:
    GammaSequence() = default;
    void build();

    GammaKind kind_ = GammaKind::power_law;
    int origin_ = 1;
    double exponent_ = 0.0;
    std::optional<std::uint64_t> horizon_;
    double normalization_ = 1.0;
    std::shared_ptr<const std::vector<double>> prefix_;  // normalized terms by position - 1
    std::shared_ptr<const std::vector<double>> custom_;
};

// Config syntax:
//   "lord-default" | "power:<s>" | "bounded:<M>" | "file:<path>"
// A "@<M>" suffix on lord-default or power truncates at horizon M and
// renormalizes over the first M terms, e.g. "power:1.6@20".
GammaSequence parse_gamma(std::string_view spec, int origin = 1);

}  // namespace streamfdr
