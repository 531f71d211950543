#pragma once

#include <cstdint>
#include <string_view>

namespace wifitrack {

std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value);
/// FNV-1a; stable across processes and platforms.
std::uint64_t hash_string(std::string_view s);

/// Counter-based random stream keyed by (seed, stream). Streams with
/// different keys are independent, so per-user generation can run in any
/// order or in parallel and still reproduce the same draws.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream);

    Rng split(std::uint64_t tag) const { return Rng(key_, tag); }

    std::uint64_t next();
    /// Uniform in [0, 1).
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n);
    bool bernoulli(double p) { return uniform() < p; }
    double normal();
    double normal(double mean, double sigma) { return mean + sigma * normal(); }
    /// exp(N(-sigma^2/2, sigma)), i.e. mean-one lognormal.
    double lognormal_unit_mean(double sigma);
    std::uint64_t poisson(double mean);
    /// Truncated power law p(x) ~ x^-alpha on [lo, hi], alpha != 1.
    double truncated_power_law(double lo, double hi, double alpha);

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Uniform [0,1) value derived purely from a key; no stream state.
double unit_from_key(std::uint64_t key);

}  // namespace wifitrack
