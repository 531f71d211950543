#include "wifitrack/random.hpp"

#include <cmath>
#include <numbers>

namespace wifitrack {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
    return mix64(seed ^ (mix64(value) + 0x632be59bd9b4e019ULL + (seed << 6) + (seed >> 2)));
}

std::uint64_t hash_string(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

double unit_from_key(std::uint64_t key) {
    return static_cast<double>(mix64(key) >> 11) * 0x1.0p-53;
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : key_(hash_combine(mix64(seed), stream)) {}

std::uint64_t Rng::next() { return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
    // Rejection keeps the result unbiased; n is small in practice.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = next();
    while (v >= limit) v = next();
    return v % n;
}

double Rng::normal() {
    // Box-Muller; one value per call keeps the draw count predictable.
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::lognormal_unit_mean(double sigma) {
    return std::exp(normal(-0.5 * sigma * sigma, sigma));
}

std::uint64_t Rng::poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean > 60.0) {
        const double v = std::round(normal(mean, std::sqrt(mean)));
        return v < 0.0 ? 0 : static_cast<std::uint64_t>(v);
    }
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double p = uniform();
    while (p > limit) {
        ++k;
        p *= uniform();
    }
    return k;
}

double Rng::truncated_power_law(double lo, double hi, double alpha) {
    const double a = 1.0 - alpha;
    const double u = uniform();
    const double lo_a = std::pow(lo, a);
    const double hi_a = std::pow(hi, a);
    return std::pow(lo_a + u * (hi_a - lo_a), 1.0 / a);
}

}  // namespace wifitrack
