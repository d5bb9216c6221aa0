#include "weaktomo/statistics.hpp"

#include <algorithm>

#include "weaktomo/errors.hpp"

namespace weaktomo {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

long long ShotPlan::shots_for(std::string_view label) const {
    if (auto it = per_setting.find(std::string(label)); it != per_setting.end()) return it->second;
    if (shots) return *shots;
    throw Error(ErrorKind::InvalidConfig, "no shot budget for setting '" + std::string(label) + "'");
}

void ShotPlan::validate() const {
    if (shots && *shots <= 0) throw Error(ErrorKind::InvalidConfig, "shots must be positive");
    for (const auto& [label, n] : per_setting)
        if (n <= 0) throw Error(ErrorKind::InvalidConfig, "shots for '" + label + "' must be positive");
    if (!shots && per_setting.empty()) throw Error(ErrorKind::InvalidConfig, "empty shot plan");
}

std::mt19937_64 substream(std::uint64_t seed, std::string_view label) {
    const std::uint64_t a = splitmix64(seed);
    const std::uint64_t b = splitmix64(a ^ fnv1a(label));
    std::seed_seq seq{std::uint32_t(a), std::uint32_t(a >> 32), std::uint32_t(b), std::uint32_t(b >> 32)};
    return std::mt19937_64(seq);
}

CountRecord sample_bernoulli(double p, long long n, std::mt19937_64& rng, std::string label) {
    if (!(p >= -1e-12 && p <= 1.0 + 1e-12))
        throw Error(ErrorKind::ProbabilityOutOfRange, "p = " + std::to_string(p));
    if (n < 0) throw Error(ErrorKind::InvalidConfig, "negative trial count");
    p = std::clamp(p, 0.0, 1.0);
    CountRecord rec{std::move(label), 0, n};
    if (n == 0 || p == 0.0) return rec;
    if (p == 1.0) {
        rec.successes = n;
        return rec;
    }
    std::binomial_distribution<long long> binom(n, p);
    rec.successes = binom(rng);
    return rec;
}

CountRecord sample_bernoulli(double p, long long n, std::uint64_t seed, std::string label) {
    auto rng = substream(seed, label);
    return sample_bernoulli(p, n, rng, std::move(label));
}

}  // namespace weaktomo
