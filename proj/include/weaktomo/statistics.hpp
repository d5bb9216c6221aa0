#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>

namespace weaktomo {

// Shot budget per measurement setting. `shots` is the default; entries in
// `per_setting` override it for individual labels.
struct ShotPlan {
    std::uint64_t seed = 0;
    std::optional<long long> shots;
    std::map<std::string, long long> per_setting;

    // Throws InvalidConfig when no budget applies to `label`.
    long long shots_for(std::string_view label) const;
    void validate() const;
};

struct CountRecord {
    std::string label;
    long long successes = 0;
    long long trials = 0;

    double estimate() const { return trials > 0 ? double(successes) / double(trials) : 0.0; }
};

// Independent generator for one setting, derived from (seed, label) so that
// settings can be simulated in any order.
std::mt19937_64 substream(std::uint64_t seed, std::string_view label);

// Binomial draw of n trials at probability p. Throws ProbabilityOutOfRange
// for p outside [0, 1] (1e-12 slack is clamped).
CountRecord sample_bernoulli(double p, long long n, std::mt19937_64& rng, std::string label = {});
CountRecord sample_bernoulli(double p, long long n, std::uint64_t seed, std::string label = {});

}  // namespace weaktomo
