#pragma once

#include <random>
#include <vector>

#include "weaktomo/sequential_scheme.hpp"

namespace weaktomo {

// Postselected pointer wavefunction of one mixture component:
// sum_b amp_b * prod_c G(q_c - shift_bc), with equal shifts merged.
struct PointerTerm {
    cplx amp;
    Shift shift{};
};

struct PostselectedPointer {
    double weight = 1.0;
    std::vector<PointerTerm> terms;
};

struct PostselectedEnsemble {
    double sigma = 1.0;
    std::vector<PostselectedPointer> components;

    // Tr[pi_kl rho_f]: the click probability of the postselection.
    double probability() const;
};

PostselectedEnsemble postselect(const GaussianBranchEnsemble& e, const CVec& post);
PostselectedEnsemble postselect(const GaussianBranchEnsemble& e, Rect kl);

// i.i.d. draws from the normalized postselected pointer density, one
// quadrature per coordinate as chosen by `pattern`. Each coordinate may
// carry at most two distinct shifts (always true after impulsive kicks).
// Throws EnvelopeFailure if the rejection acceptance rate drops below 1e-4.
std::vector<Shift> sample_pointer_positions(const PostselectedEnsemble& e, Pattern pattern, long long n,
                                            std::mt19937_64& rng);

struct PatternSamples {
    Pattern pattern = 0;
    long long trials = 0;          // postselection attempts
    std::vector<Shift> clicks;     // pointer readings of the successful ones
};

struct MomentEstimate {
    cplx value;
    double standard_error = 0.0;
};

// Trace-form estimate (1/trials) sum over clicks of prod_c q_c, with its
// standard error. Throws InsufficientSamples when trials < 100.
MomentEstimate estimate_moment(const PatternSamples& s);

struct LoweringEstimate {
    std::array<MomentEstimate, kPatterns> patterns;
    MomentEstimate lowering;  // sum_p coefficient(p) * pattern moment
};

// Needs one sample set for every one of the 16 patterns.
LoweringEstimate estimate_moments(const std::vector<PatternSamples>& sets, double sigma);

// Simulates `trials` postselection attempts for one pattern: binomial click
// count, then that many pointer readings.
PatternSamples simulate_pattern(const PostselectedEnsemble& e, Pattern pattern, long long trials,
                                std::mt19937_64& rng);

}  // namespace weaktomo
