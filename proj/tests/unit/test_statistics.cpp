#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "weaktomo/modular_scheme.hpp"
#include "weaktomo/pointer_sampling.hpp"
#include "weaktomo/sequential_scheme.hpp"
#include "weaktomo/statistics.hpp"

using namespace weaktomo;

namespace {

PostselectedEnsemble single_term(const Shift& d, double sigma = 1.0) {
    return {sigma, {PostselectedPointer{1.0, {PointerTerm{1.0, d}}}}};
}

GaussianPointerConfig pointer(double g) {
    GaussianPointerConfig c;
    c.g = g;
    return c;
}

double mean_of(const std::vector<Shift>& xs, int c) {
    double s = 0.0;
    for (const auto& x : xs) s += x[c];
    return s / double(xs.size());
}

double rms_of(const ReconstructionReport& r) { return *r.rms_element_error; }

}  // namespace

TEST(Bernoulli, Extremes) {
    EXPECT_EQ(sample_bernoulli(0.0, 12345, 1).successes, 0);
    EXPECT_EQ(sample_bernoulli(1.0, 12345, 1).successes, 12345);
    EXPECT_KIND(sample_bernoulli(1.2, 10, 1), ProbabilityOutOfRange);
    EXPECT_KIND(sample_bernoulli(-0.1, 10, 1), ProbabilityOutOfRange);
}

TEST(Bernoulli, HalfOverManySeeds) {
    int within = 0;
    for (std::uint64_t s = 0; s < 200; ++s)
        within += std::abs(sample_bernoulli(0.5, 1000000, s, "half").estimate() - 0.5) <= 0.002;
    EXPECT_GE(within, 198);
}

TEST(Bernoulli, DeterministicPerSeedAndLabel) {
    EXPECT_EQ(sample_bernoulli(0.37, 100000, 9, "a").successes, sample_bernoulli(0.37, 100000, 9, "a").successes);
    EXPECT_NE(sample_bernoulli(0.37, 100000, 9, "a").successes, sample_bernoulli(0.37, 100000, 9, "b").successes);
}

TEST(Bernoulli, Unbiased) {
    const double p = 0.3;
    const long long n = 1000;
    double sum = 0.0;
    for (std::uint64_t s = 0; s < 200; ++s) sum += sample_bernoulli(p, n, s, "u").estimate();
    const double pooled_se = std::sqrt(p * (1 - p) / double(n) / 200.0);
    EXPECT_LT(std::abs(sum / 200.0 - p), 3 * pooled_se);
}

TEST(ShotPlan, Allocation) {
    ShotPlan plan{3, 500, {{"special", 7}}};
    EXPECT_EQ(plan.shots_for("special"), 7);
    EXPECT_EQ(plan.shots_for("other"), 500);
    plan.per_setting["bad"] = 0;
    EXPECT_KIND(plan.validate(), InvalidConfig);
    EXPECT_KIND((ShotPlan{1, std::nullopt, {}}.validate()), InvalidConfig);
}

TEST(PointerSampler, SingleBranchMean) {
    const Shift d{0.3, -0.2, 0.0, 1.1};
    const long long n = 200000;
    std::mt19937_64 rng(5);
    const auto xs = sample_pointer_positions(single_term(d), 0, n, rng);
    ASSERT_EQ(xs.size(), std::size_t(n));
    for (int c = 0; c < kCoords; ++c) EXPECT_NEAR(mean_of(xs, c), d[c], 4.0 / std::sqrt(double(n)));
    // momentum readings of a real Gaussian are centered
    const auto ps = sample_pointer_positions(single_term(d), 0b1111, n, rng);
    for (int c = 0; c < kCoords; ++c) EXPECT_NEAR(mean_of(ps, c), 0.0, 4.0 * 0.5 / std::sqrt(double(n)));
}

TEST(PointerSampler, SymmetricMixtureBroadens) {
    const double g = 0.8;
    PostselectedEnsemble e{1.0,
                           {PostselectedPointer{0.5, {PointerTerm{1.0, {g, 0, 0, 0}}}},
                            PostselectedPointer{0.5, {PointerTerm{1.0, {-g, 0, 0, 0}}}}}};
    const long long n = 400000;
    std::mt19937_64 rng(6);
    const auto xs = sample_pointer_positions(e, 0, n, rng);
    double m2 = 0.0, m4 = 0.0;
    for (const auto& x : xs) {
        m2 += x[0] * x[0];
        m4 += std::pow(x[0], 4);
    }
    m2 /= double(n);
    m4 /= double(n);
    const double se = std::sqrt((m4 - m2 * m2) / double(n));
    EXPECT_NEAR(m2, 1.0 + g * g, 5 * se);
}

TEST(PointerSampler, Deterministic) {
    const auto post = postselect(sequential_ensemble(random_mixed(3, 3), Rect::HV, Diag::DD, pointer(0.3)), Rect::VH);
    std::mt19937_64 a(77), b(77);
    EXPECT_EQ(simulate_pattern(post, 0b0110, 5000, a).clicks, simulate_pattern(post, 0b0110, 5000, b).clicks);
}

TEST(PointerSampler, EnvelopeFailureOnThreeShifts) {
    PostselectedEnsemble e{1.0, {PostselectedPointer{1.0, {PointerTerm{1.0, {0, 0, 0, 0}}, PointerTerm{1.0, {0.1, 0, 0, 0}},
                                                            PointerTerm{1.0, {0.2, 0, 0, 0}}}}}};
    std::mt19937_64 rng(1);
    EXPECT_THROW(sample_pointer_positions(e, 0, 10, rng), Error);
}

TEST(Moments, AgreeWithAnalytic) {
    const auto ens = sequential_ensemble(random_mixed(3, 3), Rect::HH, Diag::DD, pointer(0.3));
    const auto post = postselect(ens, Rect::VV);
    for (Pattern p : {Pattern(0), Pattern(0b1010), Pattern(0b1111)}) {
        std::mt19937_64 rng(1000 + p);
        const auto est = estimate_moment(simulate_pattern(post, p, 1000000, rng));
        const cplx exact = pattern_moment(ens, Rect::VV, p);
        EXPECT_NEAR(est.value.real(), exact.real(), 5 * est.standard_error) << pattern_name(p);
    }
}

TEST(Moments, OddMomentsVanishWithoutCoupling) {
    const auto ens = sequential_ensemble(fixture("werner(0.7)"), Rect::HV, Diag::DD, pointer(0.0));
    const auto post = postselect(ens, Rect::HV);
    for (Pattern p = 0; p < kPatterns; p += 5) {
        std::mt19937_64 rng(p);
        const auto est = estimate_moment(simulate_pattern(post, p, 100000, rng));
        EXPECT_NEAR(est.value.real(), 0.0, 5 * est.standard_error) << pattern_name(p);
    }
}

TEST(Moments, PhiPlusCoherenceFromSamples) {
    const double g = 1e-2;
    const auto ens = sequential_ensemble(fixture("bell-phi-plus"), Rect::HH, Diag::DD, pointer(g));
    const auto post = postselect(ens, Rect::VV);
    std::vector<PatternSamples> sets;
    for (Pattern p = 0; p < kPatterns; ++p) {
        std::mt19937_64 rng(substream(2024, pattern_name(p)));
        sets.push_back(simulate_pattern(post, p, 1000000, rng));
    }
    const auto est = estimate_moments(sets, 1.0);
    // element = lowering / g^4 / (<VV|DD><DD|HH>)
    const double scale = std::pow(g, 4) * 0.25;
    const cplx element = est.lowering.value / scale;
    const double se = est.lowering.standard_error / scale;
    EXPECT_TRUE(std::isfinite(se));
    EXPECT_LE(std::abs(element - 0.5), 3 * se);
}

TEST(Moments, StandardErrorScaling) {
    const auto post = postselect(sequential_ensemble(random_mixed(8, 2), Rect::VH, Diag::DD, pointer(0.2)), Rect::HH);
    std::mt19937_64 a(1), b(2);
    const double se_small = estimate_moment(simulate_pattern(post, 0b0011, 10000, a)).standard_error;
    const double se_large = estimate_moment(simulate_pattern(post, 0b0011, 1000000, b)).standard_error;
    const double ratio = se_small / se_large;
    EXPECT_GT(ratio, 5.0);
    EXPECT_LT(ratio, 20.0);
}

TEST(Moments, InsufficientSamples) {
    PatternSamples s;
    s.trials = 99;
    EXPECT_KIND(estimate_moment(s), InsufficientSamples);
    std::vector<PatternSamples> sets(15);
    for (Pattern p = 0; p < 15; ++p) {
        sets[p].pattern = p;
        sets[p].trials = 1000;
    }
    EXPECT_KIND(estimate_moments(sets, 1.0), InsufficientSamples);
}

TEST(ShotNoise, Method1Deterministic) {
    Method1Config cfg;
    cfg.shots = ShotPlan{42, 100000, {}};
    const auto a = estimate_method1(fixture("werner(0.7)"), cfg);
    const auto b = estimate_method1(fixture("werner(0.7)"), cfg);
    EXPECT_EQ(a.values, b.values);
    cfg.shots->seed = 43;
    EXPECT_NE(estimate_method1(fixture("werner(0.7)"), cfg).values, a.values);
}

TEST(ShotNoise, Method1InverseSqrtScaling) {
    Method1Config cfg;
    const auto rho = fixture("bell-phi-plus");
    double small = 0.0, large = 0.0;
    for (std::uint64_t s = 1; s <= 4; ++s) {
        cfg.shots = ShotPlan{s, 10000, {}};
        small += rms_of(reconstruct_method1(rho, cfg));
        cfg.shots = ShotPlan{s, 1000000, {}};
        large += rms_of(reconstruct_method1(rho, cfg));
    }
    const double ratio = small / large;
    EXPECT_GT(ratio, 5.0);
    EXPECT_LT(ratio, 20.0);
}

TEST(ShotNoise, Method2InverseSqrtScaling) {
    Method2Config cfg;
    cfg.pointer = pointer(0.3);
    const auto rho = fixture("bell-phi-plus");
    const CMat analytic = estimate_method2(rho, cfg).values;
    auto rms_noise = [&](long long n) {
        cfg.shots = ShotPlan{1, n, {}};
        return (estimate_method2(rho, cfg).values - analytic).norm() / 4.0;
    };
    const double ratio = rms_noise(1000) / rms_noise(100000);
    EXPECT_GT(ratio, 5.0);
    EXPECT_LT(ratio, 20.0);
}
