#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "weaktomo/modular_scheme.hpp"

using namespace weaktomo;

namespace {

constexpr double kPi = std::numbers::pi;
const double r2 = 1.0 / std::sqrt(2.0);

TwoPhotonDensityMatrix phi_plus() { return density_from_pure(bell_phi_plus()); }

CMat photon1_rect(int bit) { return photon1(projector(qubit::rect(bit))); }

// Pointer state N[eta m |du> + mu |ud>] in (ud, du) order.
CVec pointer_with(cplx m, const PathPointerState& ptr) {
    CVec v(2);
    v << ptr.mu, ptr.eta * m;
    return v / v.norm();
}

Method1Config exact_cfg(Method1Target t = Method1Target::Aprime) {
    Method1Config cfg;
    cfg.mode = Method1Mode::Exact;
    cfg.target = t;
    return cfg;
}

}  // namespace

TEST(WeakValueJoint, Examples) {
    EXPECT_NEAR(std::abs(weak_value_joint(phi_plus(), Rect::HH, Diag::DD) - 0.5), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(weak_value_joint(phi_plus(), Rect::HV, Diag::DD)), 0.0, 1e-15);
    EXPECT_KIND(weak_value_joint(phi_plus(), Rect::HH, Diag::AD), OrthogonalPostselection);
}

TEST(WeakValueJoint, SumRule) {
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto rho = random_mixed(s, 1 + int(s % 4));
        for (Diag ab : kDiag) {
            if (postselection_probability(rho, ab) <= 1e-9) continue;
            cplx sum = 0.0;
            for (Rect ij : kRect) sum += weak_value_joint(rho, ij, ab);
            EXPECT_NEAR(std::abs(sum - 1.0), 0.0, 1e-10);
        }
    }
}

TEST(ModularValue, HalfWeakValueAtQuarterTurn) {
    // <pi_H^1>_w = 1/2 for phi+ postselected on DD; s = -1 - i at g = pi/2
    EXPECT_NEAR(std::abs(Coupling(kPi / 2).s() - cplx(-1, -1)), 0.0, 1e-15);
    const cplx m = modular_value(phi_plus(), photon1_rect(0), Diag::DD, kPi / 2);
    EXPECT_NEAR(std::abs(m - cplx(0.5, -0.5)), 0.0, 1e-14);
}

TEST(ModularValue, ZeroWeakValueGivesOne) {
    const cplx m = modular_value(phi_plus(), projector(Rect::HV), Diag::DD, 1.3);
    EXPECT_NEAR(std::abs(m - 1.0), 0.0, 1e-14);
}

TEST(ModularValue, WeakCouplingLimit) {
    const auto rho = random_mixed(3, 2);
    const auto mv = modular_values(rho, Rect::VH, Diag::DA, Coupling(1e-9));
    EXPECT_NEAR(std::abs(mv.m_sum - 1.0), 0.0, 1e-8);
    EXPECT_NEAR(std::abs(mv.m_1 - 1.0), 0.0, 1e-8);
    EXPECT_NEAR(std::abs(mv.m_2 - 1.0), 0.0, 1e-8);
}

TEST(ModularToWeak, NoJointWeakValue) {
    const ModularValueSet mv{cplx(0.3, 0.2) + cplx(1.1, -0.4) - 1.0, cplx(0.3, 0.2), cplx(1.1, -0.4)};
    EXPECT_NEAR(std::abs(modular_to_weak(mv, Coupling(0.9))), 0.0, 1e-15);
}

TEST(ModularToWeak, PhiPlusAtQuarterTurn) {
    const Coupling c(kPi / 2);
    const cplx w = modular_to_weak(modular_values(phi_plus(), Rect::HH, Diag::DD, c), c);
    EXPECT_NEAR(std::abs(w - 0.5), 0.0, 1e-14);
}

TEST(ModularToWeak, DegenerateCoupling) {
    const Coupling c(2 * kPi);
    EXPECT_KIND(modular_to_weak({1.0, 1.0, 1.0}, c), DegenerateCoupling);
}

TEST(ModularToWeak, ExactForAnyCoupling) {
    for (std::uint64_t s = 0; s < 30; ++s) {
        const auto rho = density_from_pure(random_pure(s));
        for (double g : {1e-3, 0.4, kPi / 2, 2.5, 5.0}) {
            const Coupling c(g);
            for (Rect ij : kRect)
                for (Diag ab : kDiag) {
                    if (postselection_probability(rho, ab) <= 1e-9) continue;
                    const cplx w = modular_to_weak(modular_values(rho, ij, ab, c), c);
                    // dividing by s^2 magnifies roundoff at small g
                    const double tol = std::max(1e-11, 1e-13 / std::norm(c.s()));
                    EXPECT_NEAR(std::abs(w - weak_value_joint(rho, ij, ab)), 0.0, tol) << s << " g=" << g;
                }
        }
    }
}

TEST(EvolveAndPostselect, NoEtaLeavesUpDown) {
    const PathPointerState ptr(1.0, 0.0);
    const CVec out = evolve_and_postselect(bell_phi_plus(), ptr, kPi / 2, Rect::HH, Diag::DD, Interaction::Joint);
    EXPECT_NEAR(std::abs(out(0)), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(out(1)), 0.0, 1e-15);
}

TEST(EvolveAndPostselect, ZeroCouplingReturnsPointer) {
    const PathPointerState ptr(std::sqrt(0.9), cplx(0.0, std::sqrt(0.1)));
    const CVec out = evolve_and_postselect(random_pure(4), ptr, 0.0, Rect::VH, Diag::AD, Interaction::First);
    CVec expect(2);
    expect << ptr.mu, ptr.eta;
    EXPECT_NEAR(std::abs(expect.dot(out)), 1.0, 1e-14);
}

TEST(EvolveAndPostselect, PhiPlusFirstPhoton) {
    const PathPointerState ptr(r2, r2);
    const CVec out = evolve_and_postselect(bell_phi_plus(), ptr, kPi / 2, Rect::HH, Diag::DD, Interaction::First);
    CVec expect(2);
    expect << r2, cplx(0.5, -0.5) * r2;
    expect.normalize();
    EXPECT_NEAR(std::abs(out(0) - expect(0)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(out(1) - expect(1)), 0.0, 1e-14);
}

TEST(EvolveAndPostselect, Orthogonal) {
    EXPECT_KIND(evolve_and_postselect(bell_phi_plus(), PathPointerState::weak(0.1), 1.0, Rect::HH, Diag::AD,
                                      Interaction::Joint),
                OrthogonalPostselection);
}

TEST(EvolveAndPostselect, MixedMatchesPureForRankOne) {
    const auto psi = random_pure(8);
    const auto ptr = PathPointerState::weak(0.2);
    const CVec v = evolve_and_postselect(psi, ptr, 0.8, Rect::HV, Diag::DA, Interaction::Second);
    const CMat d = evolve_and_postselect(density_from_pure(psi), ptr, 0.8, Rect::HV, Diag::DA, Interaction::Second);
    EXPECT_LT(max_abs(d - v * v.adjoint()), 1e-13);
}

TEST(Readout, Examples) {
    CVec ud(2);
    ud << 1.0, 0.0;
    auto p = readout_probabilities(ud);
    EXPECT_NEAR(p.p_re, 0.5, 1e-15);
    EXPECT_NEAR(p.p_im, 0.5, 1e-15);
    CVec plus(2);
    plus << r2, r2;
    p = readout_probabilities(plus);
    EXPECT_NEAR(p.p_re, 1.0, 1e-15);
    EXPECT_NEAR(p.p_im, 0.5, 1e-15);
}

TEST(Readout, FirstOrderExpansion) {
    const auto ptr = PathPointerState::weak(1e-4);
    const cplx m(0.7, -0.4);
    const auto p = readout_probabilities(pointer_with(m, ptr));
    const double k = (ptr.eta / ptr.mu).real();
    EXPECT_NEAR(p.p_re, 0.5 + k * m.real(), 1e-8);
    EXPECT_NEAR(p.p_im, 0.5 + k * m.imag(), 1e-8);
}

TEST(EstimateModular, NoSignalGivesZero) {
    const auto ptr = PathPointerState::weak(0.01);
    for (Estimator e : {Estimator::FirstOrder, Estimator::ExactInversion})
        EXPECT_EQ(estimate_modular_from_probabilities({0.5, 0.5}, ptr, e), cplx(0.0));
}

TEST(EstimateModular, ExactInversionRoundTrip) {
    const auto ptr = PathPointerState::weak(0.1);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int t = 0; t < 100; ++t) {
        const cplx m(u(rng), u(rng));
        const auto p = readout_probabilities(pointer_with(m, ptr));
        const cplx back = estimate_modular_from_probabilities(p, ptr, Estimator::ExactInversion);
        EXPECT_NEAR(std::abs(back - m), 0.0, 1e-10) << m;
    }
}

TEST(EstimateModular, RateRatioPicksFarRoot) {
    // |eta m / mu| = 3: the readout alone cannot tell x from 1/x
    const auto ptr = PathPointerState::weak(0.5);
    const cplx m = 3.0 * ptr.mu / ptr.eta * std::exp(kI * 0.6);
    const auto p = readout_probabilities(pointer_with(m, ptr));
    const double rate = std::norm(ptr.mu) + std::norm(ptr.eta * m);
    const cplx near = estimate_modular_from_probabilities(p, ptr, Estimator::ExactInversion);
    const cplx far = estimate_modular_from_probabilities(p, ptr, Estimator::ExactInversion, rate);
    EXPECT_GT(std::abs(near - m), 1.0);
    EXPECT_NEAR(std::abs(far - m), 0.0, 1e-10);
}

TEST(EstimateModular, FirstOrderBiasShrinksWithEta) {
    const cplx m(0.8, 0.3);
    auto bias = [&](double eta) {
        const auto ptr = PathPointerState::weak(eta);
        const auto p = readout_probabilities(pointer_with(m, ptr));
        return std::abs(estimate_modular_from_probabilities(p, ptr, Estimator::FirstOrder) - m);
    };
    const double ratio = bias(1e-2) / bias(1e-3);
    // the leading bias is m x^2 with x = eta |m| / mu, so the ratio is about 100
    EXPECT_GT(ratio, 10.0);
    EXPECT_NEAR(ratio, 100.0, 1.0);
}

TEST(EstimateModular, Errors) {
    EXPECT_KIND(estimate_modular_from_probabilities({0.6, 0.5}, PathPointerState(1.0, 0.0), Estimator::FirstOrder),
                DegeneratePointer);
    EXPECT_KIND(estimate_modular_from_probabilities({1.0, 1.0}, PathPointerState::weak(0.1),
                                                    Estimator::ExactInversion),
                InversionOutOfRange);
}

TEST(Assemble, PhiPlusElements) {
    const auto t = exact_weak_table(phi_plus(), Coupling(kPi / 2));
    EXPECT_NEAR(std::abs(*assemble_element_rect(t, Rect::HH, Rect::VV) - 0.5), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(*assemble_element_rect(t, Rect::HV, Rect::VH)), 0.0, 1e-12);
}

TEST(Assemble, CompletenessIdentity) {
    for (std::uint64_t s = 0; s < 50; ++s) {
        const CMat rho = random_mixed(s, 1 + int(s % 4)).matrix();
        for (Rect ij : kRect)
            for (Rect kl : kRect) {
                cplx sum = 0.0;
                for (Diag ab : kDiag) sum += ket(ab).dot(ket(kl)) * ket(ij).dot(rho * ket(ab));
                EXPECT_NEAR(std::abs(sum - rho(index(ij), index(kl))), 0.0, 1e-12);
            }
        // roles swapped: B' elements from A' resolution
        const CMat w = diag_to_rect();
        const CMat rho_b = w.adjoint() * rho * w;
        for (Diag ab : kDiag)
            for (Diag ab2 : kDiag) {
                cplx sum = 0.0;
                for (Rect ij : kRect) sum += ket(ij).dot(ket(ab2)) * ket(ab).dot(rho * ket(ij));
                EXPECT_NEAR(std::abs(sum - rho_b(index(ab), index(ab2))), 0.0, 1e-12);
            }
    }
}

TEST(Assemble, ExactTableReproducesRho) {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto rho = random_mixed(s, 1 + int(s % 4));
        const auto t = exact_weak_table(rho, Coupling(kPi / 2));
        for (Rect ij : kRect)
            for (Rect kl : kRect)
                EXPECT_NEAR(std::abs(*assemble_element_rect(t, ij, kl) - rho(ij, kl)), 0.0, 1e-10);
    }
}

TEST(Method1, ExactModeFixtures) {
    for (const char* f : {"bell-phi-plus", "werner(0.7)", "bell-psi-minus", "product-DD"}) {
        const auto rep = reconstruct_method1(fixture(f), exact_cfg());
        ASSERT_TRUE(rep.fidelity.has_value());
        EXPECT_NEAR(*rep.fidelity, 1.0, 1e-9) << f;
        EXPECT_LE(*rep.max_abs_element_error, 1e-10) << f;
        EXPECT_FALSE(rep.partial());
    }
}

TEST(Method1, ExactModeDiagonalBasis) {
    const auto rho = random_mixed(17, 3);
    const auto rep = reconstruct_method1(rho, exact_cfg(Method1Target::Bprime));
    EXPECT_EQ(rep.basis, "bprime");
    EXPECT_NEAR(*rep.fidelity, 1.0, 1e-9);
    EXPECT_LE(*rep.max_abs_element_error, 1e-10);
}

TEST(Method1, PureShortcut) {
    const auto rho = density_from_pure(random_pure(21));
    const auto rep = reconstruct_method1(rho, exact_cfg(Method1Target::PureDD));
    EXPECT_NEAR(*rep.fidelity, 1.0, 1e-9);
}

TEST(Method1, ExactModeHermitian) {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto raw = estimate_method1(random_mixed(s, 4), exact_cfg());
        EXPECT_LE(max_abs(raw.values - raw.values.adjoint()), 1e-10);
    }
}

TEST(Method1, ProbabilityModeSmallEta) {
    Method1Config cfg;
    cfg.eta = 1e-3;
    for (Estimator e : {Estimator::FirstOrder, Estimator::ExactInversion}) {
        cfg.estimator = e;
        const auto rep = reconstruct_method1(phi_plus(), cfg);
        EXPECT_LE(*rep.max_abs_element_error, 1e-2);
    }
}

TEST(Method1, ProbabilityModeConvergesAsEtaShrinks) {
    Method1Config cfg;
    cfg.estimator = Estimator::FirstOrder;
    for (const char* f : {"bell-phi-plus", "werner(0.7)", "product-HH", "bell-psi-plus"}) {
        double last = 1e300;
        for (double eta : {1e-1, 1e-2, 1e-3}) {
            cfg.eta = eta;
            const double err = *reconstruct_method1(fixture(f), cfg).max_abs_element_error;
            EXPECT_LT(err, last) << f << " eta=" << eta;
            last = err;
        }
    }
}

TEST(Method1, ProbabilityModeCompleteForPhiPlus) {
    // DA and AD never click on phi+; exact probabilities still assemble every element
    Method1Config cfg;
    const auto rep = reconstruct_method1(phi_plus(), cfg);
    EXPECT_FALSE(rep.partial());
}

TEST(Method1, ConfigErrors) {
    Method1Config cfg;
    cfg.eta = 0.0;
    EXPECT_KIND(validate(cfg), InvalidConfig);
    cfg.eta = 1e-2;
    cfg.g = 2 * kPi;
    EXPECT_KIND(validate(cfg), DegenerateCoupling);
    cfg.g = kPi / 2;
    cfg.mode = Method1Mode::Exact;
    cfg.shots = ShotPlan{1, 1000, {}};
    EXPECT_KIND(validate(cfg), InvalidConfig);
}
