#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"

using namespace weaktomo;

namespace {

CMat random_2x2(std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    CMat m(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m(i, j) = cplx(n(rng), n(rng));
    return m;
}

}  // namespace

TEST(Tensor, IdentityTimesIdentity) {
    EXPECT_LT(max_abs(tensor(CMat(CMat::Identity(2, 2)), CMat(CMat::Identity(2, 2))) - CMat::Identity(4, 4)), 1e-15);
}

TEST(Tensor, ProjectorOntoHV) {
    CMat expect = CMat::Zero(4, 4);
    expect(1, 1) = 1.0;
    EXPECT_LT(max_abs(tensor(projector(qubit::H()), projector(qubit::V())) - expect), 1e-15);
}

TEST(Tensor, DiagonalProjectorsGiveUniformQuarter) {
    const CMat dd = tensor(projector(qubit::D()), projector(qubit::D()));
    EXPECT_LT(max_abs(dd - CMat::Constant(4, 4, 0.25)), 1e-15);
}

TEST(Tensor, MixedProductRule) {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 20; ++t) {
        const CMat a = random_2x2(rng), b = random_2x2(rng), c = random_2x2(rng), d = random_2x2(rng);
        EXPECT_LT(max_abs(tensor(a, b) * tensor(c, d) - tensor(CMat(a * c), CMat(b * d))), 1e-12);
    }
}

TEST(Tensor, RowIndexConvention) {
    // |V> x |H> lands on index 2 (VH)
    const CVec vh = tensor(qubit::V(), qubit::H());
    EXPECT_EQ(vh(2), cplx(1.0));
    EXPECT_DOUBLE_EQ(vh.norm(), 1.0);
}

TEST(Projector, Examples) {
    CMat h = CMat::Zero(2, 2);
    h(0, 0) = 1.0;
    EXPECT_LT(max_abs(projector(qubit::H()) - h), 1e-15);
    EXPECT_LT(max_abs(projector(qubit::D()) - CMat::Constant(2, 2, 0.5)), 1e-15);
    CMat hh = CMat::Zero(4, 4);
    hh(0, 0) = 1.0;
    EXPECT_LT(max_abs(projector(ket(Rect::HH)) - hh), 1e-15);
}

TEST(Projector, RejectsUnnormalized) {
    CVec k = qubit::H() * 1.01;
    EXPECT_KIND(projector(k), NotNormalized);
}

TEST(Projector, Idempotent) {
    for (Rect r : kRect) EXPECT_LT(max_abs(projector(r) * projector(r) - projector(r)), 1e-14);
    for (Diag d : kDiag) EXPECT_LT(max_abs(projector(d) * projector(d) - projector(d)), 1e-14);
    CVec k(4);
    k << cplx(0.3, 0.1), cplx(-0.2, 0.5), cplx(0.4, 0.0), cplx(0.1, -0.3);
    k.normalize();
    EXPECT_LT(max_abs(projector(k) * projector(k) - projector(k)), 1e-14);
}

TEST(Mub, Overlaps) {
    EXPECT_NEAR(std::abs(ket(Rect::HH).dot(ket(Diag::DD)) - 0.5), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(ket(Rect::HV).dot(ket(Diag::DA)) - (-0.5)), 0.0, 1e-15);
    for (Rect r : kRect)
        for (Diag d : kDiag) EXPECT_NEAR(std::norm(ket(r).dot(ket(d))), 0.25, 1e-14);
}

TEST(Mub, Orthonormal) {
    CMat ga(4, 4), gb(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            ga(i, j) = mub_bases().aprime[i].dot(mub_bases().aprime[j]);
            gb(i, j) = mub_bases().bprime[i].dot(mub_bases().bprime[j]);
        }
    EXPECT_LT(max_abs(ga - CMat::Identity(4, 4)), 1e-15);
    EXPECT_LT(max_abs(gb - CMat::Identity(4, 4)), 1e-15);
}

TEST(Mub, Completeness) {
    CMat sa = CMat::Zero(4, 4), sb = CMat::Zero(4, 4);
    for (Rect r : kRect) sa += projector(r);
    for (Diag d : kDiag) sb += projector(d);
    EXPECT_LT(max_abs(sa - CMat::Identity(4, 4)), 1e-14);
    EXPECT_LT(max_abs(sb - CMat::Identity(4, 4)), 1e-14);
}

TEST(Labels, RoundTrip) {
    for (Rect r : kRect) EXPECT_EQ(parse_rect(name(r)), r);
    for (Diag d : kDiag) EXPECT_EQ(parse_diag(name(d)), d);
    EXPECT_THROW(parse_rect("XY"), Error);
}

TEST(Unitary, ExpOfProjector) {
    // exp(-i g pi) = I + (e^{-ig} - 1) pi
    const double g = 0.7;
    const CMat u = unitary_exp(projector(Rect::HV), g);
    const CMat expect = CMat::Identity(4, 4) + (std::exp(-kI * g) - 1.0) * projector(Rect::HV);
    EXPECT_LT(max_abs(u - expect), 1e-14);
}
