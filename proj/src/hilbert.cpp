#include "weaktomo/hilbert.hpp"

#include <cmath>
#include <string>

#include "weaktomo/errors.hpp"

namespace weaktomo {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NotNormalized: return "NotNormalized";
        case ErrorKind::NonPhysicalInput: return "NonPhysicalInput";
        case ErrorKind::OrthogonalPostselection: return "OrthogonalPostselection";
        case ErrorKind::DegenerateCoupling: return "DegenerateCoupling";
        case ErrorKind::DegeneratePointer: return "DegeneratePointer";
        case ErrorKind::InversionOutOfRange: return "InversionOutOfRange";
        case ErrorKind::CouplingTooStrong: return "CouplingTooStrong";
        case ErrorKind::ProbabilityOutOfRange: return "ProbabilityOutOfRange";
        case ErrorKind::EnvelopeFailure: return "EnvelopeFailure";
        case ErrorKind::InsufficientSamples: return "InsufficientSamples";
        case ErrorKind::DegenerateInput: return "DegenerateInput";
        case ErrorKind::InvalidStateSpec: return "InvalidStateSpec";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

namespace {
constexpr std::array<std::string_view, 4> kRectNames{"HH", "HV", "VH", "VV"};
constexpr std::array<std::string_view, 4> kDiagNames{"DD", "DA", "AD", "AA"};
}  // namespace

std::string_view name(Rect r) { return kRectNames[index(r)]; }
std::string_view name(Diag d) { return kDiagNames[index(d)]; }

Rect parse_rect(std::string_view s) {
    for (Rect r : kRect)
        if (name(r) == s) return r;
    throw Error(ErrorKind::InvalidConfig, "unknown rectilinear label '" + std::string(s) + "'");
}

Diag parse_diag(std::string_view s) {
    for (Diag d : kDiag)
        if (name(d) == s) return d;
    throw Error(ErrorKind::InvalidConfig, "unknown diagonal label '" + std::string(s) + "'");
}

namespace qubit {
CVec H() { return CVec::Unit(2, 0); }
CVec V() { return CVec::Unit(2, 1); }
CVec D() { return (H() + V()) / std::sqrt(2.0); }
CVec A() { return (H() - V()) / std::sqrt(2.0); }
CVec rect(int bit) { return bit == 0 ? H() : V(); }
CVec diag(int bit) { return bit == 0 ? D() : A(); }
}  // namespace qubit

CMat tensor(const CMat& a, const CMat& b) {
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index r = 0; r < a.rows(); ++r)
        for (Eigen::Index c = 0; c < a.cols(); ++c)
            out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
    return out;
}

CVec tensor(const CVec& a, const CVec& b) {
    CVec out(a.size() * b.size());
    for (Eigen::Index r = 0; r < a.size(); ++r) out.segment(r * b.size(), b.size()) = a(r) * b;
    return out;
}

CMat projector(const CVec& k) {
    const double n = k.norm();
    if (std::abs(n - 1.0) > 1e-12)
        throw Error(ErrorKind::NotNormalized, "ket norm " + std::to_string(n));
    return k * k.adjoint();
}

const BasisPair& mub_bases() {
    static const BasisPair bases = [] {
        BasisPair b;
        for (int idx = 0; idx < 4; ++idx) {
            b.aprime[idx] = tensor(qubit::rect(idx >> 1), qubit::rect(idx & 1));
            b.bprime[idx] = tensor(qubit::diag(idx >> 1), qubit::diag(idx & 1));
        }
        return b;
    }();
    return bases;
}

CMat projector(Rect r) { return projector(ket(r)); }
CMat projector(Diag d) { return projector(ket(d)); }
CMat photon1(const CMat& single) { return tensor(single, CMat::Identity(2, 2)); }
CMat photon2(const CMat& single) { return tensor(CMat::Identity(2, 2), single); }

CMat diag_to_rect() {
    CMat w(4, 4);
    for (int c = 0; c < 4; ++c) w.col(c) = mub_bases().bprime[c];
    return w;
}

CMat unitary_exp(const CMat& hermitian, double g) {
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian);
    const auto& lam = es.eigenvalues();
    CVec phases(lam.size());
    for (Eigen::Index k = 0; k < lam.size(); ++k) phases(k) = std::exp(-kI * g * lam(k));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace weaktomo
