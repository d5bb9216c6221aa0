#include "weaktomo/states.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "weaktomo/errors.hpp"

namespace weaktomo {

namespace {

constexpr double kNormTol = 1e-12;
constexpr double kHermTol = 1e-12;
constexpr double kTraceTol = 1e-12;
constexpr double kEigTol = 1e-10;
constexpr double kClipFloor = 1e-14;

CMat psd_sqrt(const CMat& m) {
    Eigen::SelfAdjointEigenSolver<CMat> es(m);
    // sqrt would blow eigenvalue roundoff up to ~1e-8
    Eigen::VectorXd root = es.eigenvalues();
    for (Eigen::Index k = 0; k < root.size(); ++k) root(k) = root(k) > kClipFloor ? std::sqrt(root(k)) : 0.0;
    return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

TwoPhotonPureState::TwoPhotonPureState(const CVec& amplitudes) : c_(amplitudes) {
    if (c_.size() != 4)
        throw Error(ErrorKind::NotNormalized, "two-photon state needs 4 amplitudes");
    const double n2 = c_.squaredNorm();
    if (std::abs(n2 - 1.0) > kNormTol)
        throw Error(ErrorKind::NotNormalized, "sum |C_ij|^2 = " + std::to_string(n2));
}

TwoPhotonDensityMatrix::TwoPhotonDensityMatrix(const CMat& m) {
    if (m.rows() != 4 || m.cols() != 4)
        throw Error(ErrorKind::NonPhysicalInput, "density matrix must be 4x4");
    if (!m.allFinite()) throw Error(ErrorKind::NonPhysicalInput, "non-finite entries");
    const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kHermTol)
        throw Error(ErrorKind::NonPhysicalInput, "not Hermitian (deviation " + std::to_string(herm) + ")");
    const double tr = m.trace().real();
    if (std::abs(tr - 1.0) > kTraceTol)
        throw Error(ErrorKind::NonPhysicalInput, "trace " + std::to_string(tr));
    CMat h = (m + m.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<CMat> es(h);
    const double lo = es.eigenvalues().minCoeff();
    if (lo < -kEigTol)
        throw Error(ErrorKind::NonPhysicalInput, "negative eigenvalue " + std::to_string(lo));
    // Roundoff-sized negatives are left alone so exact inputs stay bit-exact.
    if (lo < -kClipFloor) {
        Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
        lam /= lam.sum();
        h = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
        h = (h + h.adjoint()).eval() / 2.0;
    }
    m_ = std::move(h);
}

TwoPhotonDensityMatrix::Spectrum TwoPhotonDensityMatrix::spectrum() const {
    Eigen::SelfAdjointEigenSolver<CMat> es(m_);
    return {es.eigenvalues().cwiseMax(0.0), es.eigenvectors()};
}

TwoPhotonDensityMatrix density_from_pure(const TwoPhotonPureState& s) {
    const CVec& c = s.amplitudes();
    return TwoPhotonDensityMatrix(c * c.adjoint());
}

TwoPhotonPureState random_pure(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    CVec c(4);
    for (int k = 0; k < 4; ++k) {
        const double re = normal(rng);
        const double im = normal(rng);
        c(k) = cplx(re, im);
    }
    return TwoPhotonPureState(c / c.norm());
}

TwoPhotonDensityMatrix random_mixed(std::uint64_t seed, int rank) {
    if (rank < 1 || rank > 4)
        throw Error(ErrorKind::InvalidStateSpec, "rank must be in [1,4]");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);
    CMat m = CMat::Zero(4, 4);
    std::vector<double> w(rank);
    std::vector<CVec> kets(rank);
    for (int r = 0; r < rank; ++r) {
        CVec c(4);
        for (int k = 0; k < 4; ++k) {
            const double re = normal(rng);
            const double im = normal(rng);
            c(k) = cplx(re, im);
        }
        kets[r] = c / c.norm();
        w[r] = expo(rng);
    }
    double total = 0.0;
    for (double x : w) total += x;
    for (int r = 0; r < rank; ++r) m += (w[r] / total) * kets[r] * kets[r].adjoint();
    m = (m + m.adjoint()).eval() / 2.0;
    m /= m.trace().real();
    return TwoPhotonDensityMatrix(m);
}

TwoPhotonPureState bell_phi_plus() {
    CVec c = CVec::Zero(4);
    c(0) = c(3) = 1.0 / std::sqrt(2.0);
    return TwoPhotonPureState(c);
}

TwoPhotonDensityMatrix fixture(const std::string& name) {
    const double r = 1.0 / std::sqrt(2.0);
    auto pure = [](CVec c) { return density_from_pure(TwoPhotonPureState(c)); };
    CVec c = CVec::Zero(4);
    if (name == "bell-phi-plus") return density_from_pure(bell_phi_plus());
    if (name == "bell-phi-minus") {
        c(0) = r;
        c(3) = -r;
        return pure(c);
    }
    if (name == "bell-psi-plus") {
        c(1) = c(2) = r;
        return pure(c);
    }
    if (name == "bell-psi-minus") {
        c(1) = r;
        c(2) = -r;
        return pure(c);
    }
    if (name == "product-HH") return pure(ket(Rect::HH));
    if (name == "product-DD") return pure(ket(Diag::DD));
    if (name.rfind("werner(", 0) == 0 && name.back() == ')') {
        const std::string arg = name.substr(7, name.size() - 8);
        std::istringstream is(arg);
        is.imbue(std::locale::classic());
        double p = 0.0;
        if (!(is >> p) || !is.eof() || p < 0.0 || p > 1.0)
            throw Error(ErrorKind::InvalidStateSpec, "werner parameter must be in [0,1]: " + arg);
        CMat phi = density_from_pure(bell_phi_plus()).matrix();
        return TwoPhotonDensityMatrix(p * phi + (1.0 - p) * CMat::Identity(4, 4) / 4.0);
    }
    throw Error(ErrorKind::InvalidStateSpec, "unknown fixture '" + name + "'");
}

TwoPhotonDensityMatrix StateSpec::density() const {
    struct Visitor {
        TwoPhotonDensityMatrix operator()(const Fixture& f) const { return fixture(f.name); }
        TwoPhotonDensityMatrix operator()(const Pure& p) const {
            return density_from_pure(TwoPhotonPureState(p.amplitudes));
        }
        TwoPhotonDensityMatrix operator()(const Mixed& m) const { return TwoPhotonDensityMatrix(m.matrix); }
        TwoPhotonDensityMatrix operator()(const RandomPure& r) const {
            return density_from_pure(random_pure(r.seed));
        }
        TwoPhotonDensityMatrix operator()(const RandomMixed& r) const { return random_mixed(r.seed, r.rank); }
    };
    return std::visit(Visitor{}, payload);
}

double fidelity(const TwoPhotonDensityMatrix& a, const TwoPhotonDensityMatrix& b) {
    // Tr sqrt(sqrt(a) b sqrt(a)) is the trace norm of sqrt(a) sqrt(b).
    const CMat prod = psd_sqrt(a.matrix()) * psd_sqrt(b.matrix());
    const double root_trace = Eigen::JacobiSVD<CMat>(prod).singularValues().sum();
    return std::clamp(root_trace * root_trace, 0.0, 1.0);
}

double trace_distance(const TwoPhotonDensityMatrix& a, const TwoPhotonDensityMatrix& b) {
    CMat diff = a.matrix() - b.matrix();
    diff = (diff + diff.adjoint()).eval() / 2.0;
    Eigen::SelfAdjointEigenSolver<CMat> es(diff, Eigen::EigenvaluesOnly);
    return std::clamp(0.5 * es.eigenvalues().cwiseAbs().sum(), 0.0, 1.0);
}

CVec fix_global_phase(const CVec& v) {
    if (v.size() == 0) return v;
    const double top = v.cwiseAbs().maxCoeff();
    if (top == 0.0) return v;
    Eigen::Index lead = 0;
    while (std::abs(v(lead)) < top - 1e-12) ++lead;
    const cplx phase = std::conj(v(lead)) / std::abs(v(lead));
    CVec out = v * phase;
    out(lead) = std::abs(out(lead));
    return out;
}

CVec reconstruct_pure_qubit(const CVec& psi, const CVec& alpha) {
    if (psi.size() != 2 || alpha.size() != 2)
        throw Error(ErrorKind::InvalidConfig, "qubit reconstruction needs 2-dim kets");
    const cplx overlap = alpha.dot(psi);  // <alpha|psi>
    if (std::abs(overlap) < 1e-12)
        throw Error(ErrorKind::OrthogonalPostselection, "|<alpha|psi>| below 1e-12");
    CVec out(2);
    for (int i = 0; i < 2; ++i) {
        const CVec basis = qubit::rect(i);
        const cplx alpha_i = alpha.dot(basis);  // <alpha|i>
        if (std::abs(alpha_i) < 1e-12)
            throw Error(ErrorKind::InvalidConfig, "postselection must overlap every basis ket");
        const cplx weak = alpha_i * basis.dot(psi) / overlap;  // <alpha|pi_i|psi>/<alpha|psi>
        // c_i = nu_i <pi_i>_w with nu_i = <alpha|psi>/<alpha|i>; the common
        // factor <alpha|psi> is dropped and restored by normalization.
        out(i) = weak / alpha_i;
    }
    return fix_global_phase(out / out.norm());
}

}  // namespace weaktomo
