#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "weaktomo/hilbert.hpp"

namespace weaktomo {

// |Psi> = sum_ij C_ij |ij>, amplitudes in HH, HV, VH, VV order.
class TwoPhotonPureState {
public:
    explicit TwoPhotonPureState(const CVec& amplitudes);

    const CVec& amplitudes() const { return c_; }
    cplx operator[](Rect r) const { return c_(index(r)); }

private:
    CVec c_;
};

// 4x4 Hermitian, PSD, unit-trace. Eigenvalues down to -1e-10 are accepted
// and clipped on construction; anything worse throws NonPhysicalInput.
class TwoPhotonDensityMatrix {
public:
    explicit TwoPhotonDensityMatrix(const CMat& m);

    const CMat& matrix() const { return m_; }
    cplx operator()(Rect row, Rect col) const { return m_(index(row), index(col)); }

    // Spectral decomposition, eigenvalues ascending (clipped to >= 0).
    struct Spectrum {
        Eigen::VectorXd values;
        CMat vectors;
    };
    Spectrum spectrum() const;

private:
    CMat m_;
};

TwoPhotonDensityMatrix density_from_pure(const TwoPhotonPureState& s);

TwoPhotonPureState random_pure(std::uint64_t seed);
TwoPhotonDensityMatrix random_mixed(std::uint64_t seed, int rank);

// bell-phi-plus, bell-phi-minus, bell-psi-plus, bell-psi-minus, product-HH,
// product-DD, werner(p). Throws InvalidStateSpec for unknown names.
TwoPhotonDensityMatrix fixture(const std::string& name);
TwoPhotonPureState bell_phi_plus();

struct StateSpec {
    struct Fixture {
        std::string name;
    };
    struct Pure {
        CVec amplitudes;
    };
    struct Mixed {
        CMat matrix;
    };
    struct RandomPure {
        std::uint64_t seed;
    };
    struct RandomMixed {
        std::uint64_t seed;
        int rank;
    };
    std::variant<Fixture, Pure, Mixed, RandomPure, RandomMixed> payload;

    TwoPhotonDensityMatrix density() const;
};

double fidelity(const TwoPhotonDensityMatrix& a, const TwoPhotonDensityMatrix& b);
double trace_distance(const TwoPhotonDensityMatrix& a, const TwoPhotonDensityMatrix& b);

// Rotate the global phase so the largest-magnitude entry is real positive
// (first such entry within 1e-12 wins ties).
CVec fix_global_phase(const CVec& v);

// Rebuild a qubit state from its weak values <pi_i>_alpha; the result is
// normalized and phase-fixed.
CVec reconstruct_pure_qubit(const CVec& psi, const CVec& alpha);

}  // namespace weaktomo
