#pragma once

#include <array>
#include <complex>
#include <string_view>

#include <Eigen/Dense>

namespace weaktomo {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr cplx kI{0.0, 1.0};

// Two-photon polarization basis labels. Index = 2 * (photon 1) + (photon 2),
// with H = D = 0 and V = A = 1. Every 4x4 matrix in this library is ordered
// HH, HV, VH, VV.
enum class Rect : int { HH = 0, HV = 1, VH = 2, VV = 3 };
enum class Diag : int { DD = 0, DA = 1, AD = 2, AA = 3 };

inline constexpr std::array<Rect, 4> kRect{Rect::HH, Rect::HV, Rect::VH, Rect::VV};
inline constexpr std::array<Diag, 4> kDiag{Diag::DD, Diag::DA, Diag::AD, Diag::AA};

constexpr int index(Rect r) { return static_cast<int>(r); }
constexpr int index(Diag d) { return static_cast<int>(d); }
constexpr int first(Rect r) { return index(r) >> 1; }
constexpr int second(Rect r) { return index(r) & 1; }
constexpr int first(Diag d) { return index(d) >> 1; }
constexpr int second(Diag d) { return index(d) & 1; }

std::string_view name(Rect r);
std::string_view name(Diag d);
Rect parse_rect(std::string_view s);
Diag parse_diag(std::string_view s);

struct BasisPair {
    std::array<CVec, 4> aprime;  // |HH>, |HV>, |VH>, |VV>
    std::array<CVec, 4> bprime;  // |DD>, |DA>, |AD>, |AA>
};

namespace qubit {
CVec H();
CVec V();
CVec D();
CVec A();
// Single-photon rectilinear / diagonal ket by bit (0 -> H or D, 1 -> V or A).
CVec rect(int bit);
CVec diag(int bit);
}  // namespace qubit

// Kronecker product; row index = rows(b) * (row of a) + (row of b).
CMat tensor(const CMat& a, const CMat& b);
CVec tensor(const CVec& a, const CVec& b);

// |k><k|; throws NotNormalized when | ||k|| - 1 | > 1e-12.
CMat projector(const CVec& k);

const BasisPair& mub_bases();

inline const CVec& ket(Rect r) { return mub_bases().aprime[index(r)]; }
inline const CVec& ket(Diag d) { return mub_bases().bprime[index(d)]; }

// Joint projector pi_ij = |ij><ij| and the single-photon projectors lifted to
// the two-photon space: pi_i^1 = |i><i| (x) I, pi_j^2 = I (x) |j><j|.
CMat projector(Rect r);
CMat projector(Diag d);
CMat photon1(const CMat& single);
CMat photon2(const CMat& single);

// Columns are the B' kets expressed in A' coordinates, so rho_A = W rho_B W^+.
CMat diag_to_rect();

// exp(-i g F) for Hermitian F.
CMat unitary_exp(const CMat& hermitian, double g);

}  // namespace weaktomo
