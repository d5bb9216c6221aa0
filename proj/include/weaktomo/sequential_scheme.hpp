#pragma once

#include <array>
#include <optional>
#include <vector>

#include "weaktomo/hilbert.hpp"
#include "weaktomo/states.hpp"
#include "weaktomo/statistics.hpp"
#include "weaktomo/tomography.hpp"

namespace weaktomo {

// Simulation units: hbar = 1, so sigma_p = 1 / (2 sigma).
inline constexpr double kHbar = 1.0;

struct GaussianPointerConfig {
    double sigma = 1.0;
    double g = 1e-3;

    double sigma_p() const { return kHbar / (2.0 * sigma); }
    void validate() const;
};

// Pointer coordinates in the order (x1, y1, x2, y2).
enum class Coord { X1 = 0, Y1 = 1, X2 = 2, Y2 = 3 };
inline constexpr int kCoords = 4;
using Shift = std::array<double, kCoords>;

// Unit is the plain overlap; Lowering is x + i (2 sigma^2 / hbar) p.
enum class Quadrature { Unit, Position, Momentum, Lowering };

struct Branch {
    CVec ket;  // unnormalized system component
    Shift shift{};
};

struct MixtureComponent {
    double weight = 1.0;
    std::vector<Branch> branches;
};

struct GaussianBranchEnsemble {
    double sigma = 1.0;
    std::vector<MixtureComponent> components;
};

// One component per eigenvector of rho with eigenvalue > 1e-12, all
// branches undisplaced.
GaussianBranchEnsemble prepare(const TwoPhotonDensityMatrix& rho, double sigma);

// Impulsive kick: the eigenvalue-1 part of every branch moves by +g along
// `coord`. Empty sub-branches are dropped.
GaussianBranchEnsemble couple_weak(const GaussianBranchEnsemble& e, const CMat& proj, Coord coord, double g);

// <G(d)| O |G(d')> for a width-sigma Gaussian.
cplx gaussian_matrix_element(double d, double dprime, Quadrature kind, double sigma);

// Sum over components of weight * <Psi| op (x) O_1 O_2 O_3 O_4 |Psi>, with
// O_c the quadrature chosen for coordinate c.
cplx trace_moment(const GaussianBranchEnsemble& e, const CMat& system_op, const std::array<Quadrature, kCoords>& ops);

double ensemble_norm(const GaussianBranchEnsemble& e);

// Tr[pi_kl rho_f] with every pointer operator the identity.
double postselection_trace(const GaussianBranchEnsemble& e, Rect kl);

// Position/momentum choice per coordinate, bit c set = momentum on coordinate c.
using Pattern = unsigned;
inline constexpr Pattern kPatterns = 16;
std::string pattern_name(Pattern p);  // e.g. "qqpq"
std::array<Quadrature, kCoords> pattern_ops(Pattern p);
// Coefficient of this pattern in the expansion of a a a a.
cplx pattern_coefficient(Pattern p, double sigma);

cplx pattern_moment(const GaussianBranchEnsemble& e, Rect kl, Pattern p);
cplx lowering_moment(const GaussianBranchEnsemble& e, Rect kl);
// sum_p coefficient(p) * moments[p]
cplx combine_patterns(const std::array<cplx, kPatterns>& moments, double sigma);

// Pointer + system state after the four kicks for the (ij) setting:
// pi_i^1 -> x1, pi_j^2 -> x2, pi_alpha^1 -> y1, pi_beta^2 -> y2.
GaussianBranchEnsemble sequential_ensemble(const TwoPhotonDensityMatrix& rho, Rect ij, Diag ab,
                                           const GaussianPointerConfig& cfg);

// g^-4 Tr[pi_kl a_y2 a_y1 a_x2 a_x1 rho_f] (trace form, no renormalization).
cplx weak_average(const GaussianBranchEnsemble& after, Rect kl, const GaussianPointerConfig& cfg);

struct Method2Config {
    GaussianPointerConfig pointer;
    Diag ab = Diag::DD;
    std::optional<ShotPlan> shots;  // sampled pointer readout when set
    std::uint64_t seed = 0;
};

void validate(const Method2Config& cfg);
nlohmann::json params_json(const Method2Config& cfg);

// rho_ij,kl = weak_average / (<kl|ab><ab|ij>), i.e. 4 * weak_average for ab = DD.
cplx reconstruct_element_method2(const TwoPhotonDensityMatrix& rho, Rect ij, Rect kl, const Method2Config& cfg);

RawEstimate estimate_method2(const TwoPhotonDensityMatrix& rho, const Method2Config& cfg);
ReconstructionReport reconstruct_method2(const TwoPhotonDensityMatrix& rho, const Method2Config& cfg);
ReconstructionReport reconstruct_method2(const StateSpec& spec, const Method2Config& cfg);

}  // namespace weaktomo
