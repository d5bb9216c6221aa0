#pragma once

#include <array>
#include <numbers>
#include <optional>

#include "weaktomo/hilbert.hpp"
#include "weaktomo/states.hpp"
#include "weaktomo/statistics.hpp"
#include "weaktomo/tomography.hpp"

namespace weaktomo {

// Path pointer mu|up,down> + eta|down,up>.
struct PathPointerState {
    cplx mu;
    cplx eta;

    PathPointerState(cplx mu, cplx eta);
    // Real amplitudes with mu = sqrt(1 - eta^2).
    static PathPointerState weak(double eta);
};

// Coupling strength g; s = exp(-ig) - 1 is always derived from g.
class Coupling {
public:
    explicit Coupling(double g) : g_(g) {}
    double g() const { return g_; }
    cplx s() const { return std::exp(-kI * g_) - 1.0; }

private:
    double g_;
};

// Modular values of pi_i^1 + pi_j^2, pi_i^1 and pi_j^2 for one (ij, ab) setting.
struct ModularValueSet {
    cplx m_sum;
    cplx m_1;
    cplx m_2;
};

// Which of the three path-conditioned interactions is switched on.
enum class Interaction { Joint = 1, First = 2, Second = 3 };

struct ReadoutProbabilities {
    double p_re;
    double p_im;
};

enum class Estimator { FirstOrder, ExactInversion };

double postselection_probability(const TwoPhotonDensityMatrix& rho, Diag ab);

// <ab| op rho |ab> / <ab| rho |ab>; OrthogonalPostselection when p_ab <= 1e-12.
cplx weak_value(const TwoPhotonDensityMatrix& rho, const CMat& op, Diag ab);
cplx weak_value_joint(const TwoPhotonDensityMatrix& rho, Rect ij, Diag ab);

// <ab| exp(-igF) rho |ab> / <ab| rho |ab>, with the exponential taken
// spectrally (not through the projector identity).
cplx modular_value(const TwoPhotonDensityMatrix& rho, const CMat& observable, Diag ab, double g);
ModularValueSet modular_values(const TwoPhotonDensityMatrix& rho, Rect ij, Diag ab, const Coupling& c);

// s^-2 (m_sum - m_1 - m_2 + 1). DegenerateCoupling when |s| <= 1e-9.
cplx modular_to_weak(const ModularValueSet& mv, const Coupling& c);

// 16-dim path (x) polarization evolution for one interaction.
CMat interaction_unitary(double g, Rect ij, Interaction which);

// Normalized pointer state over (|up,down>, |down,up>) after the interaction
// and postselection on |ab>.
CVec evolve_and_postselect(const TwoPhotonPureState& psi, const PathPointerState& pointer, double g, Rect ij,
                           Diag ab, Interaction which);
// Mixed preselection: eigenbranches evolved separately, mixed by weight.
// Returns the normalized 2x2 pointer density in the same basis.
CMat evolve_and_postselect(const TwoPhotonDensityMatrix& rho, const PathPointerState& pointer, double g, Rect ij,
                           Diag ab, Interaction which);

// Projections onto (|ud> + |du>)/sqrt2 and (|ud> + i|du>)/sqrt2.
ReadoutProbabilities readout_probabilities(const CVec& pointer_final);
ReadoutProbabilities readout_probabilities(const CMat& pointer_density);

// Postselection rate with the interaction on, divided by the rate with it
// off: |mu|^2 + |eta|^2 <ab|U rho U^+|ab> / <ab|rho|ab>.
double postselection_rate_ratio(const TwoPhotonDensityMatrix& rho, const PathPointerState& pointer, double g,
                                Rect ij, Diag ab, Interaction which);

// Exact inversion takes the root continuous at p -> 1/2 unless `rate_ratio`
// indicates |eta m / mu| > 1, in which case the reciprocal root is used.
cplx estimate_modular_from_probabilities(const ReadoutProbabilities& p, const PathPointerState& pointer,
                                         Estimator mode, std::optional<double> rate_ratio = std::nullopt);

// term[ij][ab] = p_ab * <pi_ij>_w(ab); nullopt where the weak value could not
// be estimated.
struct WeakValueTable {
    std::array<double, 4> p{};
    std::array<std::array<std::optional<cplx>, 4>, 4> term{};
};

// Noiseless modular-value route. Terms with p_ab <= 1e-12 use the finite
// numerator <ab|pi_ij rho|ab> directly.
WeakValueTable exact_weak_table(const TwoPhotonDensityMatrix& rho, const Coupling& c);

// Simulated pointer readout. With a shot plan, p_ab and every analyzer
// probability are replaced by binomial estimates.
WeakValueTable probability_weak_table(const TwoPhotonDensityMatrix& rho, const Coupling& c,
                                      const PathPointerState& pointer, Estimator estimator,
                                      const ShotPlan* plan = nullptr);

// rho_{ij,kl} = sum_ab p_ab <ab|kl>/<ab|ij> <pi_ij>_w(ab)
std::optional<cplx> assemble_element_rect(const WeakValueTable& t, Rect ij, Rect kl);
// rho_{ab,a'b'} = sum_ij p_a'b' <ab|ij>/<a'b'|ij> <pi_ij>_w(a'b')
std::optional<cplx> assemble_element_diag(const WeakValueTable& t, Diag ab, Diag ab2);

enum class Method1Mode { Exact, Probability };
// Aprime/Bprime assemble the full matrix in that basis; PureDD rebuilds a pure
// state from the |DD> postselection alone.
enum class Method1Target { Aprime, Bprime, PureDD };

struct Method1Config {
    double g = std::numbers::pi / 2.0;
    double eta = 1e-2;
    Method1Mode mode = Method1Mode::Probability;
    Method1Target target = Method1Target::Aprime;
    Estimator estimator = Estimator::ExactInversion;
    std::optional<ShotPlan> shots;
    std::uint64_t seed = 0;
};

// Throws InvalidConfig / DegenerateCoupling; called before any computation.
void validate(const Method1Config& cfg);
nlohmann::json params_json(const Method1Config& cfg);

RawEstimate estimate_method1(const TwoPhotonDensityMatrix& rho, const Method1Config& cfg);
ReconstructionReport reconstruct_method1(const TwoPhotonDensityMatrix& rho, const Method1Config& cfg);
ReconstructionReport reconstruct_method1(const StateSpec& spec, const Method1Config& cfg);

std::string_view name(Method1Mode m);
std::string_view name(Method1Target t);
std::string_view name(Estimator e);

}  // namespace weaktomo
