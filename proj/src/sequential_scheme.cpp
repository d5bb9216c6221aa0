#include "weaktomo/sequential_scheme.hpp"

#include <cmath>
#include <string>

#include "weaktomo/errors.hpp"
#include "weaktomo/json_io.hpp"
#include "weaktomo/pointer_sampling.hpp"

namespace weaktomo {

namespace {

constexpr double kMinWeight = 1e-12;
// Sub-branches lighter than this (relative squared norm) are dropped.
constexpr double kDropBranch = 1e-30;

CMat single_projector(const CVec& k) { return k * k.adjoint(); }

std::string setting_prefix(Rect ij, Rect kl) {
    return "m2/" + std::string(name(ij)) + "/" + std::string(name(kl)) + "/";
}

}  // namespace

void GaussianPointerConfig::validate() const {
    if (!(std::isfinite(sigma) && sigma > 0.0)) throw Error(ErrorKind::InvalidConfig, "sigma must be positive");
    if (!(std::isfinite(g) && g >= 0.0)) throw Error(ErrorKind::InvalidConfig, "g must be non-negative");
}

GaussianBranchEnsemble prepare(const TwoPhotonDensityMatrix& rho, double sigma) {
    if (!(sigma > 0.0)) throw Error(ErrorKind::InvalidConfig, "sigma must be positive");
    GaussianBranchEnsemble e;
    e.sigma = sigma;
    const auto spec = rho.spectrum();
    for (Eigen::Index k = spec.values.size() - 1; k >= 0; --k) {
        if (spec.values(k) <= kMinWeight) continue;
        e.components.push_back({spec.values(k), {Branch{spec.vectors.col(k), {}}}});
    }
    if (e.components.empty()) throw Error(ErrorKind::NonPhysicalInput, "density matrix has no support");
    return e;
}

GaussianBranchEnsemble couple_weak(const GaussianBranchEnsemble& e, const CMat& proj, Coord coord, double g) {
    GaussianBranchEnsemble out;
    out.sigma = e.sigma;
    const int c = static_cast<int>(coord);
    for (const auto& comp : e.components) {
        MixtureComponent next{comp.weight, {}};
        for (const auto& b : comp.branches) {
            const double n2 = b.ket.squaredNorm();
            CVec kicked = proj * b.ket;
            CVec rest = b.ket - kicked;
            if (kicked.squaredNorm() > kDropBranch * n2) {
                Branch nb{std::move(kicked), b.shift};
                nb.shift[c] += g;
                next.branches.push_back(std::move(nb));
            }
            if (rest.squaredNorm() > kDropBranch * n2) next.branches.push_back({std::move(rest), b.shift});
        }
        out.components.push_back(std::move(next));
    }
    return out;
}

cplx gaussian_matrix_element(double d, double dprime, Quadrature kind, double sigma) {
    const double delta = d - dprime;
    const double overlap = std::exp(-delta * delta / (8.0 * sigma * sigma));
    switch (kind) {
        case Quadrature::Unit: return overlap;
        case Quadrature::Position: return overlap * 0.5 * (d + dprime);
        case Quadrature::Momentum: return overlap * kI * kHbar * delta / (4.0 * sigma * sigma);
        case Quadrature::Lowering: return overlap * dprime;
    }
    return 0.0;
}

cplx trace_moment(const GaussianBranchEnsemble& e, const CMat& system_op,
                  const std::array<Quadrature, kCoords>& ops) {
    cplx total = 0.0;
    for (const auto& comp : e.components) {
        cplx sum = 0.0;
        for (const auto& bra : comp.branches)
            for (const auto& k : comp.branches) {
                cplx term = bra.ket.dot(system_op * k.ket);
                if (term == 0.0) continue;
                for (int c = 0; c < kCoords; ++c)
                    term *= gaussian_matrix_element(bra.shift[c], k.shift[c], ops[c], e.sigma);
                sum += term;
            }
        total += comp.weight * sum;
    }
    return total;
}

double ensemble_norm(const GaussianBranchEnsemble& e) {
    return trace_moment(e, CMat::Identity(4, 4), {Quadrature::Unit, Quadrature::Unit, Quadrature::Unit,
                                                  Quadrature::Unit})
        .real();
}

double postselection_trace(const GaussianBranchEnsemble& e, Rect kl) {
    return trace_moment(e, projector(kl), {Quadrature::Unit, Quadrature::Unit, Quadrature::Unit, Quadrature::Unit})
        .real();
}

std::string pattern_name(Pattern p) {
    std::string s(kCoords, 'q');
    for (int c = 0; c < kCoords; ++c)
        if (p >> c & 1u) s[c] = 'p';
    return s;
}

std::array<Quadrature, kCoords> pattern_ops(Pattern p) {
    std::array<Quadrature, kCoords> ops{};
    for (int c = 0; c < kCoords; ++c) ops[c] = (p >> c & 1u) ? Quadrature::Momentum : Quadrature::Position;
    return ops;
}

cplx pattern_coefficient(Pattern p, double sigma) {
    cplx coef = 1.0;
    for (int c = 0; c < kCoords; ++c)
        if (p >> c & 1u) coef *= kI * 2.0 * sigma * sigma / kHbar;
    return coef;
}

cplx pattern_moment(const GaussianBranchEnsemble& e, Rect kl, Pattern p) {
    return trace_moment(e, projector(kl), pattern_ops(p));
}

cplx lowering_moment(const GaussianBranchEnsemble& e, Rect kl) {
    return trace_moment(e, projector(kl),
                        {Quadrature::Lowering, Quadrature::Lowering, Quadrature::Lowering, Quadrature::Lowering});
}

cplx combine_patterns(const std::array<cplx, kPatterns>& moments, double sigma) {
    cplx sum = 0.0;
    for (Pattern p = 0; p < kPatterns; ++p) sum += pattern_coefficient(p, sigma) * moments[p];
    return sum;
}

GaussianBranchEnsemble sequential_ensemble(const TwoPhotonDensityMatrix& rho, Rect ij, Diag ab,
                                           const GaussianPointerConfig& cfg) {
    cfg.validate();
    GaussianBranchEnsemble e = prepare(rho, cfg.sigma);
    e = couple_weak(e, photon1(single_projector(qubit::rect(first(ij)))), Coord::X1, cfg.g);
    e = couple_weak(e, photon2(single_projector(qubit::rect(second(ij)))), Coord::X2, cfg.g);
    e = couple_weak(e, photon1(single_projector(qubit::diag(first(ab)))), Coord::Y1, cfg.g);
    e = couple_weak(e, photon2(single_projector(qubit::diag(second(ab)))), Coord::Y2, cfg.g);
    return e;
}

cplx weak_average(const GaussianBranchEnsemble& after, Rect kl, const GaussianPointerConfig& cfg) {
    if (!(cfg.g > 0.0)) throw Error(ErrorKind::InvalidConfig, "g must be positive");
    return lowering_moment(after, kl) / std::pow(cfg.g, 4);
}

void validate(const Method2Config& cfg) {
    cfg.pointer.validate();
    if (cfg.pointer.g == 0.0) throw Error(ErrorKind::InvalidConfig, "g must be positive");
    if (cfg.pointer.g > cfg.pointer.sigma)
        throw Error(ErrorKind::CouplingTooStrong,
                    "g = " + std::to_string(cfg.pointer.g) + " exceeds sigma = " + std::to_string(cfg.pointer.sigma));
    if (cfg.shots) cfg.shots->validate();
}

nlohmann::json params_json(const Method2Config& cfg) {
    nlohmann::json j = {{"g", cfg.pointer.g},
                        {"sigma", cfg.pointer.sigma},
                        {"postselection_b", name(cfg.ab)},
                        {"mode", cfg.shots ? "sampled" : "analytic"},
                        {"seed", cfg.shots ? cfg.shots->seed : cfg.seed}};
    j["shots"] = cfg.shots ? json::shot_plan_to_json(*cfg.shots) : nlohmann::json(nullptr);
    return j;
}

namespace {

cplx overlap_factor(Rect ij, Rect kl, Diag ab) { return ket(kl).dot(ket(ab)) * ket(ab).dot(ket(ij)); }

}  // namespace

cplx reconstruct_element_method2(const TwoPhotonDensityMatrix& rho, Rect ij, Rect kl, const Method2Config& cfg) {
    validate(cfg);
    const auto e = sequential_ensemble(rho, ij, cfg.ab, cfg.pointer);
    return weak_average(e, kl, cfg.pointer) / overlap_factor(ij, kl, cfg.ab);
}

RawEstimate estimate_method2(const TwoPhotonDensityMatrix& rho, const Method2Config& cfg) {
    validate(cfg);
    RawEstimate raw;
    raw.frame = Frame::Rect;
    const double g4 = std::pow(cfg.pointer.g, 4);
    for (Rect ij : kRect) {
        const auto e = sequential_ensemble(rho, ij, cfg.ab, cfg.pointer);
        for (Rect kl : kRect) {
            cplx moment;
            if (!cfg.shots) {
                moment = lowering_moment(e, kl);
            } else {
                const PostselectedEnsemble post = postselect(e, kl);
                std::vector<PatternSamples> sets;
                for (Pattern p = 0; p < kPatterns; ++p) {
                    const std::string label = setting_prefix(ij, kl) + pattern_name(p);
                    auto rng = substream(cfg.shots->seed, label);
                    sets.push_back(simulate_pattern(post, p, cfg.shots->shots_for(label), rng));
                }
                moment = estimate_moments(sets, cfg.pointer.sigma).lowering.value;
            }
            raw.values(index(ij), index(kl)) = moment / g4 / overlap_factor(ij, kl, cfg.ab);
        }
    }
    return raw;
}

ReconstructionReport reconstruct_method2(const TwoPhotonDensityMatrix& rho, const Method2Config& cfg) {
    return build_report("method2", estimate_method2(rho, cfg), rho, params_json(cfg));
}

ReconstructionReport reconstruct_method2(const StateSpec& spec, const Method2Config& cfg) {
    validate(cfg);
    nlohmann::json params = params_json(cfg);
    params["state"] = json::state_spec_to_json(spec);
    const TwoPhotonDensityMatrix rho = spec.density();
    return build_report("method2", estimate_method2(rho, cfg), rho, std::move(params));
}

}  // namespace weaktomo
