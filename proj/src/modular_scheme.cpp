#include "weaktomo/modular_scheme.hpp"

#include <cmath>
#include <string>

#include "weaktomo/errors.hpp"
#include "weaktomo/json_io.hpp"

namespace weaktomo {

namespace {

constexpr double kMinPostselection = 1e-12;

// Path basis of the two photons: index 2 * (photon 1) + (photon 2), up = 0, down = 1.
constexpr int kUpDown = 1;
constexpr int kDownUp = 2;

CMat path_projector(int photon, int level) {
    CMat single = CMat::Zero(2, 2);
    single(level, level) = 1.0;
    return photon == 1 ? tensor(single, CMat::Identity(2, 2)) : tensor(CMat::Identity(2, 2), single);
}

CMat single_projector(const CVec& k) { return k * k.adjoint(); }

std::string_view interaction_label(Interaction w) {
    switch (w) {
        case Interaction::Joint: return "joint";
        case Interaction::First: return "first";
        case Interaction::Second: return "second";
    }
    return "?";
}

// Unnormalized postselected pointer amplitudes (|ud>, |du>) for one system ket.
CVec postselected_pointer(const CVec& system, const PathPointerState& pointer, const CMat& u, Diag ab) {
    CVec path = CVec::Zero(4);
    path(kUpDown) = pointer.mu;
    path(kDownUp) = pointer.eta;
    const CVec out = u * tensor(path, system);
    const CVec& post = ket(ab);
    CVec amps(2);
    amps(0) = post.dot(out.segment(kUpDown * 4, 4));
    amps(1) = post.dot(out.segment(kDownUp * 4, 4));
    return amps;
}

}  // namespace

PathPointerState::PathPointerState(cplx mu_, cplx eta_) : mu(mu_), eta(eta_) {
    const double n2 = std::norm(mu) + std::norm(eta);
    if (std::abs(n2 - 1.0) > 1e-12)
        throw Error(ErrorKind::NotNormalized, "|mu|^2 + |eta|^2 = " + std::to_string(n2));
}

PathPointerState PathPointerState::weak(double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw Error(ErrorKind::InvalidConfig, "eta must lie in [0, 1]");
    return PathPointerState(std::sqrt(1.0 - eta * eta), eta);
}

double postselection_probability(const TwoPhotonDensityMatrix& rho, Diag ab) {
    const CVec& k = ket(ab);
    return k.dot(rho.matrix() * k).real();
}

cplx weak_value(const TwoPhotonDensityMatrix& rho, const CMat& op, Diag ab) {
    const double p = postselection_probability(rho, ab);
    if (p <= kMinPostselection)
        throw Error(ErrorKind::OrthogonalPostselection,
                    "postselection " + std::string(name(ab)) + " has probability " + std::to_string(p));
    const CVec& k = ket(ab);
    return k.dot(op * rho.matrix() * k) / p;
}

cplx weak_value_joint(const TwoPhotonDensityMatrix& rho, Rect ij, Diag ab) {
    return weak_value(rho, projector(ij), ab);
}

cplx modular_value(const TwoPhotonDensityMatrix& rho, const CMat& observable, Diag ab, double g) {
    return weak_value(rho, unitary_exp(observable, g), ab);
}

ModularValueSet modular_values(const TwoPhotonDensityMatrix& rho, Rect ij, Diag ab, const Coupling& c) {
    const CMat pi1 = photon1(single_projector(qubit::rect(first(ij))));
    const CMat pi2 = photon2(single_projector(qubit::rect(second(ij))));
    return {modular_value(rho, pi1 + pi2, ab, c.g()), modular_value(rho, pi1, ab, c.g()),
            modular_value(rho, pi2, ab, c.g())};
}

cplx modular_to_weak(const ModularValueSet& mv, const Coupling& c) {
    const cplx s = c.s();
    if (std::abs(s) <= 1e-9)
        throw Error(ErrorKind::DegenerateCoupling, "g = " + std::to_string(c.g()) + " is a multiple of 2 pi");
    return (mv.m_sum - mv.m_1 - mv.m_2 + 1.0) / (s * s);
}

CMat interaction_unitary(double g, Rect ij, Interaction which) {
    const CMat pi1 = photon1(single_projector(qubit::rect(first(ij))));
    const CMat pi2 = photon2(single_projector(qubit::rect(second(ij))));
    // Photon 1 couples when it travels the lower path, photon 2 on the upper one.
    const CMat h1 = tensor(path_projector(1, 1), pi1);
    const CMat h2 = tensor(path_projector(2, 0), pi2);
    CMat h;
    switch (which) {
        case Interaction::Joint: h = h1 + h2; break;
        case Interaction::First: h = h1; break;
        case Interaction::Second: h = h2; break;
    }
    return unitary_exp(h, g);
}

CVec evolve_and_postselect(const TwoPhotonPureState& psi, const PathPointerState& pointer, double g, Rect ij,
                           Diag ab, Interaction which) {
    const double p = std::norm(ket(ab).dot(psi.amplitudes()));
    if (p <= kMinPostselection)
        throw Error(ErrorKind::OrthogonalPostselection, "<ab|Psi> vanishes for " + std::string(name(ab)));
    const CVec amps = postselected_pointer(psi.amplitudes(), pointer, interaction_unitary(g, ij, which), ab);
    return amps / amps.norm();
}

namespace {

// Unnormalized; its trace is the postselection rate with the interaction on.
CMat postselected_pointer_density(const TwoPhotonDensityMatrix& rho, const PathPointerState& pointer, double g,
                                  Rect ij, Diag ab, Interaction which) {
    if (postselection_probability(rho, ab) <= kMinPostselection)
        throw Error(ErrorKind::OrthogonalPostselection, "<ab|rho|ab> vanishes for " + std::string(name(ab)));
    const CMat u = interaction_unitary(g, ij, which);
    const auto spec = rho.spectrum();
    CMat out = CMat::Zero(2, 2);
    for (Eigen::Index k = 0; k < spec.values.size(); ++k) {
        if (spec.values(k) <= 0.0) continue;
        const CVec amps = postselected_pointer(spec.vectors.col(k), pointer, u, ab);
        out += spec.values(k) * amps * amps.adjoint();
    }
    return out;
}

}  // namespace

CMat evolve_and_postselect(const TwoPhotonDensityMatrix& rho, const PathPointerState& pointer, double g, Rect ij,
                           Diag ab, Interaction which) {
    const CMat out = postselected_pointer_density(rho, pointer, g, ij, ab, which);
    return out / out.trace().real();
}

double postselection_rate_ratio(const TwoPhotonDensityMatrix& rho, const PathPointerState& pointer, double g,
                                Rect ij, Diag ab, Interaction which) {
    return postselected_pointer_density(rho, pointer, g, ij, ab, which).trace().real() /
           postselection_probability(rho, ab);
}

ReadoutProbabilities readout_probabilities(const CVec& pointer_final) {
    return readout_probabilities(CMat(pointer_final * pointer_final.adjoint()));
}

ReadoutProbabilities readout_probabilities(const CMat& rho) {
    const double r = 1.0 / std::sqrt(2.0);
    CVec re(2), im(2);
    re << r, r;
    im << r, kI * r;
    return {re.dot(rho * re).real(), im.dot(rho * im).real()};
}

cplx estimate_modular_from_probabilities(const ReadoutProbabilities& p, const PathPointerState& pointer,
                                         Estimator mode, std::optional<double> rate_ratio) {
    if (pointer.eta == 0.0) throw Error(ErrorKind::DegeneratePointer, "eta must be nonzero");
    // p - 1/2 measures the pointer coherence <du|Phi><Phi|ud>.
    const cplx coherence(p.p_re - 0.5, p.p_im - 0.5);
    const cplx scale = pointer.mu / pointer.eta;
    if (mode == Estimator::FirstOrder) return scale * coherence;
    // |coherence| = x / (1 + x^2) with x = |eta m / mu|; r = x^2 solves
    // r = c (1 + r)^2, and the root continuous at c -> 0 is taken.
    const double c = std::norm(coherence);
    const double disc = 1.0 - 4.0 * c;
    if (!(disc > 0.0))
        throw Error(ErrorKind::InversionOutOfRange,
                    "(2p_re-1)^2 + (2p_im-1)^2 = " + std::to_string(4.0 * c) + " >= 1");
    double r = 2.0 * c / ((1.0 - 2.0 * c) + std::sqrt(disc));
    if (rate_ratio && r > 0.0) {
        // rate_ratio = |mu|^2 (1 + x^2), so it tells which side of x = 1 we are on.
        const double mu2 = std::norm(pointer.mu);
        if ((*rate_ratio - mu2) / mu2 > 1.0) r = 1.0 / r;
    }
    return scale * coherence * (1.0 + r);
}

WeakValueTable exact_weak_table(const TwoPhotonDensityMatrix& rho, const Coupling& c) {
    WeakValueTable t;
    for (Diag ab : kDiag) {
        t.p[index(ab)] = postselection_probability(rho, ab);
        for (Rect ij : kRect) {
            cplx term;
            if (t.p[index(ab)] <= kMinPostselection) {
                const CVec& k = ket(ab);
                term = k.dot(projector(ij) * rho.matrix() * k);
            } else {
                term = t.p[index(ab)] * modular_to_weak(modular_values(rho, ij, ab, c), c);
            }
            t.term[index(ij)][index(ab)] = term;
        }
    }
    return t;
}

WeakValueTable probability_weak_table(const TwoPhotonDensityMatrix& rho, const Coupling& c,
                                      const PathPointerState& pointer, Estimator estimator,
                                      const ShotPlan* plan) {
    WeakValueTable t;
    auto measure = [plan](double p, const std::string& label) {
        if (!plan) return p;
        const long long n = plan->shots_for(label);
        auto rng = substream(plan->seed, label);
        return sample_bernoulli(p, n, rng, label).estimate();
    };
    for (Diag ab : kDiag) {
        const std::string ab_name(name(ab));
        const double p_true = postselection_probability(rho, ab);
        const double p = measure(std::clamp(p_true, 0.0, 1.0), "m1/p/" + ab_name);
        t.p[index(ab)] = p;
        for (Rect ij : kRect) {
            if (p <= kMinPostselection) {
                // No postselected events: the term carries zero weight.
                t.term[index(ij)][index(ab)] = cplx(0.0);
                continue;
            }
            const std::string prefix = "m1/" + std::string(name(ij)) + "/" + ab_name + "/";
            std::array<cplx, 3> m{};
            bool ok = true;
            for (Interaction which : {Interaction::Joint, Interaction::First, Interaction::Second}) {
                const CMat unnorm = postselected_pointer_density(rho, pointer, c.g(), ij, ab, which);
                const double rate = unnorm.trace().real();
                ReadoutProbabilities probs = readout_probabilities(CMat(unnorm / rate));
                const std::string lbl = prefix + std::string(interaction_label(which));
                probs.p_re = measure(std::clamp(probs.p_re, 0.0, 1.0), lbl + "/re");
                probs.p_im = measure(std::clamp(probs.p_im, 0.0, 1.0), lbl + "/im");
                const double rate_ratio = measure(std::clamp(rate, 0.0, 1.0), lbl + "/rate") / p;
                try {
                    m[static_cast<int>(which) - 1] =
                        estimate_modular_from_probabilities(probs, pointer, estimator, rate_ratio);
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::InversionOutOfRange) throw;
                    ok = false;
                }
            }
            if (ok) t.term[index(ij)][index(ab)] = p * modular_to_weak({m[0], m[1], m[2]}, c);
        }
    }
    return t;
}

std::optional<cplx> assemble_element_rect(const WeakValueTable& t, Rect ij, Rect kl) {
    cplx sum = 0.0;
    for (Diag ab : kDiag) {
        const auto& term = t.term[index(ij)][index(ab)];
        if (!term) return std::nullopt;
        sum += *term * (ket(ab).dot(ket(kl)) / ket(ab).dot(ket(ij)));
    }
    return sum;
}

std::optional<cplx> assemble_element_diag(const WeakValueTable& t, Diag ab, Diag ab2) {
    cplx sum = 0.0;
    for (Rect ij : kRect) {
        const auto& term = t.term[index(ij)][index(ab2)];
        if (!term) return std::nullopt;
        sum += *term * (ket(ab).dot(ket(ij)) / ket(ab2).dot(ket(ij)));
    }
    return sum;
}

std::string_view name(Method1Mode m) { return m == Method1Mode::Exact ? "exact" : "probability"; }

std::string_view name(Method1Target t) {
    switch (t) {
        case Method1Target::Aprime: return "aprime";
        case Method1Target::Bprime: return "bprime";
        case Method1Target::PureDD: return "pure-dd";
    }
    return "?";
}

std::string_view name(Estimator e) { return e == Estimator::FirstOrder ? "first-order" : "exact-inversion"; }

void validate(const Method1Config& cfg) {
    if (!std::isfinite(cfg.g)) throw Error(ErrorKind::InvalidConfig, "g must be finite");
    if (std::abs(Coupling(cfg.g).s()) <= 1e-9)
        throw Error(ErrorKind::DegenerateCoupling, "g must not be a multiple of 2 pi");
    if (cfg.mode == Method1Mode::Probability) {
        if (cfg.eta == 0.0) throw Error(ErrorKind::InvalidConfig, "eta must be nonzero in probability mode");
        if (!(cfg.eta > 0.0 && cfg.eta < 1.0)) throw Error(ErrorKind::InvalidConfig, "eta must lie in (0, 1)");
    }
    if (cfg.shots) {
        if (cfg.mode != Method1Mode::Probability)
            throw Error(ErrorKind::InvalidConfig, "shot noise requires probability mode");
        cfg.shots->validate();
    }
}

nlohmann::json params_json(const Method1Config& cfg) {
    nlohmann::json j = {{"g", cfg.g},
                        {"eta", cfg.eta},
                        {"mode", name(cfg.mode)},
                        {"basis", name(cfg.target)},
                        {"estimator", name(cfg.estimator)},
                        {"seed", cfg.shots ? cfg.shots->seed : cfg.seed}};
    j["shots"] = cfg.shots ? json::shot_plan_to_json(*cfg.shots) : nlohmann::json(nullptr);
    return j;
}

RawEstimate estimate_method1(const TwoPhotonDensityMatrix& rho, const Method1Config& cfg) {
    validate(cfg);
    const Coupling coupling(cfg.g);
    WeakValueTable table;
    if (cfg.mode == Method1Mode::Exact) {
        table = exact_weak_table(rho, coupling);
    } else {
        const ShotPlan* plan = cfg.shots ? &*cfg.shots : nullptr;
        table = probability_weak_table(rho, coupling, PathPointerState::weak(cfg.eta), cfg.estimator, plan);
    }

    RawEstimate raw;
    switch (cfg.target) {
        case Method1Target::Aprime:
            raw.frame = Frame::Rect;
            for (Rect ij : kRect)
                for (Rect kl : kRect) {
                    const auto v = assemble_element_rect(table, ij, kl);
                    raw.available[index(ij)][index(kl)] = v.has_value();
                    raw.values(index(ij), index(kl)) = v.value_or(0.0);
                }
            break;
        case Method1Target::Bprime:
            raw.frame = Frame::Diag;
            for (Diag ab : kDiag)
                for (Diag ab2 : kDiag) {
                    const auto v = assemble_element_diag(table, ab, ab2);
                    raw.available[index(ab)][index(ab2)] = v.has_value();
                    raw.values(index(ab), index(ab2)) = v.value_or(0.0);
                }
            break;
        case Method1Target::PureDD: {
            // C_ij = chi <pi_ij>_w(DD); chi is constant because <DD|ij> = 1/2.
            raw.frame = Frame::Rect;
            const double p = table.p[index(Diag::DD)];
            if (p <= kMinPostselection) {
                for (auto& row : raw.available) row.fill(false);
                break;
            }
            CVec c(4);
            bool ok = true;
            for (Rect ij : kRect) {
                const auto& term = table.term[index(ij)][index(Diag::DD)];
                ok = ok && term.has_value();
                c(index(ij)) = term.value_or(0.0) / p;
            }
            if (!ok || c.norm() == 0.0) {
                for (auto& row : raw.available) row.fill(false);
                break;
            }
            c = fix_global_phase(c / c.norm());
            raw.values = c * c.adjoint();
            break;
        }
    }
    return raw;
}

ReconstructionReport reconstruct_method1(const TwoPhotonDensityMatrix& rho, const Method1Config& cfg) {
    return build_report("method1", estimate_method1(rho, cfg), rho, params_json(cfg));
}

ReconstructionReport reconstruct_method1(const StateSpec& spec, const Method1Config& cfg) {
    validate(cfg);
    nlohmann::json params = params_json(cfg);
    params["state"] = json::state_spec_to_json(spec);
    const TwoPhotonDensityMatrix rho = spec.density();
    return build_report("method1", estimate_method1(rho, cfg), rho, std::move(params));
}

}  // namespace weaktomo
