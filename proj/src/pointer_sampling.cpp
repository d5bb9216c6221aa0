#include "weaktomo/pointer_sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "weaktomo/errors.hpp"

namespace weaktomo {

namespace {

constexpr double kMinAcceptance = 1e-4;
constexpr long long kAcceptanceWindow = 100000;

double normal_pdf(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

// The span of G(q - a) and G(q - b) for one coordinate, orthonormalized as
// u0 = G_a and u1 = (G_b - kappa G_a) / sqrt(1 - kappa^2), written in the
// position or momentum representation.
class CoordinateModes {
public:
    CoordinateModes(std::vector<double> values, bool momentum, double sigma)
        : values_(std::move(values)), momentum_(momentum), sigma_(sigma) {
        width_ = momentum_ ? kHbar / (2.0 * sigma_) : sigma_;
        amp_norm_ = std::pow(2.0 * std::numbers::pi * width_ * width_, -0.25);
        inv4w2_ = 1.0 / (4.0 * width_ * width_);
        if (values_.size() == 2) {
            const double delta = values_[1] - values_[0];
            kappa_ = std::exp(-delta * delta / (8.0 * sigma_ * sigma_));
            kappa_gap_ = -std::expm1(-delta * delta / (8.0 * sigma_ * sigma_));
            norm1_ = std::sqrt(-std::expm1(-delta * delta / (4.0 * sigma_ * sigma_)));
            center1_ = momentum_ ? 0.0 : 0.5 * (values_[0] + values_[1]);
            sd1_ = std::sqrt(3.0) * width_ + (momentum_ ? 0.0 : 0.5 * std::abs(delta));
            bound1_ = 1.05 * sup_ratio(delta);
        }
    }

    int modes() const { return int(values_.size()); }

    // Coefficients of G(q - values[v]) on (u0, u1).
    std::array<double, 2> expand(int v) const {
        if (v == 0) return {1.0, 0.0};
        return {kappa_, norm1_};
    }

    int value_index(double d) const {
        for (int v = 0; v < modes(); ++v)
            if (values_[v] == d) return v;
        return -1;
    }

    std::array<cplx, 2> amplitudes(double q) const {
        const double a = values_[0];
        std::array<cplx, 2> u{};
        if (!momentum_) {
            const double g0 = amp_norm_ * std::exp(-(q - a) * (q - a) * inv4w2_);
            u[0] = g0;
            if (modes() == 2) {
                const double b = values_[1];
                // G_b / G_a = exp(x); G_b - kappa G_a = G_a kappa expm1(x - log kappa).
                const double x = -(a - b) * (2.0 * q - a - b) / (4.0 * sigma_ * sigma_);
                const double logk = -(b - a) * (b - a) / (8.0 * sigma_ * sigma_);
                u[1] = g0 * kappa_ * std::expm1(x - logk) / norm1_;
            }
        } else {
            const double phi = amp_norm_ * std::exp(-q * q * inv4w2_);
            const cplx phase_a = std::exp(-kI * q * a / kHbar);
            u[0] = phi * phase_a;
            if (modes() == 2) {
                const double theta = q * (values_[1] - a) / kHbar;
                const double s = std::sin(0.5 * theta);
                // exp(-i theta) - kappa, split to keep precision for small theta
                const cplx diff(-2.0 * s * s + kappa_gap_, -std::sin(theta));
                u[1] = phi * phase_a * diff / norm1_;
            }
        }
        return u;
    }

    // Envelope density for mode v given the amplitudes at q; integrates to bound(v).
    double envelope(int v, double q, const std::array<cplx, 2>& u) const {
        if (v == 0) return std::norm(u[0]);
        return bound1_ * normal_pdf(q, center1_, sd1_);
    }
    double bound(int v) const { return v == 0 ? 1.0 : bound1_; }

    double draw(int v, std::mt19937_64& rng, std::normal_distribution<double>& n01) const {
        if (v == 0) return (momentum_ ? 0.0 : values_[0]) + width_ * n01(rng);
        return center1_ + sd1_ * n01(rng);
    }

private:
    double sup_ratio(double delta) const {
        double step = sd1_ / 100.0;
        if (momentum_ && delta != 0.0) step = std::min(step, 2.0 * std::numbers::pi * kHbar / std::abs(delta) / 64.0);
        double best = 0.0;
        for (double q = center1_ - 14.0 * sd1_; q <= center1_ + 14.0 * sd1_; q += step)
            best = std::max(best, std::norm(amplitudes(q)[1]) / normal_pdf(q, center1_, sd1_));
        return best;
    }

    std::vector<double> values_;
    bool momentum_;
    double sigma_;
    double width_ = 1.0;
    double amp_norm_ = 1.0;
    double inv4w2_ = 0.25;
    double kappa_ = 1.0;
    double kappa_gap_ = 0.0;  // 1 - kappa
    double norm1_ = 0.0;
    double center1_ = 0.0;
    double sd1_ = 1.0;
    double bound1_ = 1.0;
};

// One mixture component rewritten over the orthonormal product modes.
struct ComponentSampler {
    std::vector<CoordinateModes> coords;
    struct Coeff {
        unsigned modes;
        cplx value;
        double magnitude;
    };
    std::vector<Coeff> coeffs;  // nonzero C_m only
    double norm2 = 0.0;
    double abs_sum = 0.0;
    std::discrete_distribution<std::size_t> pick;

    double target(const Shift& q, std::array<std::array<cplx, 2>, kCoords>& u) const {
        for (int c = 0; c < kCoords; ++c) u[c] = coords[c].amplitudes(q[c]);
        cplx psi = 0.0;
        for (const auto& [m, cm, mag] : coeffs) {
            cplx term = cm;
            for (int c = 0; c < kCoords; ++c) term *= u[c][m >> c & 1u];
            psi += term;
        }
        return std::norm(psi);
    }

    // Call after target() so `u` holds the amplitudes at q.
    double envelope(const Shift& q, const std::array<std::array<cplx, 2>, kCoords>& u) const {
        std::array<std::array<double, 2>, kCoords> e{};
        for (int c = 0; c < kCoords; ++c)
            for (int v = 0; v < coords[c].modes(); ++v) e[c][v] = coords[c].envelope(v, q[c], u[c]);
        double sum = 0.0;
        for (const auto& [m, cm, mag] : coeffs) {
            double term = mag;
            for (int c = 0; c < kCoords; ++c) term *= e[c][m >> c & 1u];
            sum += term;
        }
        return abs_sum * sum;
    }
};

ComponentSampler make_sampler(const PostselectedPointer& comp, Pattern pattern, double sigma) {
    ComponentSampler s;
    for (int c = 0; c < kCoords; ++c) {
        std::vector<double> values;
        for (const auto& t : comp.terms)
            if (std::find(values.begin(), values.end(), t.shift[c]) == values.end()) values.push_back(t.shift[c]);
        std::sort(values.begin(), values.end());
        if (values.size() > 2)
            throw Error(ErrorKind::InvalidConfig, "pointer sampler supports at most two shifts per coordinate");
        s.coords.emplace_back(std::move(values), bool(pattern >> c & 1u), sigma);
    }
    std::array<cplx, 16> cm{};
    for (const auto& t : comp.terms) {
        std::array<std::array<double, 2>, kCoords> ex{};
        for (int c = 0; c < kCoords; ++c) ex[c] = s.coords[c].expand(s.coords[c].value_index(t.shift[c]));
        for (unsigned m = 0; m < 16; ++m) {
            double f = 1.0;
            for (int c = 0; c < kCoords && f != 0.0; ++c) {
                const unsigned bit = m >> c & 1u;
                f = (int(bit) < s.coords[c].modes()) ? f * ex[c][bit] : 0.0;
            }
            cm[m] += t.amp * f;
        }
    }
    std::vector<double> weights;
    for (unsigned m = 0; m < 16; ++m) {
        if (cm[m] == 0.0) continue;
        s.coeffs.push_back({m, cm[m], std::abs(cm[m])});
        s.norm2 += std::norm(cm[m]);
        s.abs_sum += std::abs(cm[m]);
        double w = std::abs(cm[m]);
        for (int c = 0; c < kCoords; ++c) w *= s.coords[c].bound(m >> c & 1u);
        weights.push_back(w);
    }
    s.pick = std::discrete_distribution<std::size_t>(weights.begin(), weights.end());
    return s;
}

double pointer_norm(const PostselectedPointer& comp, double sigma) {
    cplx sum = 0.0;
    for (const auto& a : comp.terms)
        for (const auto& b : comp.terms) {
            cplx term = std::conj(a.amp) * b.amp;
            for (int c = 0; c < kCoords; ++c)
                term *= gaussian_matrix_element(a.shift[c], b.shift[c], Quadrature::Unit, sigma);
            sum += term;
        }
    return sum.real();
}

}  // namespace

double PostselectedEnsemble::probability() const {
    double p = 0.0;
    for (const auto& comp : components) p += comp.weight * pointer_norm(comp, sigma);
    return p;
}

PostselectedEnsemble postselect(const GaussianBranchEnsemble& e, const CVec& post) {
    PostselectedEnsemble out;
    out.sigma = e.sigma;
    for (const auto& comp : e.components) {
        PostselectedPointer pp{comp.weight, {}};
        for (const auto& b : comp.branches) {
            const cplx amp = post.dot(b.ket);
            auto it = std::find_if(pp.terms.begin(), pp.terms.end(),
                                   [&](const PointerTerm& t) { return t.shift == b.shift; });
            if (it == pp.terms.end()) {
                pp.terms.push_back({amp, b.shift});
            } else {
                it->amp += amp;
            }
        }
        std::erase_if(pp.terms, [](const PointerTerm& t) { return t.amp == 0.0; });
        out.components.push_back(std::move(pp));
    }
    return out;
}

PostselectedEnsemble postselect(const GaussianBranchEnsemble& e, Rect kl) { return postselect(e, ket(kl)); }

std::vector<Shift> sample_pointer_positions(const PostselectedEnsemble& e, Pattern pattern, long long n,
                                            std::mt19937_64& rng) {
    std::vector<Shift> out;
    if (n <= 0) return out;
    if (pattern >= kPatterns) throw Error(ErrorKind::InvalidConfig, "pattern out of range");

    std::vector<ComponentSampler> samplers;
    std::vector<double> weights;
    for (const auto& comp : e.components) {
        if (comp.terms.empty()) continue;
        ComponentSampler s = make_sampler(comp, pattern, e.sigma);
        if (s.norm2 <= 0.0) continue;
        weights.push_back(comp.weight * s.norm2);
        samplers.push_back(std::move(s));
    }
    if (samplers.empty())
        throw Error(ErrorKind::OrthogonalPostselection, "postselected pointer state has zero norm");
    std::discrete_distribution<std::size_t> which(weights.begin(), weights.end());
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> n01(0.0, 1.0);

    out.reserve(std::size_t(n));
    long long proposals = 0;
    std::array<std::array<cplx, 2>, kCoords> u{};
    while (static_cast<long long>(out.size()) < n) {
        ComponentSampler& s = samplers.size() == 1 ? samplers[0] : samplers[which(rng)];
        const unsigned m = s.coeffs[s.pick(rng)].modes;
        Shift q{};
        for (int c = 0; c < kCoords; ++c) q[c] = s.coords[c].draw(int(m >> c & 1u), rng, n01);
        const double t = s.target(q, u);
        const double env = s.envelope(q, u);
        if (t > env * (1.0 + 1e-9) + 1e-300)
            throw Error(ErrorKind::EnvelopeFailure, "density exceeds the envelope");
        ++proposals;
        if (unif(rng) * env < t) out.push_back(q);
        if (proposals >= kAcceptanceWindow && double(out.size()) < kMinAcceptance * double(proposals))
            throw Error(ErrorKind::EnvelopeFailure,
                        "acceptance rate " + std::to_string(double(out.size()) / double(proposals)));
    }
    return out;
}

MomentEstimate estimate_moment(const PatternSamples& s) {
    if (s.trials < 100)
        throw Error(ErrorKind::InsufficientSamples,
                    "pattern " + pattern_name(s.pattern) + " has " + std::to_string(s.trials) + " trials");
    double sum = 0.0;
    double sum2 = 0.0;
    for (const auto& q : s.clicks) {
        const double x = q[0] * q[1] * q[2] * q[3];
        sum += x;
        sum2 += x * x;
    }
    const double n = double(s.trials);
    const double mean = sum / n;
    const double var = std::max(0.0, (sum2 / n - mean * mean) * n / (n - 1.0));
    return {mean, std::sqrt(var / n)};
}

LoweringEstimate estimate_moments(const std::vector<PatternSamples>& sets, double sigma) {
    LoweringEstimate out;
    std::array<bool, kPatterns> seen{};
    for (const auto& s : sets) {
        if (s.pattern >= kPatterns) throw Error(ErrorKind::InvalidConfig, "pattern out of range");
        out.patterns[s.pattern] = estimate_moment(s);
        seen[s.pattern] = true;
    }
    double var = 0.0;
    cplx value = 0.0;
    for (Pattern p = 0; p < kPatterns; ++p) {
        if (!seen[p]) throw Error(ErrorKind::InsufficientSamples, "no samples for pattern " + pattern_name(p));
        const cplx coef = pattern_coefficient(p, sigma);
        value += coef * out.patterns[p].value;
        var += std::norm(coef) * out.patterns[p].standard_error * out.patterns[p].standard_error;
    }
    out.lowering = {value, std::sqrt(var)};
    return out;
}

PatternSamples simulate_pattern(const PostselectedEnsemble& e, Pattern pattern, long long trials,
                                std::mt19937_64& rng) {
    PatternSamples s;
    s.pattern = pattern;
    s.trials = trials;
    const double p = std::clamp(e.probability(), 0.0, 1.0);
    const long long clicks = sample_bernoulli(p, trials, rng).successes;
    s.clicks = sample_pointer_positions(e, pattern, clicks, rng);
    return s;
}

}  // namespace weaktomo
