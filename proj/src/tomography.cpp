#include "weaktomo/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "weaktomo/errors.hpp"
#include "weaktomo/json_io.hpp"

namespace weaktomo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Euclidean projection of `lam` onto {x >= 0, sum x = 1}.
Eigen::VectorXd project_simplex(const Eigen::VectorXd& lam) {
    std::vector<double> u(lam.data(), lam.data() + lam.size());
    std::sort(u.begin(), u.end(), std::greater<>());
    double running = 0.0;
    double theta = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        running += u[k];
        const double t = (running - 1.0) / double(k + 1);
        if (u[k] - t > 0.0) theta = t;
    }
    return (lam.array() - theta).cwiseMax(0.0).matrix();
}

std::string label(Frame f, int r, int c) {
    if (f == Frame::Rect)
        return std::string(name(static_cast<Rect>(r))) + "," + std::string(name(static_cast<Rect>(c)));
    return std::string(name(static_cast<Diag>(r))) + "," + std::string(name(static_cast<Diag>(c)));
}

}  // namespace

std::string_view name(Frame f) { return f == Frame::Rect ? "aprime" : "bprime"; }

RawEstimate::RawEstimate() {
    for (auto& row : available) row.fill(true);
}

bool RawEstimate::complete() const {
    for (const auto& row : available)
        for (bool a : row)
            if (!a) return false;
    return true;
}

CMat RawEstimate::rect_values() const {
    CMat v = values;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            if (!available[r][c]) v(r, c) = 0.0;
    if (frame == Frame::Rect) return v;
    const CMat w = diag_to_rect();
    return w * v * w.adjoint();
}

TwoPhotonDensityMatrix physicality_project(const CMat& raw) {
    if (raw.rows() != 4 || raw.cols() != 4 || !raw.allFinite())
        throw Error(ErrorKind::DegenerateInput, "raw estimate must be a finite 4x4 matrix");
    const CMat h = (raw + raw.adjoint()) / 2.0;
    if (h.trace().real() <= 0.0) throw Error(ErrorKind::DegenerateInput, "non-positive trace");
    Eigen::SelfAdjointEigenSolver<CMat> es(h);
    const Eigen::VectorXd lam = project_simplex(es.eigenvalues());
    CMat out = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
    out = (out + out.adjoint()).eval() / 2.0;
    return TwoPhotonDensityMatrix(out);
}

ReconstructionReport build_report(std::string method, const RawEstimate& raw,
                                  const std::optional<TwoPhotonDensityMatrix>& rho_true,
                                  nlohmann::json params) {
    ReconstructionReport rep;
    rep.method = std::move(method);
    rep.basis = std::string(name(raw.frame));
    rep.params = std::move(params);

    CMat masked = raw.values;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            if (!raw.available[r][c]) {
                masked(r, c) = cplx(kNaN, kNaN);
                rep.omitted.push_back(label(raw.frame, r, c));
            }
    if (raw.frame == Frame::Rect) {
        rep.rho_raw = masked;
    } else {
        rep.rho_raw_frame = masked;
        if (raw.complete()) {
            rep.rho_raw = raw.rect_values();
        } else {
            rep.rho_raw = CMat::Constant(4, 4, cplx(kNaN, kNaN));
        }
    }

    // Very noisy estimates can have a non-positive trace; the report then
    // has no projected matrix and null fidelity / trace distance.
    std::optional<TwoPhotonDensityMatrix> phys;
    try {
        phys = physicality_project(raw.rect_values());
        rep.rho_phys = phys->matrix();
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegenerateInput) throw;
    }

    if (rho_true) {
        rep.rho_true = rho_true->matrix();
        rep.fidelity = phys ? fidelity(*phys, *rho_true) : kNaN;
        rep.trace_distance = phys ? trace_distance(*phys, *rho_true) : kNaN;
        CMat truth = rho_true->matrix();
        if (raw.frame == Frame::Diag) {
            const CMat w = diag_to_rect();
            truth = w.adjoint() * truth * w;
        }
        Eigen::MatrixXd err(4, 4);
        double worst = 0.0;
        double sq = 0.0;
        int count = 0;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) {
                if (!raw.available[r][c]) {
                    err(r, c) = kNaN;
                    continue;
                }
                err(r, c) = std::abs(raw.values(r, c) - truth(r, c));
                worst = std::max(worst, err(r, c));
                sq += err(r, c) * err(r, c);
                ++count;
            }
        rep.element_errors = err;
        rep.max_abs_element_error = worst;
        rep.rms_element_error = count > 0 ? std::sqrt(sq / count) : kNaN;
    }
    return rep;
}

ReconstructionReport oracle_report(const TwoPhotonDensityMatrix& rho, nlohmann::json params) {
    ReconstructionReport rep;
    rep.method = "oracle";
    rep.basis = "aprime";
    rep.rho_true = rho.matrix();
    rep.params = params.is_null() ? nlohmann::json::object() : std::move(params);
    return rep;
}

nlohmann::json to_json(const ReconstructionReport& r) {
    using json::matrix_to_json;
    nlohmann::json j;
    j["method"] = r.method;
    j["basis"] = r.basis;
    if (r.rho_true) j["rho_true"] = matrix_to_json(*r.rho_true);
    if (r.rho_raw) j["rho_raw"] = matrix_to_json(*r.rho_raw);
    if (r.rho_raw_frame) j["rho_raw_frame"] = matrix_to_json(*r.rho_raw_frame);
    if (r.rho_phys) j["rho_phys"] = matrix_to_json(*r.rho_phys);
    auto put = [&j](const char* key, const std::optional<double>& v) {
        if (v) j[key] = std::isfinite(*v) ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    put("fidelity", r.fidelity);
    put("trace_distance", r.trace_distance);
    put("max_abs_element_error", r.max_abs_element_error);
    put("rms_element_error", r.rms_element_error);
    if (r.element_errors) j["element_errors"] = json::real_matrix_to_json(*r.element_errors);
    j["omitted"] = r.omitted;
    j["params"] = r.params;
    return j;
}

ReconstructionReport report_from_json(const nlohmann::json& j) {
    using json::matrix_from_json;
    ReconstructionReport r;
    r.method = j.at("method").get<std::string>();
    r.basis = j.at("basis").get<std::string>();
    if (j.contains("rho_true")) r.rho_true = matrix_from_json(j["rho_true"], 4, 4);
    if (j.contains("rho_raw")) r.rho_raw = matrix_from_json(j["rho_raw"], 4, 4);
    if (j.contains("rho_raw_frame")) r.rho_raw_frame = matrix_from_json(j["rho_raw_frame"], 4, 4);
    if (j.contains("rho_phys")) r.rho_phys = matrix_from_json(j["rho_phys"], 4, 4);
    auto get = [&j](const char* key, std::optional<double>& out) {
        if (!j.contains(key)) return;
        out = j[key].is_null() ? kNaN : j[key].get<double>();
    };
    get("fidelity", r.fidelity);
    get("trace_distance", r.trace_distance);
    get("max_abs_element_error", r.max_abs_element_error);
    get("rms_element_error", r.rms_element_error);
    if (j.contains("element_errors")) r.element_errors = json::real_matrix_from_json(j["element_errors"]);
    r.omitted = j.at("omitted").get<std::vector<std::string>>();
    r.params = j.at("params");
    return r;
}

}  // namespace weaktomo
