#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "weaktomo/states.hpp"

namespace weaktomo {

// Basis a raw estimate is expressed in.
enum class Frame { Rect, Diag };

std::string_view name(Frame f);

// Element (r, c) of `values` is meaningful only where `available(r, c)`.
struct RawEstimate {
    Frame frame = Frame::Rect;
    CMat values = CMat::Zero(4, 4);
    std::array<std::array<bool, 4>, 4> available{};

    RawEstimate();
    bool complete() const;
    // Estimate rotated into the HH..VV frame; unavailable entries read as 0.
    CMat rect_values() const;
};

// Nearest (Frobenius) Hermitian, PSD, unit-trace matrix: Hermitize, then
// project the spectrum onto the probability simplex. Throws DegenerateInput
// when the Hermitian part has non-positive trace.
TwoPhotonDensityMatrix physicality_project(const CMat& raw);

struct ReconstructionReport {
    std::string method;
    std::string basis;  // frame of the raw estimate: aprime | bprime
    std::optional<CMat> rho_true;
    std::optional<CMat> rho_raw;        // HH..VV frame, NaN where unknown
    std::optional<CMat> rho_raw_frame;  // raw estimate in its own frame (bprime only)
    std::optional<CMat> rho_phys;
    std::optional<double> fidelity;
    std::optional<double> trace_distance;
    std::optional<double> max_abs_element_error;
    std::optional<double> rms_element_error;
    std::optional<Eigen::MatrixXd> element_errors;  // in the estimate's frame, NaN when omitted
    std::vector<std::string> omitted;              // "row,col" labels in the estimate's frame
    nlohmann::json params = nlohmann::json::object();

    bool partial() const { return !omitted.empty(); }
};

ReconstructionReport build_report(std::string method, const RawEstimate& raw,
                                  const std::optional<TwoPhotonDensityMatrix>& rho_true,
                                  nlohmann::json params);

ReconstructionReport oracle_report(const TwoPhotonDensityMatrix& rho, nlohmann::json params = {});

nlohmann::json to_json(const ReconstructionReport& r);
ReconstructionReport report_from_json(const nlohmann::json& j);

}  // namespace weaktomo
