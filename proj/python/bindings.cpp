#include <numbers>
#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cli.hpp"
#include "weaktomo/errors.hpp"
#include "weaktomo/json_io.hpp"
#include "weaktomo/modular_scheme.hpp"
#include "weaktomo/sequential_scheme.hpp"

namespace py = pybind11;
using namespace weaktomo;

namespace {

py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

TwoPhotonDensityMatrix density(const CMat& m) { return TwoPhotonDensityMatrix(m); }

std::optional<ShotPlan> plan_for(std::optional<long long> shots, std::uint64_t seed) {
    if (!shots) return std::nullopt;
    ShotPlan p;
    p.seed = seed;
    p.shots = *shots;
    return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Direct measurement of two-photon density matrices: simulation core";
    py::register_exception<Error>(m, "WeaktomoError", PyExc_ValueError);

    m.def("fixture", [](const std::string& name) { return fixture(name).matrix(); }, py::arg("name"));
    m.def("random_pure", [](std::uint64_t seed) { return random_pure(seed).amplitudes(); }, py::arg("seed"));
    m.def("random_mixed", [](std::uint64_t seed, int rank) { return random_mixed(seed, rank).matrix(); },
          py::arg("seed"), py::arg("rank"));
    m.def("density_from_pure", [](const CVec& c) { return density_from_pure(TwoPhotonPureState(c)).matrix(); },
          py::arg("amplitudes"));
    m.def("mub_overlaps", [] {
        CMat o(4, 4);
        for (Rect ij : kRect)
            for (Diag ab : kDiag) o(index(ij), index(ab)) = ket(ij).dot(ket(ab));
        return o;
    });

    m.def("weak_value_joint",
          [](const CMat& rho, const std::string& ij, const std::string& ab) {
              return weak_value_joint(density(rho), parse_rect(ij), parse_diag(ab));
          },
          py::arg("rho"), py::arg("ij"), py::arg("ab"));
    m.def("modular_values",
          [](const CMat& rho, const std::string& ij, const std::string& ab, double g) {
              const auto mv = modular_values(density(rho), parse_rect(ij), parse_diag(ab), Coupling(g));
              return py::make_tuple(mv.m_sum, mv.m_1, mv.m_2);
          },
          py::arg("rho"), py::arg("ij"), py::arg("ab"), py::arg("g"));
    m.def("modular_to_weak",
          [](cplx m_sum, cplx m_1, cplx m_2, double g) { return modular_to_weak({m_sum, m_1, m_2}, Coupling(g)); },
          py::arg("m_sum"), py::arg("m_1"), py::arg("m_2"), py::arg("g"));

    m.def("physicality_project", [](const CMat& raw) { return physicality_project(raw).matrix(); },
          py::arg("raw"));
    m.def("fidelity", [](const CMat& a, const CMat& b) { return fidelity(density(a), density(b)); });
    m.def("trace_distance", [](const CMat& a, const CMat& b) { return trace_distance(density(a), density(b)); });
    m.def("sample_bernoulli",
          [](double p, long long n, std::uint64_t seed, const std::string& label) {
              return sample_bernoulli(p, n, seed, label).successes;
          },
          py::arg("p"), py::arg("n"), py::arg("seed"), py::arg("label") = "");

    m.def("oracle",
          [](const std::string& state) {
              const StateSpec spec = json::parse_state_argument(state);
              return to_python(to_json(oracle_report(spec.density(), {{"state", json::state_spec_to_json(spec)}})));
          },
          py::arg("state"));
    m.def("method1",
          [](const std::string& state, double g, double eta, const std::string& mode, const std::string& basis,
             const std::string& estimator, std::optional<long long> shots, std::uint64_t seed) {
              Method1Config c;
              c.g = g;
              c.eta = eta;
              if (mode == "exact") c.mode = Method1Mode::Exact;
              else if (mode == "probability") c.mode = Method1Mode::Probability;
              else throw Error(ErrorKind::InvalidConfig, "unknown mode '" + mode + "'");
              if (basis == "aprime") c.target = Method1Target::Aprime;
              else if (basis == "bprime") c.target = Method1Target::Bprime;
              else if (basis == "pure-dd") c.target = Method1Target::PureDD;
              else throw Error(ErrorKind::InvalidConfig, "unknown basis '" + basis + "'");
              if (estimator == "first-order") c.estimator = Estimator::FirstOrder;
              else if (estimator == "exact-inversion") c.estimator = Estimator::ExactInversion;
              else throw Error(ErrorKind::InvalidConfig, "unknown estimator '" + estimator + "'");
              c.shots = plan_for(shots, seed);
              c.seed = seed;
              return to_python(to_json(reconstruct_method1(json::parse_state_argument(state), c)));
          },
          py::arg("state"), py::arg("g") = std::numbers::pi / 2.0, py::arg("eta") = 1e-2,
          py::arg("mode") = "probability", py::arg("basis") = "aprime", py::arg("estimator") = "exact-inversion",
          py::arg("shots") = py::none(), py::arg("seed") = 0);
    m.def("method2",
          [](const std::string& state, double g, double sigma, std::optional<long long> shots, std::uint64_t seed) {
              Method2Config c;
              c.pointer.g = g;
              c.pointer.sigma = sigma;
              c.shots = plan_for(shots, seed);
              c.seed = seed;
              return to_python(to_json(reconstruct_method2(json::parse_state_argument(state), c)));
          },
          py::arg("state"), py::arg("g") = 1e-3, py::arg("sigma") = 1.0, py::arg("shots") = py::none(),
          py::arg("seed") = 0);

    m.def("run_cli",
          [](const std::vector<std::string>& args) {
              std::ostringstream out, err;
              const int code = cli::run(args, out, err);
              return py::make_tuple(code, out.str(), err.str());
          },
          py::arg("args"));
}
