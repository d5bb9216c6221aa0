#include "cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "weaktomo/errors.hpp"
#include "weaktomo/json_io.hpp"
#include "weaktomo/modular_scheme.hpp"
#include "weaktomo/sequential_scheme.hpp"

namespace weaktomo::cli {

namespace {

using nlohmann::json;
namespace wj = weaktomo::json;

struct Options {
    std::string state;
    std::uint64_t seed = 0;
    std::string out;

    std::string method = "method1";
    std::optional<double> g;
    double eta = 1e-2;
    std::optional<double> sigma;
    std::string mode = "probability";
    std::string basis = "aprime";
    std::string estimator = "exact-inversion";
    std::string pointer;
    std::string postselect = "DD";
    std::optional<long long> shots;
    std::string plan;

    std::string param;
    std::vector<std::string> values;
    bool timing = false;
    int repeats = 10;
};

// Raised for anything wrong with the invocation itself.
struct ConfigError {
    std::string message;
    std::string kind;
};

std::string format_number(double x) {
    if (!std::isfinite(x)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const std::string& what) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ConfigError{"cannot parse " + what + " value '" + s + "'", "InvalidConfig"};
    return v;
}

long long parse_count(const std::string& s) {
    long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || v <= 0)
        throw ConfigError{"shots must be a positive integer, got '" + s + "'", "InvalidConfig"};
    return v;
}

std::optional<ShotPlan> shot_plan(const Options& o) {
    if (o.plan.empty() && !o.shots) return std::nullopt;
    ShotPlan plan;
    if (!o.plan.empty()) {
        const json j = wj::load_json_argument(o.plan);
        plan = wj::parse_shot_plan(j);
        if (!j.contains("seed")) plan.seed = o.seed;
    } else {
        plan.seed = o.seed;
    }
    if (o.shots) plan.shots = *o.shots;
    plan.validate();
    return plan;
}

Method1Config method1_config(const Options& o) {
    Method1Config c;
    c.g = o.g.value_or(std::numbers::pi / 2.0);
    c.eta = o.eta;
    if (o.mode == "exact") {
        c.mode = Method1Mode::Exact;
    } else if (o.mode == "probability") {
        c.mode = Method1Mode::Probability;
    } else {
        throw ConfigError{"unknown mode '" + o.mode + "'", "InvalidConfig"};
    }
    if (o.basis == "aprime") {
        c.target = Method1Target::Aprime;
    } else if (o.basis == "bprime") {
        c.target = Method1Target::Bprime;
    } else if (o.basis == "pure-dd") {
        c.target = Method1Target::PureDD;
    } else {
        throw ConfigError{"unknown basis '" + o.basis + "'", "InvalidConfig"};
    }
    if (o.estimator == "exact-inversion") {
        c.estimator = Estimator::ExactInversion;
    } else if (o.estimator == "first-order") {
        c.estimator = Estimator::FirstOrder;
    } else {
        throw ConfigError{"unknown estimator '" + o.estimator + "'", "InvalidConfig"};
    }
    c.shots = shot_plan(o);
    c.seed = o.seed;
    validate(c);
    return c;
}

Method2Config method2_config(const Options& o) {
    Method2Config c;
    if (!o.pointer.empty()) {
        const json j = wj::load_json_argument(o.pointer);
        if (!j.is_object()) throw ConfigError{"pointer config must be an object", "InvalidConfig"};
        try {
            if (j.contains("g")) c.pointer.g = j.at("g").get<double>();
            if (j.contains("sigma")) c.pointer.sigma = j.at("sigma").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError{std::string("pointer config: ") + e.what(), "InvalidConfig"};
        }
    }
    if (o.g) c.pointer.g = *o.g;
    if (o.sigma) c.pointer.sigma = *o.sigma;
    try {
        c.ab = parse_diag(o.postselect);
    } catch (const std::exception&) {
        throw ConfigError{"unknown B' postselection '" + o.postselect + "'", "InvalidConfig"};
    }
    c.shots = shot_plan(o);
    c.seed = o.seed;
    validate(c);
    return c;
}

// A validated run: calling it does the computation.
using Job = std::function<ReconstructionReport()>;

Job make_job(const Options& o, const StateSpec& spec) {
    if (o.method == "method1") {
        const Method1Config c = method1_config(o);
        return [spec, c] { return reconstruct_method1(spec, c); };
    }
    if (o.method == "method2") {
        const Method2Config c = method2_config(o);
        return [spec, c] { return reconstruct_method2(spec, c); };
    }
    throw ConfigError{"unknown method '" + o.method + "'", "InvalidConfig"};
}

void check_output_path(const std::string& path) {
    if (path.empty()) return;
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty() && !std::filesystem::is_directory(parent))
        throw ConfigError{"output directory does not exist: " + parent.string(), "InvalidConfig"};
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::InvalidConfig, "cannot write " + path);
    f << text;
}

int code_for(const ReconstructionReport& r) { return r.partial() ? kPartial : kOk; }

int run_sweep(const Options& base, const StateSpec& spec, std::ostream& out) {
    if (base.param != "eta" && base.param != "g" && base.param != "shots")
        throw ConfigError{"unknown sweep parameter '" + base.param + "'", "InvalidConfig"};
    if (base.param == "eta" && base.method != "method1")
        throw ConfigError{"eta sweeps apply to method1 only", "InvalidConfig"};
    if (base.values.size() < 2) throw ConfigError{"sweep needs at least two values", "InvalidConfig"};

    std::vector<std::pair<std::string, Job>> rows;
    for (const auto& v : base.values) {
        Options o = base;
        std::string label;
        if (base.param == "shots") {
            o.shots = parse_count(v);
            label = std::to_string(*o.shots);
        } else {
            const double x = parse_double(v, base.param);
            (base.param == "eta" ? o.eta : o.g.emplace()) = x;
            label = format_number(x);
        }
        rows.emplace_back(label, make_job(o, spec));
    }

    std::ostringstream csv;
    csv << "param_value,fidelity,trace_distance,max_abs_element_error,runtime_ms\n";
    int code = kOk;
    for (auto& [label, job] : rows) {
        const auto t0 = std::chrono::steady_clock::now();
        const ReconstructionReport r = job();
        const auto t1 = std::chrono::steady_clock::now();
        if (r.partial()) code = kPartial;
        csv << label << ',' << format_number(r.fidelity.value_or(NAN)) << ','
            << format_number(r.trace_distance.value_or(NAN)) << ','
            << format_number(r.max_abs_element_error.value_or(NAN)) << ',';
        // Wall time breaks byte-identical reruns, so it is opt-in.
        if (base.timing) csv << format_number(std::chrono::duration<double, std::milli>(t1 - t0).count());
        csv << '\n';
    }
    emit(csv.str(), base.out, out);
    return code;
}

int run_sample(const Options& base, const StateSpec& spec, std::ostream& out) {
    if (!base.shots && base.plan.empty())
        throw ConfigError{"sample needs --shots or --plan", "InvalidConfig"};
    if (base.repeats < 2) throw ConfigError{"repeats must be at least 2", "InvalidConfig"};
    std::vector<Job> jobs;
    for (int k = 0; k < base.repeats; ++k) {
        Options o = base;
        o.seed = base.seed + std::uint64_t(k);
        if (base.method == "method1" && base.mode == "exact")
            throw ConfigError{"shot noise requires probability mode", "InvalidConfig"};
        jobs.push_back(make_job(o, spec));
    }

    json runs = json::array();
    std::vector<double> rms, fid, worst;
    json params;
    int code = kOk;
    for (int k = 0; k < base.repeats; ++k) {
        const ReconstructionReport r = jobs[k]();
        if (r.partial()) code = kPartial;
        if (k == 0) params = r.params;
        rms.push_back(r.rms_element_error.value_or(NAN));
        fid.push_back(r.fidelity.value_or(NAN));
        worst.push_back(r.max_abs_element_error.value_or(NAN));
        auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
        runs.push_back({{"seed", r.params.at("seed")},
                        {"fidelity", num(fid.back())},
                        {"trace_distance", num(r.trace_distance.value_or(NAN))},
                        {"max_abs_element_error", num(worst.back())},
                        {"rms_element_error", num(rms.back())},
                        {"omitted", r.omitted.size()}});
    }
    auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / double(v.size());
    };
    auto sd = [&mean](const std::vector<double>& v) {
        const double m = mean(v);
        double s = 0.0;
        for (double x : v) s += (x - m) * (x - m);
        return std::sqrt(s / double(v.size() - 1));
    };
    auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
    params.erase("seed");
    json j = {{"method", base.method},
              {"repeats", base.repeats},
              {"base_seed", base.seed},
              {"params", params},
              {"runs", runs},
              {"summary",
               {{"mean_rms_element_error", num(mean(rms))},
                {"sd_rms_element_error", num(sd(rms))},
                {"mean_max_abs_element_error", num(mean(worst))},
                {"mean_fidelity", num(mean(fid))}}}};
    emit(j.dump(2) + "\n", base.out, out);
    return code;
}

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--state", o.state, "inline JSON, @file or fixture:NAME")->required();
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--out", o.out, "write output here instead of stdout");
}

void add_method1(CLI::App* sub, Options& o) {
    sub->add_option("--eta", o.eta, "path pointer amplitude eta");
    sub->add_option("--mode", o.mode, "exact | probability");
    sub->add_option("--basis", o.basis, "aprime | bprime | pure-dd");
    sub->add_option("--estimator", o.estimator, "exact-inversion | first-order");
}

void add_method2(CLI::App* sub, Options& o) {
    sub->add_option("--sigma", o.sigma, "pointer width");
    sub->add_option("--pointer", o.pointer, "pointer JSON {\"g\":..,\"sigma\":..} or @file");
    sub->add_option("--postselect", o.postselect, "intermediate B' projector (default DD)");
}

void add_shared(CLI::App* sub, Options& o) {
    sub->add_option("--g", o.g, "coupling strength");
    sub->add_option("--shots", o.shots, "shots per setting (enables shot noise)");
    sub->add_option("--plan", o.plan, "shot plan JSON or @file");
}

void write_error(std::ostream& err, const std::string& kind, const std::string& message, int code) {
    err << json{{"error", message}, {"kind", kind}, {"exit_code", code}}.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Direct two-photon density-matrix measurement simulator", "weaktomo"};
    app.require_subcommand(1, 1);

    auto* oracle = app.add_subcommand("oracle", "exact density matrix of a state");
    add_common(oracle, o);

    auto* m1 = app.add_subcommand("method1", "modular-value postselected scheme");
    add_common(m1, o);
    add_shared(m1, o);
    add_method1(m1, o);

    auto* m2 = app.add_subcommand("method2", "three sequential measurements with Gaussian pointers");
    add_common(m2, o);
    add_shared(m2, o);
    add_method2(m2, o);

    auto* sweep = app.add_subcommand("sweep", "one parameter over several values, CSV output");
    add_common(sweep, o);
    add_shared(sweep, o);
    add_method1(sweep, o);
    add_method2(sweep, o);
    sweep->add_option("--method", o.method, "method1 | method2");
    sweep->add_option("--param", o.param, "eta | g | shots")->required();
    sweep->add_option("--values", o.values, "comma-separated values")->required()->delimiter(',');
    sweep->add_flag("--timing", o.timing, "fill the runtime_ms column");

    auto* sample = app.add_subcommand("sample", "repeated shot-noise runs with consecutive seeds");
    add_common(sample, o);
    add_shared(sample, o);
    add_method1(sample, o);
    add_method2(sample, o);
    sample->add_option("--method", o.method, "method1 | method2");
    sample->add_option("--repeats", o.repeats, "number of runs");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        write_error(err, "InvalidConfig", e.what(), kConfigError);
        return kConfigError;
    }

    // Everything below up to the first computation is validation.
    std::function<int()> action;
    try {
        check_output_path(o.out);
        const StateSpec spec = wj::parse_state_argument(o.state);
        if (oracle->parsed()) {
            action = [&o, spec, &out] {
                const ReconstructionReport r = oracle_report(spec.density(), {{"state", wj::state_spec_to_json(spec)}});
                emit(to_json(r).dump(2) + "\n", o.out, out);
                return int(kOk);
            };
        } else if (m1->parsed() || m2->parsed()) {
            if (m1->parsed()) o.method = "method1";
            if (m2->parsed()) o.method = "method2";
            Job job = make_job(o, spec);
            action = [&o, job, &out] {
                const ReconstructionReport r = job();
                emit(to_json(r).dump(2) + "\n", o.out, out);
                return code_for(r);
            };
        } else if (sweep->parsed()) {
            if (o.method != "method1" && o.method != "method2")
                throw ConfigError{"unknown method '" + o.method + "'", "InvalidConfig"};
            // run_sweep validates every row before computing any of them
            action = [&o, spec, &out] { return run_sweep(o, spec, out); };
        } else {
            if (o.method != "method1" && o.method != "method2")
                throw ConfigError{"unknown method '" + o.method + "'", "InvalidConfig"};
            action = [&o, spec, &out] { return run_sample(o, spec, out); };
        }
    } catch (const ConfigError& e) {
        write_error(err, e.kind, e.message, kConfigError);
        return kConfigError;
    } catch (const Error& e) {
        const std::string msg = e.kind() == ErrorKind::InvalidStateSpec ? "invalid StateSpec: " + e.detail() : e.detail();
        write_error(err, std::string(to_string(e.kind())), msg, kConfigError);
        return kConfigError;
    }

    try {
        return action();
    } catch (const ConfigError& e) {
        write_error(err, e.kind, e.message, kConfigError);
        return kConfigError;
    } catch (const Error& e) {
        const bool config = e.kind() == ErrorKind::InvalidConfig || e.kind() == ErrorKind::InvalidStateSpec ||
                            e.kind() == ErrorKind::CouplingTooStrong || e.kind() == ErrorKind::DegenerateCoupling;
        const int code = config ? kConfigError : kRuntimeError;
        write_error(err, std::string(to_string(e.kind())), e.detail(), code);
        return code;
    } catch (const std::exception& e) {
        write_error(err, "RuntimeError", e.what(), kRuntimeError);
        return kRuntimeError;
    }
}

}  // namespace weaktomo::cli
