#include "weaktomo/json_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "weaktomo/errors.hpp"

namespace weaktomo::json {

using nlohmann::json;

namespace {

double real_from_json(const json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (!j.is_number()) throw Error(ErrorKind::InvalidStateSpec, "expected a number");
    return j.get<double>();
}

json real_to_json(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

bool is_u64(const json& v) {
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0);
}

std::uint64_t seed_from_json(const json& j, const char* key) {
    if (!j.contains(key) || !is_u64(j.at(key)))
        throw Error(ErrorKind::InvalidStateSpec, std::string("'") + key + "' must be a non-negative integer");
    return j.at(key).get<std::uint64_t>();
}

}  // namespace

json complex_to_json(cplx z) { return json::array({real_to_json(z.real()), real_to_json(z.imag())}); }

cplx complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) throw Error(ErrorKind::InvalidStateSpec, "complex must be [re, im]");
    return {real_from_json(j[0]), real_from_json(j[1])};
}

json matrix_to_json(const CMat& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

CMat matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols) {
    if (!j.is_array() || Eigen::Index(j.size()) != rows)
        throw Error(ErrorKind::InvalidStateSpec, "matrix must have " + std::to_string(rows) + " rows");
    CMat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const json& row = j[r];
        if (!row.is_array() || Eigen::Index(row.size()) != cols)
            throw Error(ErrorKind::InvalidStateSpec, "matrix row must have " + std::to_string(cols) + " entries");
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(row[c]);
    }
    return m;
}

json real_matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(real_to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd real_matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw Error(ErrorKind::InvalidStateSpec, "expected nested real matrix");
    Eigen::MatrixXd m(j.size(), j[0].size());
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (j[r].size() != j[0].size()) throw Error(ErrorKind::InvalidStateSpec, "ragged matrix");
        for (std::size_t c = 0; c < j[r].size(); ++c) m(r, c) = real_from_json(j[r][c]);
    }
    return m;
}

StateSpec parse_state_spec(const json& j) {
    try {
        if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
            throw Error(ErrorKind::InvalidStateSpec, "missing 'kind'");
        const std::string kind = j.at("kind").get<std::string>();
        StateSpec spec;
        if (kind == "fixture") {
            if (!j.contains("name") || !j.at("name").is_string())
                throw Error(ErrorKind::InvalidStateSpec, "fixture needs 'name'");
            spec.payload = StateSpec::Fixture{j.at("name").get<std::string>()};
        } else if (kind == "pure") {
            if (!j.contains("amps") || !j.at("amps").is_array() || j.at("amps").size() != 4)
                throw Error(ErrorKind::InvalidStateSpec, "pure needs 'amps' with 4 entries");
            CVec c(4);
            for (int k = 0; k < 4; ++k) c(k) = complex_from_json(j.at("amps")[k]);
            spec.payload = StateSpec::Pure{c};
        } else if (kind == "mixed") {
            if (!j.contains("matrix")) throw Error(ErrorKind::InvalidStateSpec, "mixed needs 'matrix'");
            spec.payload = StateSpec::Mixed{matrix_from_json(j.at("matrix"), 4, 4)};
        } else if (kind == "random-pure") {
            spec.payload = StateSpec::RandomPure{seed_from_json(j, "seed")};
        } else if (kind == "random-mixed") {
            if (!j.contains("rank") || !j.at("rank").is_number_integer())
                throw Error(ErrorKind::InvalidStateSpec, "random-mixed needs integer 'rank'");
            const int rank = j.at("rank").get<int>();
            if (rank < 1 || rank > 4) throw Error(ErrorKind::InvalidStateSpec, "rank must be in [1,4]");
            spec.payload = StateSpec::RandomMixed{seed_from_json(j, "seed"), rank};
        } else {
            throw Error(ErrorKind::InvalidStateSpec, "unknown kind '" + kind + "'");
        }
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidStateSpec, e.what());
    }
}

json state_spec_to_json(const StateSpec& s) {
    struct Visitor {
        json operator()(const StateSpec::Fixture& f) const { return {{"kind", "fixture"}, {"name", f.name}}; }
        json operator()(const StateSpec::Pure& p) const {
            json amps = json::array();
            for (Eigen::Index k = 0; k < p.amplitudes.size(); ++k) amps.push_back(complex_to_json(p.amplitudes(k)));
            return {{"kind", "pure"}, {"amps", amps}};
        }
        json operator()(const StateSpec::Mixed& m) const { return {{"kind", "mixed"}, {"matrix", matrix_to_json(m.matrix)}}; }
        json operator()(const StateSpec::RandomPure& r) const { return {{"kind", "random-pure"}, {"seed", r.seed}}; }
        json operator()(const StateSpec::RandomMixed& r) const {
            return {{"kind", "random-mixed"}, {"seed", r.seed}, {"rank", r.rank}};
        }
    };
    return std::visit(Visitor{}, s.payload);
}

json load_json_argument(const std::string& arg) {
    std::string text = arg;
    if (!arg.empty() && arg[0] == '@') {
        std::ifstream in(arg.substr(1));
        if (!in) throw Error(ErrorKind::InvalidConfig, "cannot open " + arg.substr(1));
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    try {
        return json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidConfig, std::string("malformed JSON: ") + e.what());
    }
}

StateSpec parse_state_argument(const std::string& arg) {
    constexpr std::string_view prefix = "fixture:";
    if (arg.rfind(prefix, 0) == 0) {
        StateSpec spec{StateSpec::Fixture{arg.substr(prefix.size())}};
        spec.density();  // validates the name
        return spec;
    }
    json j;
    try {
        j = load_json_argument(arg);
    } catch (const Error& e) {
        throw Error(ErrorKind::InvalidStateSpec, e.what());
    }
    StateSpec spec = parse_state_spec(j);
    try {
        spec.density();
    } catch (const Error& e) {
        throw Error(ErrorKind::InvalidStateSpec, e.what());
    }
    return spec;
}

ShotPlan parse_shot_plan(const json& j) {
    if (!j.is_object()) throw Error(ErrorKind::InvalidConfig, "shot plan must be an object");
    ShotPlan plan;
    try {
        if (j.contains("seed")) {
            if (!is_u64(j.at("seed")))
                throw Error(ErrorKind::InvalidConfig, "'seed' must be a non-negative integer");
            plan.seed = j.at("seed").get<std::uint64_t>();
        }
        if (j.contains("shots")) {
            if (!j.at("shots").is_number_integer()) throw Error(ErrorKind::InvalidConfig, "'shots' must be an integer");
            plan.shots = j.at("shots").get<long long>();
        }
        if (j.contains("per_setting")) {
            const json& m = j.at("per_setting");
            if (!m.is_object()) throw Error(ErrorKind::InvalidConfig, "'per_setting' must be an object");
            for (auto it = m.begin(); it != m.end(); ++it) {
                if (!it.value().is_number_integer())
                    throw Error(ErrorKind::InvalidConfig, "shot count for '" + it.key() + "' must be an integer");
                plan.per_setting[it.key()] = it.value().get<long long>();
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidConfig, e.what());
    }
    plan.validate();
    return plan;
}

json shot_plan_to_json(const ShotPlan& p) {
    json j = {{"seed", p.seed}};
    if (p.shots) j["shots"] = *p.shots;
    if (!p.per_setting.empty()) j["per_setting"] = p.per_setting;
    return j;
}

}  // namespace weaktomo::json
