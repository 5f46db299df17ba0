#include "czkit/spec_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace czkit {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw std::runtime_error("scenario field '" + field + "': " + what);
}

const json& member(const json& j, const std::string& field) {
    if (!j.is_object() || !j.contains(field)) fail(field, "missing");
    return j.at(field);
}

Matrix parse_matrix(const json& j, const std::string& field) {
    if (!j.is_array()) fail(field, "expected an array of rows");
    const int rows = static_cast<int>(j.size());
    int cols = -1;
    for (const json& row : j) {
        if (!row.is_array()) fail(field, "expected an array of rows");
        if (cols < 0) cols = static_cast<int>(row.size());
        if (static_cast<int>(row.size()) != cols) fail(field, "ragged rows");
    }
    if (rows == 0) cols = 0;
    Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (!j[r][c].is_number()) fail(field, "non-numeric entry");
            m(r, c) = j[r][c].get<double>();
        }
    }
    return m;
}

Vector parse_vector(const json& j, const std::string& field) {
    if (!j.is_array()) fail(field, "expected an array");
    Vector v(j.size());
    for (size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) fail(field, "non-numeric entry");
        v(i) = j[i].get<double>();
    }
    return v;
}

ConstrainedZonotope parse_set(const json& j, const std::string& field) {
    ConstrainedZonotope z;
    z.G = parse_matrix(member(j, "generators"), field + ".generators");
    z.c = parse_vector(member(j, "center"), field + ".center");
    if (j.contains("constraint_lhs") || j.contains("constraint_rhs")) {
        z.A = parse_matrix(member(j, "constraint_lhs"), field + ".constraint_lhs");
        z.b = parse_vector(member(j, "constraint_rhs"), field + ".constraint_rhs");
        if (z.A.rows() == 0) z.A = Matrix::Zero(0, z.G.cols());
    } else {
        z.A = Matrix::Zero(0, z.G.cols());
        z.b = Vector::Zero(0);
    }
    if (z.G.rows() != z.c.size()) fail(field, "generators/center row mismatch");
    if (z.A.cols() != z.G.cols()) fail(field, "constraint_lhs column mismatch");
    if (z.A.rows() != z.b.size()) fail(field, "constraint_lhs/constraint_rhs row mismatch");
    return z;
}

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_json(const Vector& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json set_json(const ConstrainedZonotope& z) {
    json j;
    j["generators"] = matrix_json(z.G);
    j["center"] = vector_json(z.c);
    if (z.A.rows() > 0) {
        j["constraint_lhs"] = matrix_json(z.A);
        j["constraint_rhs"] = vector_json(z.b);
    }
    return j;
}

}  // namespace

ScenarioSpec parse_scenario(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("scenario: invalid JSON: ") + e.what());
    }

    ScenarioSpec spec;
    const json& models = member(j, "models");
    if (!models.is_array() || models.empty()) fail("models", "expected a non-empty array");
    for (size_t i = 0; i < models.size(); ++i) {
        const std::string prefix = "models[" + std::to_string(i) + "].";
        const json& mj = models[i];
        DescriptorModel m;
        m.E = parse_matrix(member(mj, "E"), prefix + "E");
        m.A = parse_matrix(member(mj, "A"), prefix + "A");
        m.B = parse_matrix(member(mj, "B"), prefix + "B");
        m.Bw = parse_matrix(member(mj, "Bw"), prefix + "Bw");
        m.C = parse_matrix(member(mj, "C"), prefix + "C");
        m.D = parse_matrix(member(mj, "D"), prefix + "D");
        m.Dv = parse_matrix(member(mj, "Dv"), prefix + "Dv");
        try {
            m.check();
        } catch (const std::exception& e) {
            fail(prefix.substr(0, prefix.size() - 1), e.what());
        }
        spec.bank.models.push_back(std::move(m));
    }

    const json& sets = member(j, "sets");
    spec.bank.X0 = parse_set(member(sets, "X0"), "sets.X0");
    spec.bank.W = parse_set(member(sets, "W"), "sets.W");
    spec.bank.V = parse_set(member(sets, "V"), "sets.V");
    spec.bank.Xa = parse_set(member(sets, "Xa"), "sets.Xa");

    const json& box = member(j, "input_box");
    spec.bank.U_box.lower = parse_vector(member(box, "lower"), "input_box.lower");
    spec.bank.U_box.upper = parse_vector(member(box, "upper"), "input_box.upper");
    if (spec.bank.U_box.lower.size() != spec.bank.U_box.upper.size()) {
        fail("input_box", "lower/upper length mismatch");
    }

    const json& red = member(j, "reduction");
    const json& mg = member(red, "max_generators");
    const json& mc = member(red, "max_constraints");
    if (!mg.is_number_integer() || mg.get<int>() < 0) fail("reduction.max_generators", "expected a non-negative integer");
    if (!mc.is_number_integer() || mc.get<int>() < 0) fail("reduction.max_constraints", "expected a non-negative integer");
    spec.limits.max_generators = mg.get<int>();
    spec.limits.max_constraints = mc.get<int>();

    const json& hz = member(j, "horizon");
    if (!hz.is_number_integer() || hz.get<int>() < 0) fail("horizon", "expected a non-negative integer");
    spec.horizon = hz.get<int>();
    const json& eps = member(j, "epsilon");
    if (!eps.is_number()) fail("epsilon", "expected a number");
    spec.epsilon = eps.get<double>();
    const json& seed = member(j, "seed");
    if (!seed.is_number_unsigned() && !seed.is_number_integer()) fail("seed", "expected an integer");
    spec.seed = seed.get<std::uint64_t>();

    try {
        spec.bank.check();
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("scenario: ") + e.what());
    }
    return spec;
}

std::string serialize_scenario(const ScenarioSpec& spec) {
    json j;
    j["models"] = json::array();
    for (const DescriptorModel& m : spec.bank.models) {
        json mj;
        mj["E"] = matrix_json(m.E);
        mj["A"] = matrix_json(m.A);
        mj["B"] = matrix_json(m.B);
        mj["Bw"] = matrix_json(m.Bw);
        mj["C"] = matrix_json(m.C);
        mj["D"] = matrix_json(m.D);
        mj["Dv"] = matrix_json(m.Dv);
        j["models"].push_back(std::move(mj));
    }
    j["sets"]["X0"] = set_json(spec.bank.X0);
    j["sets"]["W"] = set_json(spec.bank.W);
    j["sets"]["V"] = set_json(spec.bank.V);
    j["sets"]["Xa"] = set_json(spec.bank.Xa);
    j["input_box"]["lower"] = vector_json(spec.bank.U_box.lower);
    j["input_box"]["upper"] = vector_json(spec.bank.U_box.upper);
    j["reduction"]["max_generators"] = spec.limits.max_generators;
    j["reduction"]["max_constraints"] = spec.limits.max_constraints;
    j["horizon"] = spec.horizon;
    j["epsilon"] = spec.epsilon;
    j["seed"] = spec.seed;
    return j.dump(2) + "\n";
}

ScenarioSpec load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("scenario: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

void save_scenario(const ScenarioSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("scenario: cannot write '" + path + "'");
    out << serialize_scenario(spec);
}

InputSequence parse_input_sequence(const std::string& json_text, int n_u) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("input sequence: invalid JSON: ") + e.what());
    }
    if (!j.is_array() || j.empty()) {
        throw std::runtime_error("input sequence: expected a non-empty array of arrays");
    }
    InputSequence s;
    for (size_t k = 0; k < j.size(); ++k) {
        const Vector u = parse_vector(j[k], "u[" + std::to_string(k) + "]");
        if (u.size() != n_u) {
            throw std::runtime_error("input sequence: u[" + std::to_string(k) + "] has length " +
                                     std::to_string(u.size()) + ", expected " + std::to_string(n_u));
        }
        s.u.push_back(u);
    }
    return s;
}

std::string serialize_input_sequence(const InputSequence& useq) {
    json j = json::array();
    for (const Vector& u : useq.u) j.push_back(vector_json(u));
    return j.dump() + "\n";
}

InputSequence load_input_sequence(const std::string& path, int n_u) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("input sequence: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_input_sequence(buf.str(), n_u);
}

}  // namespace czkit
