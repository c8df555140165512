#include "scca/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "scca/errors.hpp"

namespace scca {

using nlohmann::json;

namespace {

json to_json(const Matrix& M)
{
    json rows = json::array();
    for (Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < M.cols(); ++j)
            row.push_back(M(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json to_json(const Vector& v)
{
    json out = json::array();
    for (Index i = 0; i < v.size(); ++i)
        out.push_back(v[i]);
    return out;
}

json to_json(const IndexSet& s)
{
    return json(std::vector<Index>(s.begin(), s.end()));
}

const json& field(const json& obj, const std::string& key, const std::string& where)
{
    if (!obj.is_object())
        throw ParseError(where + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end())
        throw ParseError(where + ": missing field \"" + key + "\"");
    return *it;
}

double number(const json& j, const std::string& what)
{
    if (!j.is_number())
        throw ParseError(what + ": expected a number");
    return j.get<double>();
}

Index integer(const json& obj, const std::string& key)
{
    const json& j = field(obj, key, "instance");
    if (!j.is_number_integer())
        throw ParseError("field \"" + key + "\": expected an integer");
    return j.get<Index>();
}

Matrix matrix(const json& obj, const std::string& key, Index rows, Index cols, const std::string& where)
{
    const json& j = field(obj, key, where);
    const std::string name = "field \"" + key + "\"";
    if (!j.is_array() || Index(j.size()) != rows)
        throw ParseError(name + ": expected " + std::to_string(rows) + " rows");
    Matrix M(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        const json& row = j[std::size_t(i)];
        if (!row.is_array() || Index(row.size()) != cols)
            throw ParseError(name + ": row " + std::to_string(i) + " must have " + std::to_string(cols) +
                             " entries");
        for (Index c = 0; c < cols; ++c)
            M(i, c) = number(row[std::size_t(c)], name + "[" + std::to_string(i) + "][" + std::to_string(c) + "]");
    }
    return M;
}

Vector vector(const json& obj, const std::string& key, Index size, const std::string& where)
{
    const json& j = field(obj, key, where);
    const std::string name = "field \"" + key + "\"";
    if (!j.is_array() || Index(j.size()) != size)
        throw ParseError(name + ": expected " + std::to_string(size) + " entries");
    Vector v(size);
    for (Index i = 0; i < size; ++i)
        v[i] = number(j[std::size_t(i)], name + "[" + std::to_string(i) + "]");
    return v;
}

} // namespace

std::string instance_to_json(const CovarianceInstance& inst, int indent)
{
    json j;
    j["n"] = inst.n();
    j["m"] = inst.m();
    j["s1"] = inst.s1;
    j["s2"] = inst.s2;
    j["label"] = inst.label;
    j["A"] = to_json(inst.A);
    j["B"] = to_json(inst.B);
    j["C"] = to_json(inst.C);
    if (inst.population) {
        const auto& p = *inst.population;
        j["population"] = {{"A0", to_json(p.A0)}, {"B0", to_json(p.B0)}, {"C0", to_json(p.C0)},
                           {"u", to_json(p.u)},   {"v", to_json(p.v)},   {"lambda", p.lambda}};
    }
    return j.dump(indent);
}

CovarianceInstance instance_from_json(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object())
        throw ParseError("instance: expected a JSON object");

    CovarianceInstance inst;
    const Index n = integer(j, "n"), m = integer(j, "m");
    if (n < 1 || m < 1)
        throw ParseError("fields \"n\" and \"m\" must be positive");
    inst.s1 = integer(j, "s1");
    inst.s2 = integer(j, "s2");
    if (auto it = j.find("label"); it != j.end()) {
        if (!it->is_string())
            throw ParseError("field \"label\": expected a string");
        inst.label = it->get<std::string>();
    }
    inst.A = matrix(j, "A", n, m, "instance");
    inst.B = matrix(j, "B", n, n, "instance");
    inst.C = matrix(j, "C", m, m, "instance");

    if (auto it = j.find("population"); it != j.end()) {
        const json& p = *it;
        PlantedPopulation pop;
        pop.A0 = matrix(p, "A0", n, m, "population");
        pop.B0 = matrix(p, "B0", n, n, "population");
        pop.C0 = matrix(p, "C0", m, m, "population");
        pop.u = vector(p, "u", n, "population");
        pop.v = vector(p, "v", m, "population");
        pop.lambda = number(field(p, "lambda", "population"), "field \"lambda\"");
        inst.population = std::move(pop);
    }
    return inst;
}

void save_instance(const CovarianceInstance& inst, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path);
    out << instance_to_json(inst) << '\n';
}

CovarianceInstance load_instance(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return instance_from_json(buf.str());
}

std::string certificate_to_json(const Certificate& cert, int indent)
{
    const auto& sol = cert.incumbent;
    json j;
    j["method"] = cert.method;
    j["status"] = to_string(cert.status);
    j["value"] = cert.value;
    j["upper_bound"] = cert.upper_bound;
    j["gap"] = cert.gap;
    j["S1"] = to_json(sol.supports.S1);
    j["S2"] = to_json(sol.supports.S2);
    j["x"] = to_json(sol.x);
    j["y"] = to_json(sol.y);
    j["xBx"] = sol.xBx;
    j["yCy"] = sol.yCy;
    j["within_budget"] = sol.within_budget;
    j["nodes"] = cert.nodes_explored;
    j["evaluations"] = cert.evaluations;
    j["cut_count"] = cert.cut_count;
    j["wall_seconds"] = cert.wall_seconds;
    j["reduction"] = cert.reduction;
    j["rank1_residual"] = cert.rank1_residual ? json(*cert.rank1_residual) : json(nullptr);
    if (cert.bigm) {
        auto side = [](const BigMComponent& c) {
            return json{{"bound", c.bound},
                        {"provenance", to_string(c.provenance)},
                        {"smallest_nonzero_eigenvalue", c.smallest_nonzero_eigenvalue},
                        {"smin", c.smin}};
        };
        j["bigm"] = {{"M1", side(cert.bigm->x)}, {"M2", side(cert.bigm->y)}};
    } else {
        j["bigm"] = nullptr;
    }
    return j.dump(indent);
}

void save_certificate(const Certificate& cert, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path);
    out << certificate_to_json(cert) << '\n';
}

} // namespace scca
