/**
 * @file fixture.hpp
 * @brief Fixture documents (JSON) and the built-in catalog FIX-A .. FIX-D.
 *
 * Schema: docs/fixture_schema.md.  Built-in fixtures are generated as JSON
 * documents and go through the same loader as files on disk.
 */
#pragma once

#include "connection.hpp"
#include "geometry.hpp"
#include "graded_linalg.hpp"

#include <json.hpp>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace holonomy {

using json = nlohmann::json;

class FixtureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExpectedValue {
    std::string id;
    std::string quantity;   // "hol2" | "z" | "truncation"
    std::string two_path;
    std::string map;
    double scale = 1.0;
    std::string source;
};

struct Fixture {
    std::string name;
    std::string description;
    int chart_dim = 0;
    ComplexPtr complex;
    std::map<std::string, GradedMap> maps;
    std::shared_ptr<const SuperconnectionField> field;
    std::map<std::string, Path> paths;
    std::map<std::string, TwoPath> two_paths;
    std::map<std::string, SimplexMap> simplices;
    std::vector<ExpectedValue> expected;
    std::string tier = "default";
    double flatness = 0.0;   // residual measured on load
    json document;
};

namespace detail {

inline Mat matrix_from_json(const json& j, int rows, int cols, const std::string& what)
{
    if (!j.is_array()) throw FixtureError(what + ": expected an array of rows");
    if (static_cast<int>(j.size()) != rows)
        throw FixtureError(what + ": expected " + std::to_string(rows) + " rows, got " + std::to_string(j.size()));
    Mat m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        const json& row = j[r];
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw FixtureError(what + ": row " + std::to_string(r) + " must have " + std::to_string(cols) + " entries");
        for (int c = 0; c < cols; ++c) {
            if (!row[c].is_number()) throw FixtureError(what + ": non-numeric entry");
            m(r, c) = row[c].get<double>();
        }
    }
    return m;
}

inline json matrix_to_json(const Mat& m)
{
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

template <typename T>
T required(const json& j, const char* key, const std::string& where)
{
    if (!j.contains(key)) throw FixtureError(where + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw FixtureError(where + ": field '" + key + "' has the wrong type");
    }
}

inline std::vector<Expr> parse_components(const json& j, const std::set<std::string>& vars, const std::string& where)
{
    std::vector<Expr> out;
    for (const auto& c : required<std::vector<std::string>>(j, "components", where)) {
        try {
            out.push_back(parse(c, vars));
        } catch (const ParseError& e) {
            throw FixtureError(where + ": " + e.what() + " in '" + c + "'");
        }
    }
    return out;
}

}  // namespace detail

namespace detail {

inline Fixture load_fixture_document(const json& doc, double fd_step)
{
    Fixture fx;
    fx.document = doc;
    fx.name = detail::required<std::string>(doc, "name", "fixture");
    const std::string where = "fixture " + fx.name;
    fx.description = doc.value("description", "");
    fx.tier = doc.value("tier", "default");
    fx.chart_dim = detail::required<int>(doc, "chart_dim", where);
    if (fx.chart_dim < 1 || fx.chart_dim > 3) throw FixtureError(where + ": chart_dim must be 1, 2 or 3");

    // complex
    const json& cj = doc.at("complex");
    int lowest = detail::required<int>(cj, "lowest_degree", where + " complex");
    auto dims = detail::required<std::vector<int>>(cj, "dims", where + " complex");
    std::vector<Mat> blocks;
    if (cj.contains("differential")) {
        const json& dj = cj.at("differential");
        if (!dj.is_array()) throw FixtureError(where + ": differential must be a list of blocks");
        for (std::size_t i = 0; i < dj.size(); ++i) {
            int r = i + 1 < dims.size() ? dims[i + 1] : 0;
            blocks.push_back(detail::matrix_from_json(dj[i], r, dims[i], where + " differential block " + std::to_string(i)));
        }
    }
    try {
        fx.complex = CochainComplex::create(lowest, dims, blocks);
    } catch (const StructuralError& e) {
        throw FixtureError(where + ": " + e.what());
    }

    // constant maps
    if (doc.contains("maps")) {
        for (const auto& [name, mj] : doc.at("maps").items()) {
            int deg = detail::required<int>(mj, "degree", where + " map " + name);
            GradedMap g(fx.complex, deg);
            Mat total = g.matrix();
            if (mj.contains("blocks")) {
                for (const auto& [src, bj] : mj.at("blocks").items()) {
                    int k = std::stoi(src);
                    int r = fx.complex->dim(k + deg), c = fx.complex->dim(k);
                    if (r == 0 || c == 0) throw FixtureError(where + " map " + name + ": block " + src + " has no target");
                    total.block(fx.complex->offset(k + deg), fx.complex->offset(k), r, c) =
                        detail::matrix_from_json(bj, r, c, where + " map " + name + " block " + src);
                }
            }
            fx.maps.emplace(name, GradedMap(fx.complex, deg, total));
        }
    }

    // form terms
    auto terms = [&](const char* key, int p) {
        std::vector<FormTerm> out;
        if (!doc.contains(key)) return out;
        for (const auto& tj : doc.at(key)) {
            std::string tw = where + " " + key;
            std::string cs = detail::required<std::string>(tj, "coeff", tw);
            auto dx = detail::required<std::vector<int>>(tj, "dx", tw);
            std::string mname = detail::required<std::string>(tj, "map", tw);
            auto it = fx.maps.find(mname);
            if (it == fx.maps.end()) throw FixtureError(tw + ": unknown map '" + mname + "'");
            if (static_cast<int>(dx.size()) != p) throw FixtureError(tw + ": needs " + std::to_string(p) + " dx indices");
            if (it->second.degree() != 1 - p)
                throw FixtureError(tw + ": map '" + mname + "' must have degree " + std::to_string(1 - p));
            for (int i : dx)
                if (i < 0 || i >= fx.chart_dim) throw FixtureError(tw + ": dx index out of range");
            Expr e;
            try {
                e = parse(cs, {"x", "y", "z"});
            } catch (const ParseError& err) {
                throw FixtureError(tw + ": " + err.what() + " in '" + cs + "'");
            }
            out.push_back({e, dx, it->second});
        }
        return out;
    };
    fx.field = std::make_shared<SuperconnectionField>(fx.complex, fx.chart_dim, terms("alpha1", 1), terms("alpha2", 2),
                                                      terms("alpha3", 3));

    // geometry
    if (doc.contains("paths"))
        for (const auto& [name, pj] : doc.at("paths").items()) {
            auto comps = detail::parse_components(pj, {"t"}, where + " path " + name);
            if (static_cast<int>(comps.size()) != fx.chart_dim) throw FixtureError(where + " path " + name + ": wrong dimension");
            fx.paths.emplace(name, expr_path(comps));
        }
    if (doc.contains("two_paths"))
        for (const auto& [name, pj] : doc.at("two_paths").items()) {
            auto comps = detail::parse_components(pj, {"t", "s"}, where + " 2-path " + name);
            if (static_cast<int>(comps.size()) != fx.chart_dim) throw FixtureError(where + " 2-path " + name + ": wrong dimension");
            TwoPath G = expr_two_path(comps, pj.value("relaxed", false));
            try {
                validate_two_path(G);
            } catch (const GeometryError& e) {
                throw FixtureError(where + " 2-path " + name + ": " + e.what());
            }
            fx.two_paths.emplace(name, G);
        }
    if (doc.contains("simplices"))
        for (const auto& [name, sj] : doc.at("simplices").items()) {
            auto comps = detail::parse_components(sj, {"t", "s"}, where + " simplex " + name);
            if (static_cast<int>(comps.size()) != fx.chart_dim) throw FixtureError(where + " simplex " + name + ": wrong dimension");
            fx.simplices.emplace(name, expr_simplex(2, comps));
        }
    if (doc.contains("expected"))
        for (const auto& ej : doc.at("expected")) {
            ExpectedValue ev;
            ev.id = detail::required<std::string>(ej, "id", where + " expected");
            ev.quantity = detail::required<std::string>(ej, "quantity", where + " expected");
            ev.two_path = detail::required<std::string>(ej, "two_path", where + " expected");
            ev.map = detail::required<std::string>(ej, "map", where + " expected");
            ev.scale = ej.value("scale", 1.0);
            ev.source = ej.value("source", "");
            if (!fx.maps.count(ev.map)) throw FixtureError(where + " expected " + ev.id + ": unknown map");
            if (!fx.two_paths.count(ev.two_path)) throw FixtureError(where + " expected " + ev.id + ": unknown 2-path");
            fx.expected.push_back(ev);
        }

    Point at;
    fx.flatness = max_flatness_residual(*fx.field, fd_step, &at);
    if (fx.flatness > 1e-6) {
        std::ostringstream os;
        os << where << ": not flat, residual " << fx.flatness << " at (" << at.transpose() << ")";
        throw FixtureError(os.str());
    }
    return fx;
}

}  // namespace detail

/**
 * Materialise a fixture document: complex, maps, form terms and geometry,
 * followed by the flatness check (rejects residuals above 1e-6).  Every
 * schema problem surfaces as FixtureError.
 */
inline Fixture load_fixture_json(const json& doc, double fd_step = 1e-4)
{
    std::string where = "fixture";
    if (doc.is_object() && doc.contains("name") && doc.at("name").is_string())
        where += " " + doc.at("name").get<std::string>();
    try {
        return detail::load_fixture_document(doc, fd_step);
    } catch (const FixtureError&) {
        throw;
    } catch (const json::exception& e) {
        throw FixtureError(where + ": malformed document (" + e.what() + ")");
    } catch (const std::logic_error& e) {
        throw FixtureError(where + ": " + e.what());
    } catch (const std::runtime_error& e) {
        throw FixtureError(where + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Built-in catalog
// ---------------------------------------------------------------------------

namespace catalog {

/// Graded matrix description on a small complex used to build tensor products.
struct Small {
    std::vector<int> dims;
    Mat D;   // total differential
    int offset(int k) const
    {
        int o = 0;
        for (int i = 0; i < k; ++i) o += dims[i];
        return o;
    }
    int total() const
    {
        int n = 0;
        for (int d : dims) n += d;
        return n;
    }
};

inline json complex_json(const Small& W, int udim)
{
    json cj;
    cj["lowest_degree"] = 0;
    std::vector<int> dims;
    for (int d : W.dims) dims.push_back(d * udim);
    cj["dims"] = dims;
    Mat D = Eigen::kroneckerProduct(W.D, Mat::Identity(udim, udim)).eval();
    json blocks = json::array();
    int off = 0;
    for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
        blocks.push_back(detail::matrix_to_json(D.block(off + dims[k], off, dims[k + 1], dims[k])));
        off += dims[k];
    }
    cj["differential"] = blocks;
    return cj;
}

/// JSON map entry for a total matrix on the tensor complex W (x) U.
inline json map_json(const std::vector<int>& dims, int degree, const Mat& total)
{
    json mj;
    mj["degree"] = degree;
    json blocks = json::object();
    std::vector<int> off{0};
    for (int d : dims) off.push_back(off.back() + d);
    for (int k = 0; k < static_cast<int>(dims.size()); ++k) {
        int tgt = k + degree;
        if (tgt < 0 || tgt >= static_cast<int>(dims.size()) || dims[k] == 0 || dims[tgt] == 0) continue;
        blocks[std::to_string(k)] = detail::matrix_to_json(total.block(off[tgt], off[k], dims[tgt], dims[k]));
    }
    mj["blocks"] = blocks;
    return mj;
}

inline std::vector<int> tensor_dims(const Small& W, int udim)
{
    std::vector<int> d;
    for (int x : W.dims) d.push_back(x * udim);
    return d;
}

inline Mat shift(int n)
{
    Mat Y = Mat::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) Y(i + 1, i) = 1.0;
    return Y;
}

/// Components of a 2-path in R^2, lifted to R^3 by z = x y / 2 when needed.
inline json comps(const std::string& x, const std::string& y, int dim)
{
    json c = json::array({x, y});
    if (dim == 3) c.push_back("0.5*(" + x + ")*(" + y + ")");
    return c;
}

inline json geometry_block(int dim, bool squares)
{
    json tp = json::object();
    tp["lens"] = {{"components", comps("t", "6*t*(1-t)*s", dim)}};
    tp["bump_lens"] = {{"components", comps("t + 0.1*sin(pi*t)*s*(1-s)", "6*t*(1-t)*s + 0.3*t*(1-t)*sin(pi*s)", dim)}};
    tp["lens_left"] = {{"components", comps("0.5*t", "3*t*(1-t)*s", dim)}};
    tp["lens_right"] = {{"components", comps("0.5 + 0.5*t", "2*t*(1-t)*s^2 + t*(1-t)*s", dim)}};
    tp["lens_lower"] = {{"components", comps("t", "3*t*(1-t)*s", dim)}};
    tp["lens_upper"] = {{"components", comps("t + 0.1*sin(pi*t)*s*(1-s)", "3*t*(1-t)*(1 + s)", dim)}};
    if (squares) {
        tp["square"] = {{"components", comps("t", "s", dim)}, {"relaxed", true}};
        tp["bump_square"] = {{"components", comps("t + 0.12*sin(pi*t)*sin(pi*s)", "s + 0.1*sin(pi*t)*sin(2*pi*s)", dim)},
                             {"relaxed", true}};
    }
    json g;
    g["two_paths"] = tp;
    json paths = json::object();
    paths["curve"] = {{"components", comps("t + 0.3*sin(pi*t)", "t^2 - 0.2*sin(2*pi*t)", dim)}};
    paths["loop"] = {{"components", comps("0.5 + 0.3*cos(2*pi*t)", "0.5 + 0.3*sin(2*pi*t)", dim)}};
    g["paths"] = paths;
    json simp = json::object();
    simp["generic"] = {{"components", comps("0.2 + 0.6*t + 0.1*s^2", "0.1 + 0.5*s + 0.2*t*s", dim)}};
    simp["skew"] = {{"components", comps("0.9 - 0.5*t + 0.2*s", "0.3 + 0.4*t*s - 0.2*s^2", dim)}};
    simp["thin"] = {{"components", comps("0.3 + 0.5*t", "0.2 + 0.3*t^2", dim)}};
    simp["thin_diagonal"] = {{"components", comps("0.2 + 0.5*(t + s)", "0.1 + 0.3*(t + s)^2", dim)}};
    g["simplices"] = simp;
    return g;
}

inline void merge(json& into, const json& from)
{
    for (const auto& [k, v] : from.items()) into[k] = v;
}

/// FIX-A: alpha^1 = 0, alpha^2 = dx ^ dy (x) C on a two-degree complex with [d, C] = 0.
inline json fix_a()
{
    Small W{{2, 2}, Mat::Zero(4, 4)};
    W.D(2, 0) = 1.0;   // d u1 = w
    json doc;
    doc["name"] = "FIX-A";
    doc["description"] = "alpha1 = 0, alpha2 = dx^dy (x) C; V0 = <u1,u2>, V1 = <w,w'>, du1 = w, du2 = 0, Cw = 0, Cw' = u2";
    doc["chart_dim"] = 2;
    doc["complex"] = complex_json(W, 1);
    Mat C = Mat::Zero(4, 4);
    C(1, 3) = 1.0;   // C w' = u2
    doc["maps"]["C"] = map_json(W.dims, -1, C);
    doc["alpha1"] = json::array();
    doc["alpha2"] = json::array({{{"coeff", "1"}, {"dx", {0, 1}}, {"map", "C"}}});
    merge(doc, geometry_block(2, true));
    doc["expected"] = json::array({{{"id", "closed-form-square"}, {"quantity", "hol2"}, {"two_path", "square"},
                                    {"map", "C"}, {"scale", -1.0}, {"source", "area integral of B = -C"}},
                                   {{"id", "closed-form-lens"}, {"quantity", "hol2"}, {"two_path", "lens"},
                                    {"map", "C"}, {"scale", -1.0}, {"source", "unit enclosed area"}}});
    doc["tier"] = "default";
    return doc;
}

/// FIX-B: alpha^1 = -(dphi P + dpsi Q) with commuting chain maps P, Q; alpha^2 = 0.
inline json fix_b()
{
    Small W{{1, 1}, Mat::Zero(2, 2)};
    W.D(1, 0) = 1.0;
    const int u = 2;
    json doc;
    doc["name"] = "FIX-B";
    doc["description"] = "Maurer-Cartan alpha1 = -(dphi P + dpsi Q) of exp(phi P + psi Q), alpha2 = 0, on (R -> R) (x) R^2";
    doc["chart_dim"] = 2;
    doc["complex"] = complex_json(W, u);
    auto dims = tensor_dims(W, u);
    Mat P = Eigen::kroneckerProduct(Mat::Identity(2, 2), Eigen::Vector2d(1.0, -0.5).asDiagonal().toDenseMatrix()).eval();
    Mat Q = Eigen::kroneckerProduct(Mat::Identity(2, 2), Eigen::Vector2d(0.3, 0.8).asDiagonal().toDenseMatrix()).eval();
    doc["maps"]["P"] = map_json(dims, 0, P);
    doc["maps"]["Q"] = map_json(dims, 0, Q);
    // phi = 0.25 sin(x) cos(y), psi = 0.2 x y + 0.1 cos(x)
    doc["phi"] = "0.25*sin(x)*cos(y)";
    doc["psi"] = "0.2*x*y + 0.1*cos(x)";
    doc["alpha1"] = json::array({
        {{"coeff", "-0.25*cos(x)*cos(y)"}, {"dx", {0}}, {"map", "P"}},
        {{"coeff", "0.25*sin(x)*sin(y)"}, {"dx", {1}}, {"map", "P"}},
        {{"coeff", "-(0.2*y - 0.1*sin(x))"}, {"dx", {0}}, {"map", "Q"}},
        {{"coeff", "-0.2*x"}, {"dx", {1}}, {"map", "Q"}},
    });
    doc["alpha2"] = json::array();
    merge(doc, geometry_block(2, false));
    doc["tier"] = "default";
    return doc;
}

/// FIX-C: alpha^1 = phi dx (x) M, alpha^2 = -dphi ^ dx (x) N', M = [d, N'], on (R -> R) (x) R^4, chart R^3.
inline json fix_c()
{
    Small W{{1, 1}, Mat::Zero(2, 2)};
    W.D(1, 0) = 1.0;
    const int u = 4;
    json doc;
    doc["name"] = "FIX-C";
    doc["description"] = "alpha1 = phi dx (x) [d,N'], alpha2 = -dphi^dx (x) N', N' = n (x) Y with Y nilpotent; chart R^3";
    doc["chart_dim"] = 3;
    doc["complex"] = complex_json(W, u);
    auto dims = tensor_dims(W, u);
    Mat n = Mat::Zero(2, 2);
    n(0, 1) = 1.0;
    Mat Y = shift(u);
    Mat Np = Eigen::kroneckerProduct(n, Y).eval();
    Mat D = Eigen::kroneckerProduct(W.D, Mat::Identity(u, u)).eval();
    Mat M = D * Np + Np * D;
    doc["maps"]["Nprime"] = map_json(dims, -1, Np);
    doc["maps"]["M"] = map_json(dims, 0, M);
    // phi = 0.7 cos(x) + 0.6 sin(2y) + 0.5 x z
    doc["phi"] = "0.7*cos(x) + 0.6*sin(2*y) + 0.5*x*z";
    doc["alpha1"] = json::array({{{"coeff", "0.7*cos(x) + 0.6*sin(2*y) + 0.5*x*z"}, {"dx", {0}}, {"map", "M"}}});
    // -dphi ^ dx = phi_y dx^dy + phi_z dx^dz
    doc["alpha2"] = json::array({{{"coeff", "1.2*cos(2*y)"}, {"dx", {0, 1}}, {"map", "Nprime"}},
                                 {{"coeff", "0.5*x"}, {"dx", {0, 2}}, {"map", "Nprime"}}});
    merge(doc, geometry_block(3, true));
    doc["tier"] = "default";
    return doc;
}

/// FIX-D: three-degree complex (R -> R^2 -> R) (x) R^4 with a nontrivial boundary image.
inline json fix_d()
{
    Small W{{1, 2, 1}, Mat::Zero(4, 4)};
    W.D(1, 0) = 1.0;   // d0 = (1, 0)^T
    W.D(3, 2) = 1.0;   // d1 = (0, 1)
    const int u = 4;
    json doc;
    doc["name"] = "FIX-D";
    doc["description"] = "three-degree complex; alpha1 = phi dx (x) [d,N'], alpha2 = -dphi^dx (x) N' + psi dx^dy (x) [d,H]";
    doc["chart_dim"] = 2;
    doc["complex"] = complex_json(W, u);
    auto dims = tensor_dims(W, u);
    Mat n = Mat::Zero(4, 4);
    n(0, 1) = 0.7;
    n(0, 2) = -0.4;
    n(1, 3) = 0.3;
    n(2, 3) = 0.9;
    Mat hw = Mat::Zero(4, 4);
    hw(0, 3) = 1.0;
    Mat Y = shift(u);
    Mat D = Eigen::kroneckerProduct(W.D, Mat::Identity(u, u)).eval();
    Mat Np = Eigen::kroneckerProduct(n, Y).eval();
    Mat H = Eigen::kroneckerProduct(hw, Y).eval();
    Mat M = D * Np + Np * D;
    Mat dH = D * H - H * D;
    doc["maps"]["Nprime"] = map_json(dims, -1, Np);
    doc["maps"]["M"] = map_json(dims, 0, M);
    doc["maps"]["dH"] = map_json(dims, -1, dH);
    doc["maps"]["H"] = map_json(dims, -2, H);
    doc["phi"] = "0.9*sin(x + y) + 0.4*y^2";
    doc["alpha1"] = json::array({{{"coeff", "0.9*sin(x + y) + 0.4*y^2"}, {"dx", {0}}, {"map", "M"}}});
    doc["alpha2"] = json::array({{{"coeff", "0.9*cos(x + y) + 0.8*y"}, {"dx", {0, 1}}, {"map", "Nprime"}},
                                 {{"coeff", "1 + 0.5*x*y"}, {"dx", {0, 1}}, {"map", "dH"}}});
    merge(doc, geometry_block(2, true));
    doc["tier"] = "default";
    return doc;
}

/**
 * FIX-E: alpha^1 = phi dx (x) M1 + psi dy (x) M2 with [M1, M2] != 0, and
 * alpha^2 = dx^dy (x) (phi_y N1 - psi_x N2 - phi psi N12) solving the
 * degree-2 flatness equation; Mi = id (x) Yi, Ni = n (x) Yi, N12 = n (x) [Y1, Y2].
 */
inline json fix_e()
{
    Small W{{1, 1}, Mat::Zero(2, 2)};
    W.D(1, 0) = 1.0;
    const int u = 3;
    json doc;
    doc["name"] = "FIX-E";
    doc["description"] = "non-commuting alpha1 = phi dx (x) M1 + psi dy (x) M2 on (R -> R) (x) R^3, alpha2 fixed by flatness";
    doc["chart_dim"] = 2;
    doc["complex"] = complex_json(W, u);
    auto dims = tensor_dims(W, u);
    Mat Y1 = Mat::Zero(u, u), Y2 = Mat::Zero(u, u);
    Y1(1, 0) = 1.0;
    Y2(2, 1) = 1.0;
    Mat n = Mat::Zero(2, 2);
    n(0, 1) = 1.0;
    Mat I2 = Mat::Identity(2, 2);
    doc["maps"]["M1"] = map_json(dims, 0, Eigen::kroneckerProduct(I2, Y1).eval());
    doc["maps"]["M2"] = map_json(dims, 0, Eigen::kroneckerProduct(I2, Y2).eval());
    doc["maps"]["N1"] = map_json(dims, -1, Eigen::kroneckerProduct(n, Y1).eval());
    doc["maps"]["N2"] = map_json(dims, -1, Eigen::kroneckerProduct(n, Y2).eval());
    Mat Y12 = Y1 * Y2 - Y2 * Y1;
    doc["maps"]["N12"] = map_json(dims, -1, Eigen::kroneckerProduct(n, Y12).eval());
    // phi = 0.8 + 0.5 sin(y) + 0.3 x, psi = 0.6 cos(x) - 0.4 y
    doc["phi"] = "0.8 + 0.5*sin(y) + 0.3*x";
    doc["psi"] = "0.6*cos(x) - 0.4*y";
    doc["alpha1"] = json::array({{{"coeff", "0.8 + 0.5*sin(y) + 0.3*x"}, {"dx", {0}}, {"map", "M1"}},
                                 {{"coeff", "0.6*cos(x) - 0.4*y"}, {"dx", {1}}, {"map", "M2"}}});
    doc["alpha2"] = json::array({{{"coeff", "0.5*cos(y)"}, {"dx", {0, 1}}, {"map", "N1"}},
                                 {{"coeff", "0.6*sin(x)"}, {"dx", {0, 1}}, {"map", "N2"}},
                                 {{"coeff", "-(0.8 + 0.5*sin(y) + 0.3*x)*(0.6*cos(x) - 0.4*y)"},
                                  {"dx", {0, 1}},
                                  {"map", "N12"}}});
    merge(doc, geometry_block(2, false));
    doc["tier"] = "default";
    return doc;
}

inline const std::vector<std::string>& names()
{
    static const std::vector<std::string> n{"FIX-A", "FIX-B", "FIX-C", "FIX-D", "FIX-E"};
    return n;
}

inline json document(const std::string& name)
{
    if (name == "FIX-A") return fix_a();
    if (name == "FIX-B") return fix_b();
    if (name == "FIX-C") return fix_c();
    if (name == "FIX-D") return fix_d();
    if (name == "FIX-E") return fix_e();
    throw FixtureError("unknown built-in fixture '" + name + "'");
}

}  // namespace catalog

/**
 * Load by built-in name, by NAME.json in $HOLONOMY_FIXTURE_DIR, or by path.
 */
inline Fixture load_fixture(const std::string& name_or_path, double fd_step = 1e-4)
{
    namespace fs = std::filesystem;
    auto from_file = [&](const fs::path& p) {
        std::ifstream in(p);
        if (!in) throw FixtureError("cannot open fixture file " + p.string());
        json doc;
        try {
            in >> doc;
        } catch (const json::exception& e) {
            throw FixtureError("malformed fixture document " + p.string() + ": " + e.what());
        }
        return load_fixture_json(doc, fd_step);
    };
    if (const char* dir = std::getenv("HOLONOMY_FIXTURE_DIR")) {
        fs::path p = fs::path(dir) / (name_or_path + ".json");
        if (fs::exists(p)) return from_file(p);
    }
    for (const auto& n : catalog::names())
        if (n == name_or_path) return load_fixture_json(catalog::document(n), fd_step);
    if (fs::exists(name_or_path)) return from_file(name_or_path);
    throw FixtureError("unknown fixture '" + name_or_path + "'");
}

}  // namespace holonomy
