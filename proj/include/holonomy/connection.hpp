/**
 * @file connection.hpp
 * @brief Superconnection form fields alpha^1 + alpha^2 + alpha^3 on a chart,
 *        their flatness residuals, and the truncated 2-connection (A, B).
 *
 * A form component is a sum of terms  c(x) dx_{i1} ^ ... ^ dx_{ip} (x) M  with
 * c an expression in x, y, z and M a constant graded map.
 */
#pragma once

#include "crossed_module.hpp"
#include "expr_parser.hpp"
#include "geometry.hpp"

#include <memory>
#include <string>
#include <vector>

namespace holonomy {

struct FormTerm {
    Expr coeff;             // in x, y, z
    std::vector<int> dx;    // chart coordinate indices, one per form degree
    GradedMap map;
};

class FlatnessError : public std::runtime_error {
public:
    FlatnessError(const std::string& msg, Point at, double r)
        : std::runtime_error(msg), point(std::move(at)), residual(r) {}
    Point point;
    double residual;
};

namespace detail {

inline double coeff_at(const Expr& e, const Point& x)
{
    std::array<double, kNumVars> vars{};
    for (int i = 0; i < x.size() && i < 3; ++i) vars[2 + i] = x(i);
    return eval<double>(e, vars);
}

/// dx_{i1} ^ ... ^ dx_{ip} evaluated on p vectors (a p x p determinant).
inline double wedge_dx(const std::vector<int>& idx, const std::vector<const Point*>& vs)
{
    const std::size_t p = idx.size();
    if (p == 1) return (*vs[0])(idx[0]);
    if (p == 2) return (*vs[0])(idx[0]) * (*vs[1])(idx[1]) - (*vs[1])(idx[0]) * (*vs[0])(idx[1]);
    Eigen::Matrix3d m;
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c) m(r, c) = (*vs[c])(idx[r]);
    return m.determinant();
}

}  // namespace detail

/**
 * Superconnection with values in (V, d): alpha^i takes values in End^{1-i}(V).
 */
class SuperconnectionField {
public:
    SuperconnectionField(ComplexPtr cx, int chart_dim, std::vector<FormTerm> a1, std::vector<FormTerm> a2,
                         std::vector<FormTerm> a3 = {})
        : cx_(std::move(cx)), n_(chart_dim)
    {
        if (n_ < 1 || n_ > 3) throw StructuralError("chart dimension must be 1, 2 or 3");
        terms_[0] = std::move(a1);
        terms_[1] = std::move(a2);
        terms_[2] = std::move(a3);
        for (int p = 1; p <= 3; ++p) {
            for (auto& t : terms_[p - 1]) {
                if (t.map.complex() != cx_) throw StructuralError("form term lives on another complex");
                if (t.map.degree() != 1 - p)
                    throw StructuralError("alpha^" + std::to_string(p) + " term must have degree " +
                                          std::to_string(1 - p));
                if (static_cast<int>(t.dx.size()) != p)
                    throw StructuralError("alpha^" + std::to_string(p) + " term needs " + std::to_string(p) +
                                          " dx indices");
                for (int i : t.dx)
                    if (i < 0 || i >= n_) throw StructuralError("dx index out of chart range");
            }
        }
    }

    /// Zero superconnection.
    static SuperconnectionField zero(ComplexPtr cx, int chart_dim)
    {
        return SuperconnectionField(std::move(cx), chart_dim, {}, {}, {});
    }

    const ComplexPtr& complex() const { return cx_; }
    int chart_dim() const { return n_; }
    const std::vector<FormTerm>& terms(int p) const { return terms_[p - 1]; }
    bool has_alpha1() const { return !terms_[0].empty(); }

    /// alpha^p at x on the given vectors, as a total matrix.
    Mat eval_form(int p, const Point& x, const std::vector<const Point*>& vs) const
    {
        const int N = cx_->total_dim();
        Mat out = Mat::Zero(N, N);
        for (const auto& t : terms_[p - 1]) {
            double w = detail::wedge_dx(t.dx, vs);
            if (w == 0.0) continue;
            out += (detail::coeff_at(t.coeff, x) * w) * t.map.matrix();
        }
        return out;
    }

    Mat a1(const Point& x, const Point& v) const { return eval_form(1, x, {&v}); }
    Mat a2(const Point& x, const Point& v, const Point& w) const { return eval_form(2, x, {&v, &w}); }
    Mat a3(const Point& x, const Point& u, const Point& v, const Point& w) const
    {
        return eval_form(3, x, {&u, &v, &w});
    }

    GradedMap alpha1(const Point& x, const Point& v) const { return GradedMap::unchecked(cx_, 0, a1(x, v)); }
    GradedMap alpha2(const Point& x, const Point& v, const Point& w) const
    {
        return GradedMap::unchecked(cx_, -1, a2(x, v, w));
    }
    GradedMap alpha3(const Point& x, const Point& u, const Point& v, const Point& w) const
    {
        return GradedMap::unchecked(cx_, -2, a3(x, u, v, w));
    }

private:
    ComplexPtr cx_;
    int n_;
    std::vector<FormTerm> terms_[3];
};

/**
 * Left side of the flatness equation of form degree n at x:
 *   n = 1 : [d, a1]
 *   n = 2 : [d, a2] + d a1 + a1 ^ a1
 *   n = 3 : [d, a3] + d a2 + a1 ^ a2 - a2 ^ a1
 * Exterior derivatives use central differences of step h.
 */
inline GradedMap flatness_residual(const SuperconnectionField& al, const Point& x, const std::vector<Point>& vs,
                                   int n, double h)
{
    if (n < 1 || n > 3) throw StructuralError("flatness_residual: n must be 1, 2 or 3");
    if (static_cast<int>(vs.size()) != n) throw StructuralError("flatness_residual: need n vectors");
    const ComplexPtr& cx = al.complex();
    const Mat& D = cx->D();
    auto shifted = [&](const Point& v, double sgn) { return Point(x + sgn * h * v); };
    if (n == 1) {
        Mat a = al.a1(x, vs[0]);
        return GradedMap::unchecked(cx, 1, D * a - a * D);
    }
    if (n == 2) {
        const Point &v = vs[0], &w = vs[1];
        Mat b = al.a2(x, v, w);
        Mat r = D * b + b * D;
        Mat dv = (al.a1(shifted(v, 1), w) - al.a1(shifted(v, -1), w)) / (2 * h);
        Mat dw = (al.a1(shifted(w, 1), v) - al.a1(shifted(w, -1), v)) / (2 * h);
        Mat av = al.a1(x, v), aw = al.a1(x, w);
        r += dv - dw + av * aw - aw * av;
        return GradedMap::unchecked(cx, 0, r);
    }
    const Point &u = vs[0], &v = vs[1], &w = vs[2];
    Mat c = al.a3(x, u, v, w);
    Mat r = D * c - c * D;
    auto D2 = [&](const Point& dir, const Point& p1, const Point& p2) {
        return Mat((al.a2(shifted(dir, 1), p1, p2) - al.a2(shifted(dir, -1), p1, p2)) / (2 * h));
    };
    r += D2(u, v, w) - D2(v, u, w) + D2(w, u, v);
    Mat au = al.a1(x, u), av = al.a1(x, v), aw = al.a1(x, w);
    Mat bvw = al.a2(x, v, w), buw = al.a2(x, u, w), buv = al.a2(x, u, v);
    r += au * bvw - av * buw + aw * buv;   // a1 ^ a2
    r -= buv * aw - buw * av + bvw * au;   // a2 ^ a1
    return GradedMap::unchecked(cx, -1, r);
}

/// Nine sample points of the unit box of the chart.
inline std::vector<Point> sample_grid(int chart_dim)
{
    std::vector<Point> pts;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            Point p = Point::Zero(chart_dim);
            p(0) = 0.1 + 0.4 * i;
            if (chart_dim > 1) p(1) = 0.1 + 0.4 * j;
            if (chart_dim > 2) p(2) = 0.1 + 0.2 * ((i + 2 * j) % 5);
            if (chart_dim == 1) p(0) = 0.05 + 0.1 * (3 * i + j);
            pts.push_back(p);
        }
    return pts;
}

/// Standard basis vector e_i of R^n.
inline Point basis_vector(int n, int i)
{
    Point e = Point::Zero(n);
    e(i) = 1.0;
    return e;
}

/**
 * Largest flatness residual (n = 1, 2, 3) over the sample grid and all
 * coordinate vector tuples.  Returns the offending point through @p where.
 */
inline double max_flatness_residual(const SuperconnectionField& al, double h, Point* where = nullptr)
{
    const int n = al.chart_dim();
    double worst = 0.0;
    for (const Point& x : sample_grid(n)) {
        auto note = [&](double r) {
            if (r > worst) {
                worst = r;
                if (where) *where = x;
            }
        };
        for (int i = 0; i < n; ++i) note(flatness_residual(al, x, {basis_vector(n, i)}, 1, h).norm());
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                note(flatness_residual(al, x, {basis_vector(n, i), basis_vector(n, j)}, 2, h).norm());
        if (n == 3)
            note(flatness_residual(al, x, {basis_vector(3, 0), basis_vector(3, 1), basis_vector(3, 2)}, 3, h)
                     .norm());
    }
    return worst;
}

/**
 * Truncated 2-connection A = alpha^1, B = -pi(alpha^2), valued in gl(V).
 */
class TwoConnection {
public:
    explicit TwoConnection(std::shared_ptr<const SuperconnectionField> al) : al_(std::move(al))
    {
        // pi is linear, so project each constant term map once
        for (const auto& t : al_->terms(2)) projected_.push_back(-quotient_project(t.map).matrix());
    }

    const ComplexPtr& complex() const { return al_->complex(); }
    int chart_dim() const { return al_->chart_dim(); }
    const SuperconnectionField& field() const { return *al_; }

    Mat A(const Point& x, const Point& v) const { return al_->a1(x, v); }
    Mat B(const Point& x, const Point& v, const Point& w) const
    {
        const int N = al_->complex()->total_dim();
        Mat out = Mat::Zero(N, N);
        const auto& terms = al_->terms(2);
        for (std::size_t i = 0; i < terms.size(); ++i) {
            double wv = detail::wedge_dx(terms[i].dx, {&v, &w});
            if (wv == 0.0) continue;
            out += (detail::coeff_at(terms[i].coeff, x) * wv) * projected_[i];
        }
        return out;
    }

private:
    std::shared_ptr<const SuperconnectionField> al_;
    std::vector<Mat> projected_;
};

/**
 * A := alpha^1, B := -pi o alpha^2.  Rejects fields whose flatness residual on
 * the sample grid exceeds @p tol.
 */
inline TwoConnection truncate_connection(std::shared_ptr<const SuperconnectionField> al, double h = 1e-4,
                                         double tol = 1e-6)
{
    Point where;
    double r = max_flatness_residual(*al, h, &where);
    if (r > tol) throw FlatnessError("superconnection is not flat (residual " + std::to_string(r) + ")", where, r);
    return TwoConnection(std::move(al));
}

struct CurvatureResiduals {
    GradedMap FA_minus_deltaB;   // dA + [A, A]/2 - [d, B] on (v, w)
    GradedMap curv3;             // dB + A ^|> B on (v, w, u)
};

/**
 * Curvatures of a 2-connection at x.  curv3 vanishes in the quotient
 * End^{-1}/[d, End^{-2}] for flat truncations; compare via quotient_project.
 */
inline CurvatureResiduals curvature_two_connection(const TwoConnection& c, const Point& x, const Point& v,
                                                   const Point& w, const Point& u, double h)
{
    const ComplexPtr& cx = c.complex();
    const Mat& D = cx->D();
    auto sh = [&](const Point& d, double sg) { return Point(x + sg * h * d); };
    Mat dA = (c.A(sh(v, 1), w) - c.A(sh(v, -1), w) - c.A(sh(w, 1), v) + c.A(sh(w, -1), v)) / (2 * h);
    Mat Av = c.A(x, v), Aw = c.A(x, w), Au = c.A(x, u);
    Mat Bvw = c.B(x, v, w);
    Mat F = dA + Av * Aw - Aw * Av - (D * Bvw + Bvw * D);
    auto dB = [&](const Point& dir, const Point& p1, const Point& p2) {
        return Mat((c.B(sh(dir, 1), p1, p2) - c.B(sh(dir, -1), p1, p2)) / (2 * h));
    };
    Mat curv = dB(v, w, u) - dB(w, v, u) + dB(u, v, w);
    Mat Bwu = c.B(x, w, u), Buv = c.B(x, u, v);
    curv += (Av * Bwu - Bwu * Av) + (Aw * Buv - Buv * Aw) + (Au * Bvw - Bvw * Au);
    return {GradedMap::unchecked(cx, 0, F), GradedMap::unchecked(cx, -1, curv)};
}

}  // namespace holonomy
