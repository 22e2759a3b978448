/**
 * @file crossed_module.hpp
 * @brief The crossed module GL(V) = (GL^{-1}(V) -> GL^0(V)) of a cochain
 *        complex and its infinitesimal version gl(V).
 *
 * GL^{-1}(V) elements are carried as degree -1 representatives; equality is
 * always tested through quotient_project.
 */
#pragma once

#include "graded_linalg.hpp"

#include <Eigen/LU>
#include <string>

namespace holonomy {

/// Raised when a group element leaves its domain (non-invertible, not a chain map).
class DegeneracyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Chain automorphism of V.
 */
class Gl0Element {
public:
    Gl0Element() = default;

    /**
     * @param chain_tol  bound on ||[d, map]|| relative to max(1, ||map||).
     */
    explicit Gl0Element(GradedMap map, double chain_tol = 1e-12) : map_(std::move(map))
    {
        if (map_.degree() != 0) throw StructuralError("Gl0Element needs a degree 0 map");
        double scale = std::max(1.0, map_.norm());
        double r = graded_commutator_with_differential(map_).norm();
        if (!(r <= chain_tol * scale))
            throw DegeneracyError("not a chain map: ||[d,g]|| = " + std::to_string(r));
        Eigen::FullPivLU<Mat> lu(map_.matrix());
        if (!lu.isInvertible()) throw DegeneracyError("chain map is not invertible");
    }

    static Gl0Element identity(const ComplexPtr& cx) { return Gl0Element(GradedMap::identity(cx)); }

    const GradedMap& map() const { return map_; }
    const Mat& matrix() const { return map_.matrix(); }
    const ComplexPtr& complex() const { return map_.complex(); }

    Gl0Element operator*(const Gl0Element& o) const
    {
        return trusted(compose(map_, o.map_));
    }

    Gl0Element inverse() const
    {
        return trusted(GradedMap::unchecked(complex(), 0, map_.matrix().inverse()));
    }

    /// Skip validation (results of group operations on valid elements).
    static Gl0Element trusted(GradedMap m)
    {
        Gl0Element g;
        g.map_ = std::move(m);
        return g;
    }

private:
    GradedMap map_;
};

/**
 * Element of GL^{-1}(V): a degree -1 representative s with [d,s] + id invertible.
 */
class Glm1Element {
public:
    Glm1Element() = default;

    explicit Glm1Element(GradedMap rep) : rep_(std::move(rep))
    {
        if (rep_.degree() != -1) throw StructuralError("Glm1Element needs a degree -1 map");
        Mat d = graded_commutator_with_differential(rep_).matrix();
        d.diagonal().array() += 1.0;
        Eigen::FullPivLU<Mat> lu(d);
        if (!lu.isInvertible()) throw DegeneracyError("[d,s] + id is not invertible");
    }

    static Glm1Element unit(const ComplexPtr& cx) { return Glm1Element(GradedMap(cx, -1)); }

    const GradedMap& rep() const { return rep_; }
    const Mat& matrix() const { return rep_.matrix(); }
    const ComplexPtr& complex() const { return rep_.complex(); }

    static Glm1Element trusted(GradedMap m)
    {
        Glm1Element e;
        e.rep_ = std::move(m);
        return e;
    }

private:
    GradedMap rep_;
};

/// Quotient distance between two GL^{-1} elements.
inline double quotient_distance(const Glm1Element& a, const Glm1Element& b)
{
    return quotient_distance(a.rep(), b.rep());
}

/// delta(s) = [d, s] + id.
inline Gl0Element delta(const Glm1Element& s)
{
    GradedMap c = graded_commutator_with_differential(s.rep());
    return Gl0Element::trusted(c + GradedMap::identity(s.complex()));
}

/// s * t = s + t + s [d, t].
inline Glm1Element star(const Glm1Element& s, const Glm1Element& t)
{
    if (s.complex() != t.complex()) throw StructuralError("star: complex mismatch");
    GradedMap r = s.rep() + t.rep() + compose(s.rep(), graded_commutator_with_differential(t.rep()));
    return Glm1Element::trusted(std::move(r));
}

/// Inverse for *: -s delta(s)^{-1}.
inline Glm1Element inverse(const Glm1Element& s)
{
    return Glm1Element::trusted(-compose(s.rep(), delta(s).inverse().map()));
}

/// phi |> s = phi s phi^{-1}.
inline Glm1Element act(const Gl0Element& phi, const Glm1Element& s)
{
    if (phi.complex() != s.complex()) throw StructuralError("act: complex mismatch");
    return Glm1Element::trusted(compose(compose(phi.map(), s.rep()), phi.inverse().map()));
}

/// Raised by exp_glm1 when the series does not settle within the diagonal cap.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * exp(A) = sum_{i,j>=0} (A d)^i A (A d)^j / (i+j+1)!, summed one diagonal
 * i+j = n at a time until a diagonal has Frobenius norm below @p tol.
 */
inline Glm1Element exp_glm1(const GradedMap& A, double tol = 1e-16)
{
    if (A.degree() != -1) throw StructuralError("exp_glm1 expects a degree -1 map");
    constexpr int kMaxDiagonals = 200;
    const Mat P = A.matrix() * A.complex()->D();
    std::vector<Mat> powers{Mat::Identity(P.rows(), P.cols())};
    Mat sum = A.matrix();
    double fact = 1.0;   // (n+1)!
    for (int n = 1; n <= kMaxDiagonals; ++n) {
        powers.push_back(powers.back() * P);
        fact *= (n + 1);
        Mat diag = Mat::Zero(P.rows(), P.cols());
        for (int i = 0; i <= n; ++i) diag += powers[i] * A.matrix() * powers[n - i];
        diag /= fact;
        sum += diag;
        if (diag.norm() < tol) {
            GradedMap r = GradedMap::unchecked(A.complex(), -1, sum);
            return Glm1Element(std::move(r));
        }
    }
    throw ConvergenceError("exp_glm1: no convergence within 200 diagonals");
}

/// [A, B] = A d B - B d A + A B d - B A d on End^{-1}.
inline GradedMap bracket_glm1(const GradedMap& A, const GradedMap& B)
{
    if (A.complex() != B.complex()) throw StructuralError("bracket: complex mismatch");
    const Mat& D = A.complex()->D();
    const Mat& a = A.matrix();
    const Mat& b = B.matrix();
    return GradedMap::unchecked(A.complex(), -1, a * D * b - b * D * a + a * b * D - b * a * D);
}

/// (L_e)_* X = X + e [d, X].
inline GradedMap left_translate_diff(const Glm1Element& e, const GradedMap& X)
{
    return X + compose(e.rep(), graded_commutator_with_differential(X));
}

/// Infinitesimal action of gl^0 on gl^{-1}: X |> v = X v - v X.
inline GradedMap inf_act(const GradedMap& X, const GradedMap& v)
{
    return compose(X, v) - compose(v, X);
}

/// Infinitesimal delta: v -> [d, v].
inline GradedMap inf_delta(const GradedMap& v)
{
    return graded_commutator_with_differential(v);
}

/// Commutator bracket on gl^0.
inline GradedMap commutator(const GradedMap& X, const GradedMap& Y)
{
    return compose(X, Y) - compose(Y, X);
}

}  // namespace holonomy
