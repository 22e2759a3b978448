/**
 * @file geometry.hpp
 * @brief Paths, 2-paths and simplex maps into a chart R^n, the (co)simplicial
 *        structure maps, and the reparametrisations q, lambda, Theta, a, b, mu.
 *
 * Every map carries exact first derivatives alongside its values, plus the
 * parameter values where it may fail to be smooth, so integrators can split
 * there.
 */
#pragma once

#include "expr_parser.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace holonomy {

/// Point or tangent vector in the chart (n <= 4).
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 4, 1>;

class GeometryError : public std::runtime_error {
public:
    GeometryError(const std::string& msg, double deviation = 0.0)
        : std::runtime_error(msg), max_deviation(deviation) {}
    double max_deviation;
};

/// Sorted, de-duplicated interior points of (0,1).
inline std::vector<double> normalize_breaks(std::vector<double> b)
{
    std::vector<double> out;
    for (double x : b)
        if (x > 1e-14 && x < 1.0 - 1e-14) out.push_back(x);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(), [](double a, double c) { return std::abs(a - c) < 1e-14; }),
              out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Paths
// ---------------------------------------------------------------------------

struct PathSample {
    Point p;   // gamma(t)
    Point v;   // gamma'(t)
};

/**
 * Piecewise smooth map [0,1] -> R^n.
 */
struct Path {
    int dim = 0;
    std::function<PathSample(double)> eval;
    std::vector<double> breaks;

    Point operator()(double t) const { return eval(t).p; }
};

inline Path constant_path(const Point& x)
{
    Point zero = Point::Zero(x.size());
    return Path{static_cast<int>(x.size()), [x, zero](double) { return PathSample{x, zero}; }, {}};
}

/// Path from component expressions in t.
inline Path expr_path(const std::vector<Expr>& comps)
{
    const int n = static_cast<int>(comps.size());
    return Path{n,
                [comps, n](double t) {
                    std::array<Jet, kNumVars> vars{};
                    vars[0] = Jet(t, 1.0, 0.0);
                    PathSample out{Point(n), Point(n)};
                    for (int i = 0; i < n; ++i) {
                        Jet j = eval<Jet>(comps[i], vars);
                        out.p(i) = j.v;
                        out.v(i) = j.dt;
                    }
                    return out;
                },
                {}};
}

/// Straight segment from a to b.
inline Path segment_path(const Point& a, const Point& b)
{
    return Path{static_cast<int>(a.size()),
                [a, b](double t) { return PathSample{Point(a + t * (b - a)), Point(b - a)}; }, {}};
}

/// reverse(gamma)(t) = gamma(1 - t).
inline Path reverse_path(const Path& g)
{
    std::vector<double> br;
    for (double b : g.breaks) br.push_back(1.0 - b);
    auto f = g.eval;
    return Path{g.dim, [f](double t) {
                    PathSample s = f(1.0 - t);
                    s.v = -s.v;
                    return s;
                },
                normalize_breaks(br)};
}

/**
 * gamma first, then sigma, each at double speed; requires gamma(1) = sigma(0).
 */
inline Path concat_paths(const Path& g, const Path& h, double tol = 1e-9)
{
    if (g.dim != h.dim) throw GeometryError("concat_paths: dimension mismatch");
    double dev = (g(1.0) - h(0.0)).norm();
    if (dev > tol) throw GeometryError("concat_paths: endpoints do not match", dev);
    std::vector<double> br{0.5};
    for (double b : g.breaks) br.push_back(0.5 * b);
    for (double b : h.breaks) br.push_back(0.5 + 0.5 * b);
    auto f1 = g.eval, f2 = h.eval;
    return Path{g.dim, [f1, f2](double t) {
                    PathSample s = t < 0.5 ? f1(2.0 * t) : f2(2.0 * t - 1.0);
                    s.v *= 2.0;
                    return s;
                },
                normalize_breaks(br)};
}

// ---------------------------------------------------------------------------
// 2-paths
// ---------------------------------------------------------------------------

struct TwoSample {
    Point p;    // Gamma(t,s)
    Point pt;   // dGamma/dt
    Point ps;   // dGamma/ds
};

/**
 * Piecewise smooth map I^2 -> R^n.  A genuine 2-path is constant on the
 * vertical sides t = 0 and t = 1; @c relaxed marks squares that are not
 * (allowed only where the connection kills the side velocity).
 */
struct TwoPath {
    int dim = 0;
    std::function<TwoSample(double, double)> eval;
    std::vector<double> t_breaks, s_breaks;
    bool relaxed = false;

    Point operator()(double t, double s) const { return eval(t, s).p; }
};

/// Largest drift of Gamma(0, s) and Gamma(1, s) over 33 samples of s.
inline double vertical_side_deviation(const TwoPath& G)
{
    double dev = 0.0;
    Point a0 = G(0.0, 0.0), a1 = G(1.0, 0.0);
    for (int i = 1; i <= 32; ++i) {
        double s = i / 32.0;
        dev = std::max(dev, (G(0.0, s) - a0).norm());
        dev = std::max(dev, (G(1.0, s) - a1).norm());
    }
    return dev;
}

/// Throws unless Gamma is constant on its vertical sides (skipped for relaxed squares).
inline void validate_two_path(const TwoPath& G, double tol = 1e-12)
{
    if (G.relaxed) return;
    double dev = vertical_side_deviation(G);
    if (dev > tol) throw GeometryError("2-path is not constant on its vertical sides", dev);
}

inline TwoPath constant_two_path(const Point& x)
{
    Point zero = Point::Zero(x.size());
    return TwoPath{static_cast<int>(x.size()), [x, zero](double, double) { return TwoSample{x, zero, zero}; },
                   {}, {}, false};
}

/// 2-path from component expressions in t, s.
inline TwoPath expr_two_path(const std::vector<Expr>& comps, bool relaxed = false)
{
    const int n = static_cast<int>(comps.size());
    TwoPath G{n,
              [comps, n](double t, double s) {
                  std::array<Jet, kNumVars> vars{};
                  vars[0] = Jet(t, 1.0, 0.0);
                  vars[1] = Jet(s, 0.0, 1.0);
                  TwoSample out{Point(n), Point(n), Point(n)};
                  for (int i = 0; i < n; ++i) {
                      Jet j = eval<Jet>(comps[i], vars);
                      out.p(i) = j.v;
                      out.pt(i) = j.dt;
                      out.ps(i) = j.ds;
                  }
                  return out;
              },
              {}, {}, relaxed};
    return G;
}

/**
 * Self-map phi of I^2 with Jacobian, used to reparametrise 2-paths.
 */
struct SquareMap {
    std::function<void(double, double, double&, double&, Eigen::Matrix2d&)> eval;
    std::vector<double> t_breaks, s_breaks;   // kinks of phi itself
    /// preimages of the lines t' = c and s' = c (phi monotone per axis)
    std::function<double(double)> t_preimage, s_preimage;
};

/// Gamma o phi.
inline TwoPath precompose(const TwoPath& G, const SquareMap& phi, bool relaxed)
{
    std::vector<double> tb = phi.t_breaks, sb = phi.s_breaks;
    if (phi.t_preimage)
        for (double c : G.t_breaks) tb.push_back(phi.t_preimage(c));
    if (phi.s_preimage)
        for (double c : G.s_breaks) sb.push_back(phi.s_preimage(c));
    auto f = G.eval;
    auto m = phi.eval;
    return TwoPath{G.dim,
                   [f, m](double t, double s) {
                       double u, w;
                       Eigen::Matrix2d J;
                       m(t, s, u, w, J);
                       TwoSample a = f(u, w);
                       return TwoSample{a.p, Point(a.pt * J(0, 0) + a.ps * J(1, 0)),
                                        Point(a.pt * J(0, 1) + a.ps * J(1, 1))};
                   },
                   normalize_breaks(tb), normalize_breaks(sb), relaxed};
}

/// Path t -> Gamma(t, s).
inline Path slice(const TwoPath& G, double s)
{
    auto f = G.eval;
    return Path{G.dim, [f, s](double t) { auto x = f(t, s); return PathSample{x.p, x.pt}; }, G.t_breaks};
}

/// Gamma_0(t) = Gamma(t, 0).
inline Path edge0(const TwoPath& G) { return slice(G, 0.0); }
/// Gamma_1(t) = Gamma(t, 1).
inline Path edge1(const TwoPath& G) { return slice(G, 1.0); }

/// Gamma_d(t) = Gamma(t, t).
inline Path diagonal(const TwoPath& G)
{
    auto f = G.eval;
    std::vector<double> br = G.t_breaks;
    br.insert(br.end(), G.s_breaks.begin(), G.s_breaks.end());
    return Path{G.dim, [f](double t) { auto x = f(t, t); return PathSample{x.p, Point(x.pt + x.ps)}; },
                normalize_breaks(br)};
}

/// Path s -> Gamma(t, s) (a vertical side when t is 0 or 1).
inline Path vertical(const TwoPath& G, double t)
{
    auto f = G.eval;
    return Path{G.dim, [f, t](double s) { auto x = f(t, s); return PathSample{x.p, x.ps}; }, G.s_breaks};
}

struct TwoPathSlices {
    Path edge0, edge1, diagonal;
    std::function<Path(double)> slice;
};

inline TwoPathSlices two_path_slices(const TwoPath& G)
{
    return {edge0(G), edge1(G), diagonal(G), [G](double s) { return slice(G, s); }};
}

/**
 * Vertical composition: Gamma' fills s in [0, 1/2], Gamma fills [1/2, 1].
 * Requires Gamma'(t, 1) = Gamma(t, 0).
 */
inline TwoPath compose_two_paths_vertical(const TwoPath& G, const TwoPath& Gp, double tol = 1e-9)
{
    if (G.dim != Gp.dim) throw GeometryError("vertical composition: dimension mismatch");
    double dev = 0.0;
    for (int i = 0; i <= 32; ++i) {
        double t = i / 32.0;
        dev = std::max(dev, (Gp(t, 1.0) - G(t, 0.0)).norm());
    }
    if (dev > tol) throw GeometryError("vertical composition: edges do not match", dev);
    std::vector<double> tb = G.t_breaks, sb{0.5};
    tb.insert(tb.end(), Gp.t_breaks.begin(), Gp.t_breaks.end());
    for (double b : Gp.s_breaks) sb.push_back(0.5 * b);
    for (double b : G.s_breaks) sb.push_back(0.5 + 0.5 * b);
    auto top = G.eval, bottom = Gp.eval;
    return TwoPath{G.dim,
                   [top, bottom](double t, double s) {
                       TwoSample x = s < 0.5 ? bottom(t, 2.0 * s) : top(t, 2.0 * s - 1.0);
                       x.ps *= 2.0;
                       return x;
                   },
                   normalize_breaks(tb), normalize_breaks(sb), G.relaxed || Gp.relaxed};
}

/**
 * Horizontal composition: Gamma' fills t in [0, 1/2], Gamma fills [1/2, 1].
 * Requires Gamma'(1, s) = Gamma(0, s).
 */
inline TwoPath compose_two_paths_horizontal(const TwoPath& G, const TwoPath& Gp, double tol = 1e-9)
{
    if (G.dim != Gp.dim) throw GeometryError("horizontal composition: dimension mismatch");
    double dev = 0.0;
    for (int i = 0; i <= 32; ++i) {
        double s = i / 32.0;
        dev = std::max(dev, (Gp(1.0, s) - G(0.0, s)).norm());
    }
    if (dev > tol) throw GeometryError("horizontal composition: sides do not match", dev);
    std::vector<double> sb = G.s_breaks, tb{0.5};
    sb.insert(sb.end(), Gp.s_breaks.begin(), Gp.s_breaks.end());
    for (double b : Gp.t_breaks) tb.push_back(0.5 * b);
    for (double b : G.t_breaks) tb.push_back(0.5 + 0.5 * b);
    auto right = G.eval, left = Gp.eval;
    return TwoPath{G.dim,
                   [right, left](double t, double s) {
                       TwoSample x = t < 0.5 ? left(2.0 * t, s) : right(2.0 * t - 1.0, s);
                       x.pt *= 2.0;
                       return x;
                   },
                   normalize_breaks(tb), normalize_breaks(sb), G.relaxed || Gp.relaxed};
}

// ---------------------------------------------------------------------------
// Simplices
// ---------------------------------------------------------------------------

struct SimplexSample {
    Point p;
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4> J;   // n x k
};

/**
 * Smooth map Delta_k -> R^n, Delta_k = {1 >= t_1 >= ... >= t_k >= 0}.
 * breaks[j] lists values c where the map may kink along t_{j+1} = c.
 */
struct SimplexMap {
    int k = 0;
    int dim = 0;
    std::function<SimplexSample(const std::vector<double>&)> eval;
    std::vector<std::vector<double>> breaks;

    Point operator()(const std::vector<double>& t) const { return eval(t).p; }
};

/// 2-simplex (or any k <= 2) from expressions; t_1 is bound to t, t_2 to s.
inline SimplexMap expr_simplex(int k, const std::vector<Expr>& comps)
{
    if (k < 0 || k > 2) throw GeometryError("expression simplices support k <= 2");
    const int n = static_cast<int>(comps.size());
    return SimplexMap{k, n,
                      [comps, n, k](const std::vector<double>& x) {
                          std::array<Jet, kNumVars> vars{};
                          if (k >= 1) vars[0] = Jet(x[0], 1.0, 0.0);
                          if (k >= 2) vars[1] = Jet(x[1], 0.0, 1.0);
                          SimplexSample out{Point(n), {}};
                          out.J.resize(n, k);
                          for (int i = 0; i < n; ++i) {
                              Jet j = eval<Jet>(comps[i], vars);
                              out.p(i) = j.v;
                              if (k >= 1) out.J(i, 0) = j.dt;
                              if (k >= 2) out.J(i, 1) = j.ds;
                          }
                          return out;
                      },
                      std::vector<std::vector<double>>(k)};
}

inline SimplexMap path_as_simplex(const Path& g)
{
    auto f = g.eval;
    return SimplexMap{1, g.dim,
                      [f](const std::vector<double>& x) {
                          PathSample s = f(x[0]);
                          SimplexSample out{s.p, {}};
                          out.J = s.v;
                          return out;
                      },
                      {g.breaks}};
}

inline Path simplex_as_path(const SimplexMap& sg)
{
    if (sg.k != 1) throw GeometryError("simplex_as_path needs k = 1");
    auto f = sg.eval;
    return Path{sg.dim, [f](double t) {
                    SimplexSample x = f({t});
                    return PathSample{x.p, Point(x.J.col(0))};
                },
                normalize_breaks(sg.breaks[0])};
}

/**
 * Coface d^i: Delta_k -> Delta_{k+1}:
 *   i = 0      : (1, t_1, ..., t_k)
 *   0 < i <= k : t_i repeated
 *   i = k + 1  : (t_1, ..., t_k, 0)
 */
inline std::vector<double> coface(const std::vector<double>& t, int i)
{
    const int k = static_cast<int>(t.size());
    if (i < 0 || i > k + 1) throw GeometryError("coface index out of range");
    std::vector<double> out;
    out.reserve(k + 1);
    if (i == 0) {
        out.push_back(1.0);
        out.insert(out.end(), t.begin(), t.end());
    } else if (i == k + 1) {
        out = t;
        out.push_back(0.0);
    } else {
        out.assign(t.begin(), t.begin() + i);
        out.push_back(t[i - 1]);
        out.insert(out.end(), t.begin() + i, t.end());
    }
    return out;
}

/// Codegeneracy Delta_k -> Delta_{k-1} dropping t_i (1-based).
inline std::vector<double> codegeneracy(const std::vector<double>& t, int i)
{
    const int k = static_cast<int>(t.size());
    if (i < 1 || i > k) throw GeometryError("codegeneracy index out of range");
    std::vector<double> out = t;
    out.erase(out.begin() + (i - 1));
    return out;
}

/// d_i sigma = sigma o coface_i, for 0 <= i <= k.
inline SimplexMap face(const SimplexMap& sg, int i)
{
    const int k = sg.k;
    if (k < 1) throw GeometryError("face of a 0-simplex");
    if (i < 0 || i > k) throw GeometryError("face index out of range");
    // column j of the new Jacobian = sum of old columns fed by new coordinate j
    std::vector<std::vector<int>> feeds(k - 1);
    for (int j = 0; j < k - 1; ++j) {
        if (i == 0) feeds[j] = {j + 1};
        else if (i == k) feeds[j] = {j};
        else if (j < i - 1) feeds[j] = {j};
        else if (j == i - 1) feeds[j] = {j, j + 1};
        else feeds[j] = {j + 1};
    }
    std::vector<std::vector<double>> br(k - 1);
    for (int j = 0; j < k - 1; ++j)
        for (int c : feeds[j]) br[j].insert(br[j].end(), sg.breaks[c].begin(), sg.breaks[c].end());
    auto f = sg.eval;
    return SimplexMap{k - 1, sg.dim,
                      [f, i, feeds](const std::vector<double>& t) {
                          SimplexSample x = f(coface(t, i));
                          SimplexSample out{x.p, {}};
                          out.J = decltype(x.J)::Zero(x.J.rows(), feeds.size());
                          for (std::size_t j = 0; j < feeds.size(); ++j)
                              for (int c : feeds[j]) out.J.col(j) += x.J.col(c);
                          return out;
                      },
                      br};
}

/// s_i sigma = sigma o codegeneracy_i, for 1 <= i <= k + 1.
inline SimplexMap degeneracy(const SimplexMap& sg, int i)
{
    const int k = sg.k;
    if (i < 1 || i > k + 1) throw GeometryError("degeneracy index out of range");
    std::vector<std::vector<double>> br = sg.breaks;
    br.insert(br.begin() + (i - 1), std::vector<double>{});
    auto f = sg.eval;
    return SimplexMap{k + 1, sg.dim,
                      [f, i](const std::vector<double>& t) {
                          SimplexSample x = f(codegeneracy(t, i));
                          SimplexSample out{x.p, {}};
                          out.J = decltype(x.J)::Zero(x.J.rows(), x.J.cols() + 1);
                          for (int j = 0, c = 0; j < out.J.cols(); ++j) {
                              if (j == i - 1) continue;
                              out.J.col(j) = x.J.col(c++);
                          }
                          return out;
                      },
                      br};
}

/// Fold map q(t, s) = (max(t, s), s).
inline Eigen::Vector2d q_map(double t, double s) { return {std::max(t, s), s}; }

/// lambda(t, s): (s,1) -> (s,0) on [0, 1/2], then (s,0) -> (0,0) on [1/2, 1].
inline Eigen::Vector2d lambda_map(double t, double s)
{
    if (t <= 0.5) return {s, 1.0 - 2.0 * t};
    return {(2.0 - 2.0 * t) * s, 0.0};
}

/// Theta = q o lambda : I^2 -> Delta_2.
inline Eigen::Vector2d theta(double t, double s)
{
    Eigen::Vector2d l = lambda_map(t, s);
    return q_map(l(0), l(1));
}

struct ThetaSample {
    Eigen::Vector2d x, dt, ds;
};

/**
 * Theta with its partial derivatives.  Pieces: diagonal for
 * t < (1-s)/2, vertical for (1-s)/2 < t < 1/2, bottom edge for t > 1/2.
 */
inline ThetaSample theta_jet(double t, double s)
{
    ThetaSample r;
    if (t >= 0.5) {
        r.x = {(2.0 - 2.0 * t) * s, 0.0};
        r.dt = {-2.0 * s, 0.0};
        r.ds = {2.0 - 2.0 * t, 0.0};
    } else if (1.0 - 2.0 * t >= s) {
        r.x = {1.0 - 2.0 * t, 1.0 - 2.0 * t};
        r.dt = {-2.0, -2.0};
        r.ds = {0.0, 0.0};
    } else {
        r.x = {s, 1.0 - 2.0 * t};
        r.dt = {0.0, -2.0};
        r.ds = {1.0, 0.0};
    }
    return r;
}

/// Triangle embeddings a(t,s) = (s,t), b(t,s) = (t,s) of Delta_2 into I^2.
inline Eigen::Vector2d embed_a(double t, double s) { return {s, t}; }
inline Eigen::Vector2d embed_b(double t, double s) { return {t, s}; }

/// Gamma o b as a 2-simplex.
inline SimplexMap two_path_b(const TwoPath& G)
{
    auto f = G.eval;
    return SimplexMap{2, G.dim,
                      [f](const std::vector<double>& x) {
                          TwoSample a = f(x[0], x[1]);
                          SimplexSample out{a.p, {}};
                          out.J.resize(a.p.size(), 2);
                          out.J.col(0) = a.pt;
                          out.J.col(1) = a.ps;
                          return out;
                      },
                      {G.t_breaks, G.s_breaks}};
}

/// Gamma o a as a 2-simplex.
inline SimplexMap two_path_a(const TwoPath& G)
{
    auto f = G.eval;
    return SimplexMap{2, G.dim,
                      [f](const std::vector<double>& x) {
                          TwoSample a = f(x[1], x[0]);
                          SimplexSample out{a.p, {}};
                          out.J.resize(a.p.size(), 2);
                          out.J.col(0) = a.ps;
                          out.J.col(1) = a.pt;
                          return out;
                      },
                      {G.s_breaks, G.t_breaks}};
}

/// mu_k(t_1..t_k, s) = ((1 - t_1, s), ..., (1 - t_k, s)).
inline std::vector<Eigen::Vector2d> mu_k(const std::vector<double>& t, double s)
{
    std::vector<Eigen::Vector2d> out;
    for (double ti : t) out.push_back({1.0 - ti, s});
    return out;
}

/**
 * Numerical thinness: the finite-difference Jacobian has rank < k at every
 * sample point (singular values below 1e-8 of the largest are dropped).
 */
inline bool is_thin(const SimplexMap& sg, int samples)
{
    const int k = sg.k;
    if (k < 1) throw GeometryError("is_thin needs k >= 1");
    const double h = 1e-6;
    std::vector<std::vector<double>> pts;
    // interior grid points of Delta_k built coordinate by coordinate
    std::function<void(std::vector<double>&, double)> rec = [&](std::vector<double>& cur, double upper) {
        if (static_cast<int>(cur.size()) == k) { pts.push_back(cur); return; }
        for (int i = 0; i < samples; ++i) {
            double v = (i + 0.5) / samples * upper;
            cur.push_back(v);
            rec(cur, v);
            cur.pop_back();
        }
    };
    std::vector<double> cur;
    rec(cur, 1.0);
    for (const auto& x : pts) {
        Eigen::MatrixXd J(sg.dim, k);
        for (int j = 0; j < k; ++j) {
            std::vector<double> xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            J.col(j) = (sg(xp) - sg(xm)) / (2.0 * h);
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
        const auto& sv = svd.singularValues();
        int rank = 0;
        if (sv.size() && sv(0) > 1e-12)
            for (int i = 0; i < sv.size(); ++i)
                if (sv(i) > 1e-8 * sv(0)) ++rank;
        if (rank >= k) return false;
    }
    return true;
}

}  // namespace holonomy
