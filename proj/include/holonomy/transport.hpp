/**
 * @file transport.hpp
 * @brief Parallel transport in dimensions one and two.
 *
 * Two independent routes are implemented side by side:
 *  - the crossed-module route: 1-holonomy by RK4, 2-holonomy by the RK4 flow
 *    in s (hol2_ode) or by its double-integral closed form (hol2_integral),
 *    and the iterated-integral form Z(Gamma);
 *  - the superconnection route: beta^1 and beta^2 as iterated integrals
 *    pulled back along Theta, assembled into the truncation T<=2.
 *
 * Conventions.  Hol(gamma) solves g' = -a(t) g, a(t) = A(gamma'(t)), g(0) = 1.
 * Iterated integrals over Delta_k x I are evaluated slice by slice in s with
 * nested cumulative Gauss rules in t (see quadrature.hpp), which handles every
 * word length at linear cost.
 */
#pragma once

#include "connection.hpp"
#include "crossed_module.hpp"
#include "geometry.hpp"
#include "quadrature.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace holonomy {

struct QuadratureConfig {
    int ode_steps = 200;        // RK4 steps per unit parameter
    int simplex_order = 12;     // Gauss points per panel and axis
    int series_max = 3;         // cap on m + n
    double term_tol = 1e-12;    // layer cutoff
    double fd_step = 1e-4;      // finite-difference step
    double panel_width = 0.25;  // widest quadrature panel

    void validate() const
    {
        if (ode_steps < 1 || simplex_order < 1 || simplex_order > 64 || series_max < 0 || !(term_tol > 0) ||
            !(fd_step > 0) || !(panel_width > 0))
            throw std::invalid_argument("invalid quadrature configuration");
    }
};

namespace detail {

inline Mat identity_like(const ComplexPtr& cx) { return Mat::Identity(cx->total_dim(), cx->total_dim()); }

/**
 * Visit RK4 steps over [0,1] split at breakpoints.  f(t0, t1, e0, e1) gets the
 * step and stage-evaluation times nudged inside the current smooth piece.
 */
template <typename F>
void for_each_step(const std::vector<double>& breaks, int steps, F&& f)
{
    for (auto [lo, hi] : quad::panels(0.0, 1.0, breaks, 1e300)) {
        int m = std::max(1, static_cast<int>(std::ceil(steps * (hi - lo) - 1e-9)));
        for (int j = 0; j < m; ++j) {
            double t0 = lo + (hi - lo) * j / m;
            double t1 = (j + 1 == m) ? hi : lo + (hi - lo) * (j + 1) / m;
            double e0 = (j == 0) ? std::nextafter(lo, hi) : t0;
            double e1 = (j + 1 == m) ? std::nextafter(hi, lo) : t1;
            f(t0, t1, e0, e1);
        }
    }
}

/// One RK4 step of g' = -a g.
inline void rk4_transport_step(Mat& G, double h, const Mat& a0, const Mat& am, const Mat& a1)
{
    Mat k1 = -a0 * G;
    Mat k2 = -am * (G + 0.5 * h * k1);
    Mat k3 = -am * (G + 0.5 * h * k2);
    Mat k4 = -a1 * (G + h * k3);
    G += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Hol along a coefficient function a(t) with breakpoints.
inline Mat transport_matrix(const std::function<Mat(double)>& a, const std::vector<double>& breaks, int steps,
                            const Mat& start)
{
    Mat G = start;
    for_each_step(breaks, steps, [&](double t0, double t1, double e0, double e1) {
        rk4_transport_step(G, t1 - t0, a(e0), a(0.5 * (t0 + t1)), a(e1));
    });
    return G;
}

/// a(t) = alpha^1(gamma(t))(gamma'(t)).
inline std::function<Mat(double)> path_coefficient(const SuperconnectionField& al, const Path& g)
{
    return [&al, &g](double t) {
        PathSample s = g.eval(t);
        return al.a1(s.p, s.v);
    };
}

/// Per-node values of a degree-0 (a) and degree -1 (b) integrand along a slice.
struct SliceData {
    quad::Grid grid;
    std::vector<Mat> a, b;
    bool a_zero = true;
};

/**
 * Words with exactly one b and L letters a, ordered with the largest
 * parameter leftmost:  T_L(1) = int_{1 >= t_1 >= ... >= t_{L+1} >= 0}.
 * Returns T_0(1), ..., T_Lmax(1).
 */
inline std::vector<Mat> one_b_words_left(const SliceData& d, int Lmax, const Mat& I)
{
    const std::size_t n = d.grid.size();
    std::vector<Mat> out;
    std::vector<Mat> P(n, I), T, f(n);
    Mat total;
    if (d.a_zero) Lmax = 0;
    for (int L = 0; L <= Lmax; ++L) {
        if (L > 0) {
            for (std::size_t i = 0; i < n; ++i) f[i] = d.a[i] * P[i];
            P = d.grid.cumulative(f, total);
        }
        for (std::size_t i = 0; i < n; ++i) {
            f[i] = d.b[i] * P[i];
            if (L > 0) f[i] += d.a[i] * T[i];
        }
        T = d.grid.cumulative(f, total);
        out.push_back(total);
    }
    return out;
}

/// Mirror of one_b_words_left with the largest parameter rightmost.
inline std::vector<Mat> one_b_words_right(const SliceData& d, int Lmax, const Mat& I)
{
    const std::size_t n = d.grid.size();
    std::vector<Mat> out;
    std::vector<Mat> P(n, I), T, f(n);
    Mat total;
    if (d.a_zero) Lmax = 0;
    for (int L = 0; L <= Lmax; ++L) {
        if (L > 0) {
            for (std::size_t i = 0; i < n; ++i) f[i] = P[i] * d.a[i];
            P = d.grid.cumulative(f, total);
        }
        for (std::size_t i = 0; i < n; ++i) {
            f[i] = P[i] * d.b[i];
            if (L > 0) f[i] += T[i] * d.a[i];
        }
        T = d.grid.cumulative(f, total);
        out.push_back(total);
    }
    return out;
}

/// Sum over n <= N of sign^n int_{1>=t_1>=...>=t_n>=0} a(t_1)...a(t_n) (left) or reversed order (right).
inline Mat chen_series(const quad::Grid& g, const std::vector<Mat>& a, int N, double sign, bool left, const Mat& I)
{
    const std::size_t n = g.size();
    std::vector<Mat> S(n, I), f(n);
    Mat sum = I, total;
    double c = 1.0;
    for (int k = 1; k <= N; ++k) {
        for (std::size_t i = 0; i < n; ++i) f[i] = left ? Mat(a[i] * S[i]) : Mat(S[i] * a[i]);
        S = g.cumulative(f, total);
        c *= sign;
        sum += c * total;
    }
    return sum;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// 1-transport
// ---------------------------------------------------------------------------

/**
 * Hol(gamma) = g(1) for g' = -alpha^1(gamma') g, g(0) = 1, by fixed-step RK4.
 */
inline Gl0Element transport1_ode(const SuperconnectionField& al, const Path& gamma, const QuadratureConfig& cfg)
{
    cfg.validate();
    const ComplexPtr& cx = al.complex();
    Mat G = detail::transport_matrix(detail::path_coefficient(al, gamma), gamma.breaks, cfg.ode_steps,
                                     detail::identity_like(cx));
    return Gl0Element(GradedMap(cx, 0, G, 1e-9), 1e-9);
}

struct Transport1Series {
    Gl0Element g;            // g_gamma(1)
    Gl0Element g_inv;        // g_gamma(1)^{-1}
    Gl0Element g_reversed;   // g_{gamma^{-1}}(1)
};

/**
 * The three iterated-integral series for g_gamma(1), its inverse, and the
 * transport along the reversed path, truncated at word length N.
 */
inline Transport1Series transport1_series(const SuperconnectionField& al, const Path& gamma, int N,
                                          const QuadratureConfig& cfg)
{
    cfg.validate();
    if (N < 1) throw std::invalid_argument("transport1_series needs N >= 1");
    const ComplexPtr& cx = al.complex();
    const Mat I = detail::identity_like(cx);
    quad::Grid g(0.0, 1.0, gamma.breaks, cfg.panel_width, cfg.simplex_order);
    std::vector<Mat> a;
    for (double t : g.nodes) {
        PathSample s = gamma.eval(t);
        a.push_back(al.a1(s.p, s.v));
    }
    Mat G = detail::chen_series(g, a, N, -1.0, true, I);
    Mat Gi = detail::chen_series(g, a, N, 1.0, false, I);
    // a(1 - t) on the mirrored grid
    std::vector<double> rb;
    for (double b : gamma.breaks) rb.push_back(1.0 - b);
    quad::Grid gr(0.0, 1.0, rb, cfg.panel_width, cfg.simplex_order);
    std::vector<Mat> ar;
    for (double t : gr.nodes) {
        PathSample s = gamma.eval(1.0 - t);
        ar.push_back(al.a1(s.p, s.v));
    }
    Mat Gr = detail::chen_series(gr, ar, N, 1.0, true, I);
    auto wrap = [&](const Mat& m) { return Gl0Element(GradedMap(cx, 0, m, 1e-9), 1e-9); };
    return {wrap(G), wrap(Gi), wrap(Gr)};
}

/// beta^1(gamma): transport along t -> gamma(1 - t), i.e. Hol(gamma)^{-1}.
inline Gl0Element beta1(const SuperconnectionField& al, const Path& gamma, const QuadratureConfig& cfg)
{
    return transport1_ode(al, reverse_path(gamma), cfg);
}

// ---------------------------------------------------------------------------
// beta^2
// ---------------------------------------------------------------------------

struct SeriesResult {
    GradedMap value;
    int layers = 0;                // layers summed (m + n = 0 .. layers-1)
    double last_layer_norm = 0.0;
    bool truncated = false;        // series_max hit before term_tol
    std::vector<double> layer_norms;
};

namespace detail {

inline SeriesResult sum_layers(const ComplexPtr& cx, const std::vector<Mat>& layers, double sign0,
                               double alternate, double term_tol)
{
    SeriesResult r;
    Mat sum = Mat::Zero(cx->total_dim(), cx->total_dim());
    double c = sign0;
    for (std::size_t L = 0; L < layers.size(); ++L) {
        Mat term = c * layers[L];
        sum += term;
        r.layer_norms.push_back(term.norm());
        r.last_layer_norm = term.norm();
        r.layers = static_cast<int>(L) + 1;
        c *= alternate;
        if (r.last_layer_norm < term_tol) break;
    }
    r.truncated = r.last_layer_norm >= term_tol && r.last_layer_norm > 0.0;
    r.value = GradedMap::unchecked(cx, -1, sum);
    return r;
}

/// All breakpoint values of a 2-simplex (both coordinate families).
inline std::vector<double> simplex_break_values(const SimplexMap& sg)
{
    std::vector<double> v;
    for (const auto& b : sg.breaks) v.insert(v.end(), b.begin(), b.end());
    return normalize_breaks(v);
}

}  // namespace detail

/**
 * beta^2(sigma) = sum_{m,n} (-1)^{m+n+1} int_{Delta_{m+n+1} x I}
 *   Theta^*(sigma^*alpha^1 ... sigma^*alpha^2 ... sigma^*alpha^1),
 * with layers m + n = L summed until a layer is below term_tol or L hits
 * series_max.
 */
inline SeriesResult beta2_detail(const SuperconnectionField& al, const SimplexMap& sigma, const QuadratureConfig& cfg)
{
    cfg.validate();
    if (sigma.k != 2) throw GeometryError("beta2 needs a 2-simplex");
    const ComplexPtr& cx = al.complex();
    const Mat I = detail::identity_like(cx);
    const std::vector<double> cs = detail::simplex_break_values(sigma);
    const int Lmax = cfg.series_max;
    std::vector<Mat> layers(Lmax + 1, Mat::Zero(cx->total_dim(), cx->total_dim()));
    quad::Grid sg(0.0, 1.0, cs, cfg.panel_width, cfg.simplex_order);
    for (std::size_t is = 0; is < sg.size(); ++is) {
        const double s = sg.nodes[is];
        std::vector<double> tb{0.5, 0.5 * (1.0 - s)};
        for (double c : cs) {
            tb.push_back(0.5 * (1.0 - c));
            if (s > 0) tb.push_back(1.0 - c / (2.0 * s));
        }
        detail::SliceData d{quad::Grid(0.0, 1.0, normalize_breaks(tb), cfg.panel_width, cfg.simplex_order), {}, {}};
        for (double t : d.grid.nodes) {
            ThetaSample th = theta_jet(t, s);
            SimplexSample x = sigma.eval({th.x(0), th.x(1)});
            Point vt = x.J * th.dt, vs = x.J * th.ds;
            d.a.push_back(al.a1(x.p, vt));
            d.b.push_back(al.a2(x.p, vt, vs));
            if (d.a_zero && d.a.back().squaredNorm() != 0.0) d.a_zero = false;
        }
        std::vector<Mat> w = detail::one_b_words_left(d, Lmax, I);
        for (std::size_t L = 0; L < w.size(); ++L) layers[L] += sg.weights[is] * w[L];
    }
    return detail::sum_layers(cx, layers, -1.0, -1.0, cfg.term_tol);
}

inline GradedMap beta2(const SuperconnectionField& al, const SimplexMap& sigma, const QuadratureConfig& cfg)
{
    return beta2_detail(al, sigma, cfg).value;
}

// ---------------------------------------------------------------------------
// 2-holonomy
// ---------------------------------------------------------------------------

namespace detail {

/// X(s) = int_0^1 g^{-1} B(Gamma_t, Gamma_s) g dt by RK4 on (g, g^{-1}, X).
inline Mat slice_X_ode(const TwoConnection& c, const TwoPath& G, double s, int steps)
{
    const Mat I = identity_like(c.complex());
    Mat g = I, gi = I, acc = Mat::Zero(I.rows(), I.cols());
    auto ab = [&](double t, Mat& a, Mat& b) {
        TwoSample x = G.eval(t, s);
        a = c.A(x.p, x.pt);
        b = c.B(x.p, x.pt, x.ps);
    };
    for_each_step(G.t_breaks, steps, [&](double t0, double t1, double e0, double e1) {
        const double h = t1 - t0;
        Mat a0, b0, am, bm, a1, b1;
        ab(e0, a0, b0);
        ab(0.5 * (t0 + t1), am, bm);
        ab(e1, a1, b1);
        // stage derivatives of (g, gi, acc)
        Mat g1 = g, gi1 = gi;
        Mat kg1 = -a0 * g1, ki1 = gi1 * a0, ka1 = gi1 * b0 * g1;
        Mat g2 = g + 0.5 * h * kg1, gi2 = gi + 0.5 * h * ki1;
        Mat kg2 = -am * g2, ki2 = gi2 * am, ka2 = gi2 * bm * g2;
        Mat g3 = g + 0.5 * h * kg2, gi3 = gi + 0.5 * h * ki2;
        Mat kg3 = -am * g3, ki3 = gi3 * am, ka3 = gi3 * bm * g3;
        Mat g4 = g + h * kg3, gi4 = gi + h * ki3;
        Mat kg4 = -a1 * g4, ki4 = gi4 * a1, ka4 = gi4 * b1 * g4;
        g += (h / 6.0) * (kg1 + 2.0 * kg2 + 2.0 * kg3 + kg4);
        gi += (h / 6.0) * (ki1 + 2.0 * ki2 + 2.0 * ki3 + ki4);
        acc += (h / 6.0) * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4);
    });
    return acc;
}

}  // namespace detail

/**
 * Hol(Gamma) = h(1) for dh/ds = (L_h)_* X(s), h(0) = 0, with
 * X(s) = int_0^1 g_{Gamma_s}(t)^{-1} |> B(dGamma/dt, dGamma/ds) dt.
 */
inline Glm1Element hol2_ode(const TwoConnection& c, const TwoPath& G, const QuadratureConfig& cfg)
{
    cfg.validate();
    validate_two_path(G, 1e-9);
    const ComplexPtr& cx = c.complex();
    const Mat& D = cx->D();
    const int N = cx->total_dim();
    Mat h = Mat::Zero(N, N);
    auto XY = [&](double s, Mat& X, Mat& Y) {
        X = detail::slice_X_ode(c, G, s, cfg.ode_steps);
        Y = D * X + X * D;
    };
    detail::for_each_step(G.s_breaks, cfg.ode_steps, [&](double s0, double s1, double e0, double e1) {
        const double ds = s1 - s0;
        Mat X0, Y0, Xm, Ym, X1, Y1;
        XY(e0, X0, Y0);
        XY(0.5 * (s0 + s1), Xm, Ym);
        XY(e1, X1, Y1);
        Mat k1 = X0 + h * Y0;
        Mat k2 = Xm + (h + 0.5 * ds * k1) * Ym;
        Mat k3 = Xm + (h + 0.5 * ds * k2) * Ym;
        Mat k4 = X1 + (h + ds * k3) * Y1;
        h += (ds / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    });
    return Glm1Element(GradedMap(cx, -1, h, 1e-9));
}

/**
 * Hol(Gamma) = ( int int g_s(t)^{-1} B g_s(t) Hol(Gamma_s)^{-1} dt ds ) Hol(Gamma_1),
 * with Gauss rules in s and t and g_s marched between t-nodes by RK4.
 */
inline Glm1Element hol2_integral(const TwoConnection& c, const TwoPath& G, const QuadratureConfig& cfg)
{
    cfg.validate();
    validate_two_path(G, 1e-9);
    const ComplexPtr& cx = c.complex();
    const Mat I = detail::identity_like(cx);
    Mat total = Mat::Zero(I.rows(), I.cols());
    quad::Grid sg(0.0, 1.0, G.s_breaks, cfg.panel_width, cfg.simplex_order);
    quad::Grid tg(0.0, 1.0, G.t_breaks, cfg.panel_width, cfg.simplex_order);
    // march points: RK4 steps merged with Gauss nodes, piece ends flagged
    struct Mark { double t; int node; bool piece_end; };
    std::vector<Mark> marks;
    {
        std::vector<double> pts = quad::step_points(0.0, 1.0, G.t_breaks, cfg.ode_steps);
        std::vector<double> bps = normalize_breaks(G.t_breaks);
        for (double p : pts) {
            bool end = p == 0.0 || p == 1.0 ||
                       std::any_of(bps.begin(), bps.end(), [p](double b) { return b == p; });
            marks.push_back({p, -1, end});
        }
        for (std::size_t i = 0; i < tg.size(); ++i) marks.push_back({tg.nodes[i], static_cast<int>(i), false});
        std::sort(marks.begin(), marks.end(), [](const Mark& x, const Mark& y) { return x.t < y.t; });
    }
    for (std::size_t is = 0; is < sg.size(); ++is) {
        const double s = sg.nodes[is];
        auto ab = [&](double t, Mat& a, Mat* b) {
            TwoSample x = G.eval(t, s);
            a = c.A(x.p, x.pt);
            if (b) *b = c.B(x.p, x.pt, x.ps);
        };
        Mat g = I, gi = I, X = Mat::Zero(I.rows(), I.cols());
        for (std::size_t m = 0; m < marks.size(); ++m) {
            if (m > 0) {
                double t0 = marks[m - 1].t, t1 = marks[m].t, h = t1 - t0;
                if (h > 0) {
                    double e0 = marks[m - 1].piece_end ? std::nextafter(t0, t1) : t0;
                    double e1 = marks[m].piece_end ? std::nextafter(t1, t0) : t1;
                    Mat a0, am, a1;
                    ab(e0, a0, nullptr);
                    ab(0.5 * (t0 + t1), am, nullptr);
                    ab(e1, a1, nullptr);
                    detail::rk4_transport_step(g, h, a0, am, a1);
                    // (g^{-1})' = g^{-1} a, stepped on the transpose
                    Mat git = gi.transpose();
                    detail::rk4_transport_step(git, h, -a0.transpose(), -am.transpose(), -a1.transpose());
                    gi = git.transpose();
                }
            }
            if (marks[m].node >= 0) {
                Mat a, b;
                ab(marks[m].t, a, &b);
                X += tg.weights[marks[m].node] * (gi * b * g);
            }
        }
        total += sg.weights[is] * (X * gi);
    }
    Path e1 = edge1(G);
    Mat H1 = detail::transport_matrix(
        [&](double t) {
            PathSample p = e1.eval(t);
            return c.A(p.p, p.v);
        },
        e1.breaks, cfg.ode_steps, I);
    return Glm1Element(GradedMap(cx, -1, total * H1, 1e-9));
}

/**
 * Z(Gamma) = sum_{m,n} int_{Delta_{m+n+1} x I} a_s(1-t_1) ... b_s(1-t_{m+1}) ... a_s(1-t_{m+n+1}),
 * a_s = A(dGamma/dt), b_s = B(dGamma/dt, dGamma/ds).
 */
inline SeriesResult z_integral_detail(const TwoConnection& c, const TwoPath& G, const QuadratureConfig& cfg)
{
    cfg.validate();
    const ComplexPtr& cx = c.complex();
    const Mat I = detail::identity_like(cx);
    const int Lmax = cfg.series_max;
    std::vector<Mat> layers(Lmax + 1, Mat::Zero(I.rows(), I.cols()));
    quad::Grid sg(0.0, 1.0, G.s_breaks, cfg.panel_width, cfg.simplex_order);
    for (std::size_t is = 0; is < sg.size(); ++is) {
        const double s = sg.nodes[is];
        detail::SliceData d{quad::Grid(0.0, 1.0, G.t_breaks, cfg.panel_width, cfg.simplex_order), {}, {}};
        for (double t : d.grid.nodes) {
            TwoSample x = G.eval(t, s);
            d.a.push_back(c.A(x.p, x.pt));
            d.b.push_back(c.B(x.p, x.pt, x.ps));
            if (d.a_zero && d.a.back().squaredNorm() != 0.0) d.a_zero = false;
        }
        std::vector<Mat> w = detail::one_b_words_right(d, Lmax, I);
        for (std::size_t L = 0; L < w.size(); ++L) layers[L] += sg.weights[is] * w[L];
    }
    return detail::sum_layers(cx, layers, 1.0, 1.0, cfg.term_tol);
}

inline GradedMap z_integral(const TwoConnection& c, const TwoPath& G, const QuadratureConfig& cfg)
{
    return z_integral_detail(c, G, cfg).value;
}

// ---------------------------------------------------------------------------
// Truncation and residuals
// ---------------------------------------------------------------------------

/// beta^2(Gamma o b) - beta^2(Gamma o a).
inline GradedMap beta2_difference(const SuperconnectionField& al, const TwoPath& G, const QuadratureConfig& cfg)
{
    return beta2(al, two_path_b(G), cfg) - beta2(al, two_path_a(G), cfg);
}

/**
 * T<=2 of the integrated representation:
 *   on_path(gamma)     = beta^1(gamma^{-1})
 *   on_two_path(Gamma) = (beta^2(Gamma_b) - beta^2(Gamma_a)) beta^1(Gamma_1^{-1})
 */
struct TruncatedRep {
    std::function<Gl0Element(const Path&)> on_path;
    std::function<Glm1Element(const TwoPath&)> on_two_path;
};

inline TruncatedRep truncate_rep(std::shared_ptr<const SuperconnectionField> al, const QuadratureConfig& cfg)
{
    cfg.validate();
    TruncatedRep r;
    r.on_path = [al, cfg](const Path& g) { return beta1(*al, reverse_path(g), cfg); };
    r.on_two_path = [al, cfg](const TwoPath& G) {
        GradedMap diff = beta2_difference(*al, G, cfg);
        Gl0Element h = beta1(*al, reverse_path(edge1(G)), cfg);
        return Glm1Element(compose(diff, h.map()));
    };
    return r;
}

/**
 * || pi( (beta^2(Gamma_b) - beta^2(Gamma_a)) - Z(Gamma) ) ||_F.
 */
inline double main_theorem_residual(std::shared_ptr<const SuperconnectionField> al, const TwoPath& G,
                                    const QuadratureConfig& cfg)
{
    TwoConnection c(al);
    GradedMap lhs = beta2_difference(*al, G, cfg);
    GradedMap rhs = z_integral(c, G, cfg);
    return quotient_distance(lhs, rhs);
}

/**
 * ||[d, beta^2(sigma)] + beta^1(d_1 sigma) - beta^1(d_2 sigma) beta^1(d_0 sigma)||_F,
 * where d_1 sigma is the diagonal, d_2 sigma = sigma(t, 0), d_0 sigma = sigma(1, t).
 */
inline double structure_residual_n2(const SuperconnectionField& al, const SimplexMap& sigma,
                                    const QuadratureConfig& cfg)
{
    GradedMap b = beta2(al, sigma, cfg);
    Gl0Element diag = beta1(al, simplex_as_path(face(sigma, 1)), cfg);
    Gl0Element bottom = beta1(al, simplex_as_path(face(sigma, 2)), cfg);
    Gl0Element side = beta1(al, simplex_as_path(face(sigma, 0)), cfg);
    GradedMap r = graded_commutator_with_differential(b) + diag.map() - compose(bottom.map(), side.map());
    return r.norm();
}

/**
 * Gamma o phi with phi(t, s) = (clamp((t - a1)/(a2 - a1)), clamp((s - b1)/(b2 - b1)))
 * for the sub-square Q = [a1, a2] x [b1, b2] in the lower right quarter.
 * Homotopic to Gamma rel boundary; rank two only over Q.
 */
inline TwoPath shrink_well_supported(const TwoPath& G, double a1 = 0.625, double a2 = 0.875, double b1 = 0.125,
                                     double b2 = 0.375)
{
    SquareMap phi;
    auto clampmap = [](double x, double lo, double hi, double& v, double& dv) {
        double u = (x - lo) / (hi - lo);
        if (u <= 0.0) { v = 0.0; dv = 0.0; }
        else if (u >= 1.0) { v = 1.0; dv = 0.0; }
        else { v = u; dv = 1.0 / (hi - lo); }
    };
    phi.eval = [=](double t, double s, double& u, double& w, Eigen::Matrix2d& J) {
        double du, dw;
        clampmap(t, a1, a2, u, du);
        clampmap(s, b1, b2, w, dw);
        J << du, 0.0, 0.0, dw;
    };
    phi.t_breaks = {a1, a2};
    phi.s_breaks = {b1, b2};
    phi.t_preimage = [=](double c) { return a1 + c * (a2 - a1); };
    phi.s_preimage = [=](double c) { return b1 + c * (b2 - b1); };
    return precompose(G, phi, G.relaxed);
}

}  // namespace holonomy
