/**
 * @file harness.hpp
 * @brief Verification suites over the fixture catalog.
 *
 * Suites: algebra, transport1, transport2, truncation, main-theorem, all.
 * Each check produces one record per (fixture, subject) with a residual,
 * a pinned tolerance and the acceptance criterion it feeds (0 = supporting).
 */
#pragma once

#include "fixture.hpp"
#include "report.hpp"
#include "transport.hpp"

#include <unsupported/Eigen/MatrixFunctions>
#include <chrono>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <set>

namespace holonomy {

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> n{"algebra", "transport1", "transport2", "truncation", "main-theorem", "all"};
    return n;
}

/// Identities exercised by the "all" suite; each must map to exactly one check id.
inline const std::vector<std::string>& required_anchors()
{
    static const std::vector<std::string> a{
        "lambda-waypoints", "diagonal-face", "theta-image", "simplicial-identities",
        "commutator-squares-to-zero", "chain-map-criterion", "boundary-image-basis", "boundary-quotient-projection",
        "crossed-module-equivariance", "crossed-module-peiffer", "star-associativity", "star-unit", "star-inverse",
        "delta-homomorphism", "crossed-module-action", "exp-one-parameter", "bracket-from-conjugation",
        "left-translation-differential", "infinitesimal-crossed-module", "transport1-unit-on-constants",
        "iterated-integral-transport", "iterated-integral-inverse", "beta1-time-reversal", "beta1-inverse-holonomy",
        "beta1-concatenation", "flatness-equation", "truncated-two-connection", "hol2-unit-on-constants",
        "two-holonomy-integral-form", "two-holonomy-iterated-integrals", "rep-unit-on-constants",
        "rep-boundary-compatibility", "rep-homotopy-invariance", "rep-vertical-composition",
        "rep-horizontal-composition", "thin-simplex-vanishing", "thin-simplex-edge-transport",
        "structure-equation-n2", "structure-equation-n2-refinement", "main-theorem", "main-theorem-closed-form",
        "main-theorem-refinement"};
    return a;
}

/// Anchors of bookkeeping records, outside the identity list.
inline const std::vector<std::string>& plumbing_anchors()
{
    static const std::vector<std::string> a{"fixture-schema", "coverage"};
    return a;
}

struct SuiteOptions {
    QuadratureConfig cfg;
    std::uint64_t seed = 20240607;
    std::vector<std::string> fixtures;   // names or paths; empty = built-in catalog
    bool timings = false;
};

inline nlohmann::json config_json(const QuadratureConfig& c)
{
    return {{"ode_steps", c.ode_steps},     {"simplex_order", c.simplex_order}, {"series_max", c.series_max},
            {"term_tol", c.term_tol},       {"fd_step", c.fd_step},             {"panel_width", c.panel_width}};
}

// ---------------------------------------------------------------------------
// Random samples on a complex
// ---------------------------------------------------------------------------

namespace sampling {

inline GradedMap random_map(const ComplexPtr& cx, int degree, std::mt19937_64& rng, double scale)
{
    std::normal_distribution<double> nd(0.0, 1.0);
    const int n = cx->total_dim();
    Mat m(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) m(i, j) = scale * nd(rng);
    return GradedMap(cx, degree, m.cwiseProduct(cx->degree_mask(degree)));
}

/// Degree -1 element with [d, s] + id invertible.
inline Glm1Element random_glm1(const ComplexPtr& cx, std::mt19937_64& rng, double scale = 0.3)
{
    for (;;) {
        try {
            return Glm1Element(random_map(cx, -1, rng, scale));
        } catch (const DegeneracyError&) {
        }
    }
}

/// Chain automorphism exp([d, h] + c id), h of degree -1.
inline Gl0Element random_gl0(const ComplexPtr& cx, std::mt19937_64& rng, double scale = 0.3)
{
    std::uniform_real_distribution<double> ud(-0.5, 0.5);
    GradedMap h = random_map(cx, -1, rng, scale);
    Mat X = graded_commutator_with_differential(h).matrix();
    X.diagonal().array() += ud(rng);
    Mat E = X.exp();
    return Gl0Element(GradedMap(cx, 0, E, 1e-10), 1e-10);
}

/// Degree 0 chain map [d, h] + c id (element of gl^0).
inline GradedMap random_chain_map(const ComplexPtr& cx, std::mt19937_64& rng, double scale = 0.3)
{
    std::uniform_real_distribution<double> ud(-0.5, 0.5);
    GradedMap X = graded_commutator_with_differential(random_map(cx, -1, rng, scale));
    return X + ud(rng) * GradedMap::identity(cx);
}

}  // namespace sampling

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

class Runner {
public:
    Runner(const SuiteOptions& opt, Report& rep) : opt_(opt), rep_(rep) {}

    const QuadratureConfig& cfg() const { return opt_.cfg; }

    /// Deterministic generator per (check, fixture).
    std::mt19937_64 rng(const std::string& id, const std::string& fixture) const
    {
        std::string key = id + "/" + fixture;
        std::uint64_t h = std::stoull(fnv1a_hex(key), nullptr, 16);
        return std::mt19937_64(opt_.seed ^ h);
    }

    /**
     * Run one check.  @p f returns the residual; exceptions turn into failing
     * records with the message as note.
     */
    void check(const std::string& id, const std::string& anchor, int criterion, const std::string& fixture,
               const std::string& subject, const std::string& inputs, double tol, const std::function<double()>& f,
               const std::string& relation = "le")
    {
        CheckRecord r;
        r.id = id;
        r.anchor = anchor;
        r.criterion = criterion;
        r.fixture = fixture;
        r.subject = subject;
        r.tolerance = tol;
        r.relation = relation;
        r.digest = fnv1a_hex(id + "\n" + fixture + "\n" + subject + "\n" + config_json(opt_.cfg).dump() + "\n" +
                             std::to_string(opt_.seed) + "\n" + inputs);
        auto t0 = std::chrono::steady_clock::now();
        try {
            r.residual = f();
        } catch (const std::exception& e) {
            r.residual = std::numeric_limits<double>::infinity();
            r.note = e.what();
        }
        r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        r.pass = evaluate(r);
        rep_.records.push_back(std::move(r));
    }

private:
    const SuiteOptions& opt_;
    Report& rep_;
};

namespace suites {

inline std::string doc_of(const Fixture& fx) { return fx.document.dump(); }

/// Up to n named 2-paths, preferring the listed names.
inline std::vector<std::string> pick_two_paths(const Fixture& fx, std::vector<std::string> prefer, std::size_t n)
{
    std::vector<std::string> out;
    for (const auto& p : prefer)
        if (out.size() < n && fx.two_paths.count(p)) out.push_back(p);
    for (const auto& [name, G] : fx.two_paths)
        if (out.size() < n && std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    return out;
}

inline bool has(const Fixture& fx, std::initializer_list<const char*> names)
{
    for (const char* n : names)
        if (!fx.two_paths.count(n)) return false;
    return true;
}

/// Smooth self-map of the square fixing its sides setwise (reparametrisation).
inline SquareMap wobble()
{
    SquareMap phi;
    phi.eval = [](double t, double s, double& u, double& w, Eigen::Matrix2d& J) {
        u = t + 0.2 * t * (1 - t) * (1 - 2 * s);
        w = s + 0.2 * s * (1 - s) * (2 * t - 1);
        J << 1 + 0.2 * (1 - 2 * t) * (1 - 2 * s), -0.4 * t * (1 - t), 0.4 * s * (1 - s),
            1 + 0.2 * (1 - 2 * s) * (2 * t - 1);
    };
    return phi;
}

// ---------------------------------------------------------------------------

inline void geometry_checks(Runner& R)
{
    R.check("geometry.lambda-waypoints", "lambda-waypoints", 0, "-", "s-grid", "", 1e-15, [] {
        double worst = 0.0;
        for (int i = 0; i <= 32; ++i) {
            double s = i / 32.0;
            worst = std::max(worst, (lambda_map(0.0, s) - Eigen::Vector2d(s, 1.0)).norm());
            worst = std::max(worst, (lambda_map(0.5, s) - Eigen::Vector2d(s, 0.0)).norm());
            worst = std::max(worst, (lambda_map(1.0, s) - Eigen::Vector2d(0.0, 0.0)).norm());
        }
        return worst;
    });
    R.check("geometry.diagonal-face", "diagonal-face", 0, "-", "generic", "", 1e-15, [] {
        SimplexMap sg = expr_simplex(2, {parse("0.3 + t^2 - 0.5*s", {"t", "s"}), parse("sin(t*s) + s", {"t", "s"})});
        SimplexMap d1 = face(sg, 1);
        double worst = 0.0;
        for (int i = 0; i <= 32; ++i) {
            double t = i / 32.0;
            worst = std::max(worst, (d1({t}) - sg({t, t})).norm());
        }
        return worst;
    });
    R.check("geometry.theta-image", "theta-image", 0, "-", "64x64", "", 1e-15, [] {
        double worst = 0.0;
        for (int i = 0; i < 64; ++i)
            for (int j = 0; j < 64; ++j) {
                Eigen::Vector2d p = theta(i / 63.0, j / 63.0);
                worst = std::max({worst, p(0) - 1.0, p(1) - p(0), -p(1)});
            }
        return worst;
    });
    R.check("geometry.cosimplicial-identities", "simplicial-identities", 0, "-", "random", "", 0.0, [&R] {
        auto g = R.rng("geometry.cosimplicial-identities", "-");
        std::uniform_real_distribution<double> ud(0.0, 1.0);
        double worst = 0.0;
        for (int k = 0; k <= 3; ++k)
            for (int rep = 0; rep < 8; ++rep) {
                std::vector<double> t(k);
                for (auto& x : t) x = ud(g);
                std::sort(t.begin(), t.end(), std::greater<>());
                for (int j = 0; j <= k + 2; ++j)
                    for (int i = 0; i < j; ++i) {
                        // d^j d^i = d^i d^{j-1} for i < j
                        auto a = coface(coface(t, i), j), b = coface(coface(t, j - 1), i);
                        for (std::size_t m = 0; m < a.size(); ++m) worst = std::max(worst, std::abs(a[m] - b[m]));
                    }
            }
        return worst;
    });
}

inline void algebra_checks(Runner& R, const Fixture& fx)
{
    const ComplexPtr& cx = fx.complex;
    const std::string F = fx.name, D = doc_of(fx);
    const int pairs = 100;

    R.check("linalg.d-squared", "commutator-squares-to-zero", 0, F, "random", D, 1e-12, [&] {
        auto g = R.rng("linalg.d-squared", F);
        double worst = 0.0;
        for (int d = -2; d <= 1; ++d)
            for (int i = 0; i < 10; ++i) {
                GradedMap f = sampling::random_map(cx, d, g, 1.0);
                worst = std::max(worst, graded_commutator_with_differential(graded_commutator_with_differential(f)).norm());
            }
        return worst;
    });
    R.check("linalg.boundary-basis", "boundary-image-basis", 0, F, "basis", D, 1e-12, [&] {
        BoundaryImageSpace bs = boundary_image_basis(cx);
        const int r = static_cast<int>(bs.basis.size());
        double orth = 0.0, wit = 0.0;
        for (int a = 0; a < r; ++a) {
            for (int b = 0; b < r; ++b) {
                double ip = (bs.basis[a].matrix().array() * bs.basis[b].matrix().array()).sum();
                orth = std::max(orth, std::abs(ip - (a == b ? 1.0 : 0.0)));
            }
            wit = std::max(wit, (graded_commutator_with_differential(bs.witness[a]) - bs.basis[a]).norm());
        }
        return std::max(orth, wit);
    });
    R.check("linalg.projection", "boundary-quotient-projection", 0, F, "random", D, 1e-12, [&] {
        auto g = R.rng("linalg.projection", F);
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            GradedMap f = sampling::random_map(cx, -1, g, 1.0), h = sampling::random_map(cx, -1, g, 1.0);
            GradedMap p = quotient_project(f);
            worst = std::max(worst, (quotient_project(p) - p).norm());
            worst = std::max(worst, (quotient_project(f + 2.0 * h) - p - 2.0 * quotient_project(h)).norm());
            GradedMap k = sampling::random_map(cx, -2, g, 1.0);
            worst = std::max(worst, quotient_project(graded_commutator_with_differential(k)).norm());
        }
        return worst;
    });
    R.check("linalg.chain-map-criterion", "chain-map-criterion", 0, F, "random", D, 1e-12, [&] {
        auto g = R.rng("linalg.chain-map-criterion", F);
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            GradedMap c = sampling::random_chain_map(cx, g);
            worst = std::max(worst, graded_commutator_with_differential(c).norm());
            // a generic degree 0 map is not a chain map
            GradedMap f = sampling::random_map(cx, 0, g, 1.0);
            if (graded_commutator_with_differential(f).norm() < 1e-6) worst = std::max(worst, 1.0);
        }
        return worst;
    });

    R.check("xmod.axiom1", "crossed-module-equivariance", 1, F, "100 pairs", D, 1e-12, [&] {
        auto g = R.rng("xmod.axiom1", F);
        double worst = 0.0;
        for (int i = 0; i < pairs; ++i) {
            Gl0Element phi = sampling::random_gl0(cx, g);
            Glm1Element s = sampling::random_glm1(cx, g);
            Mat lhs = delta(act(phi, s)).matrix();
            Mat rhs = (phi * delta(s) * phi.inverse()).matrix();
            worst = std::max(worst, (lhs - rhs).norm());
        }
        return worst;
    });
    R.check("xmod.axiom2", "crossed-module-peiffer", 1, F, "100 pairs", D, 1e-10, [&] {
        auto g = R.rng("xmod.axiom2", F);
        double worst = 0.0;
        for (int i = 0; i < pairs; ++i) {
            Glm1Element r = sampling::random_glm1(cx, g), s = sampling::random_glm1(cx, g);
            worst = std::max(worst, quotient_distance(act(delta(r), s), star(star(r, s), inverse(r))));
        }
        return worst;
    });
    R.check("group.associativity", "star-associativity", 2, F, "100 triples", D, 1e-10, [&] {
        auto g = R.rng("group.associativity", F);
        double worst = 0.0;
        for (int i = 0; i < pairs; ++i) {
            Glm1Element r = sampling::random_glm1(cx, g), s = sampling::random_glm1(cx, g), t = sampling::random_glm1(cx, g);
            worst = std::max(worst, quotient_distance(star(star(r, s), t), star(r, star(s, t))));
        }
        return worst;
    });
    R.check("group.unit", "star-unit", 2, F, "100 samples", D, 1e-10, [&] {
        auto g = R.rng("group.unit", F);
        Glm1Element e = Glm1Element::unit(cx);
        double worst = 0.0;
        for (int i = 0; i < pairs; ++i) {
            Glm1Element s = sampling::random_glm1(cx, g);
            worst = std::max({worst, quotient_distance(star(e, s), s), quotient_distance(star(s, e), s)});
        }
        return worst;
    });
    R.check("group.inverse", "star-inverse", 2, F, "100 samples", D, 1e-10, [&] {
        auto g = R.rng("group.inverse", F);
        Glm1Element e = Glm1Element::unit(cx);
        double worst = 0.0;
        for (int i = 0; i < pairs; ++i) {
            Glm1Element s = sampling::random_glm1(cx, g);
            worst = std::max({worst, quotient_distance(star(s, inverse(s)), e), quotient_distance(star(inverse(s), s), e)});
        }
        return worst;
    });
    R.check("group.delta-homomorphism", "delta-homomorphism", 2, F, "100 pairs", D, 1e-12, [&] {
        auto g = R.rng("group.delta-homomorphism", F);
        double worst = 0.0;
        for (int i = 0; i < pairs; ++i) {
            Glm1Element s = sampling::random_glm1(cx, g), t = sampling::random_glm1(cx, g);
            worst = std::max(worst, (delta(star(s, t)).matrix() - (delta(s) * delta(t)).matrix()).norm());
        }
        return worst;
    });
    R.check("group.action", "crossed-module-action", 0, F, "100 samples", D, 1e-10, [&] {
        auto g = R.rng("group.action", F);
        double worst = 0.0;
        for (int i = 0; i < pairs; ++i) {
            Gl0Element p = sampling::random_gl0(cx, g), q = sampling::random_gl0(cx, g);
            Glm1Element s = sampling::random_glm1(cx, g), t = sampling::random_glm1(cx, g);
            worst = std::max(worst, quotient_distance(act(p * q, s), act(p, act(q, s))));
            worst = std::max(worst, quotient_distance(act(p, star(s, t)), star(act(p, s), act(p, t))));
        }
        return worst;
    });

    R.check("diff.exp-flow", "exp-one-parameter", 3, F, "10 samples", D, 1e-8, [&] {
        auto g = R.rng("diff.exp-flow", F);
        double worst = 0.0;
        for (int i = 0; i < 10; ++i) {
            GradedMap A = sampling::random_map(cx, -1, g, 0.5);
            for (auto [tau, sig] : {std::pair{0.3, 0.2}, std::pair{-0.1, 0.45}}) {
                Glm1Element lhs = exp_glm1((tau + sig) * A);
                Glm1Element rhs = star(exp_glm1(tau * A), exp_glm1(sig * A));
                worst = std::max(worst, quotient_distance(lhs, rhs));
            }
            // d/dtau exp(tau A) at 0
            const double h = 1e-5;
            GradedMap fd = (exp_glm1(h * A).rep() - exp_glm1(-h * A).rep()) * (1.0 / (2 * h));
            worst = std::max(worst, quotient_distance(fd, A));
        }
        return worst;
    });
    R.check("diff.bracket", "bracket-from-conjugation", 3, F, "10 samples", D, 1e-6, [&] {
        auto g = R.rng("diff.bracket", F);
        double worst = 0.0;
        const double h = 1e-5;
        for (int i = 0; i < 10; ++i) {
            GradedMap A = sampling::random_map(cx, -1, g, 0.5), B = sampling::random_map(cx, -1, g, 0.5);
            auto f = [&](double t, double s) {
                return star(star(exp_glm1(t * A), exp_glm1(s * B)), exp_glm1(-t * A)).rep();
            };
            GradedMap fd = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) * (1.0 / (4 * h * h));
            worst = std::max(worst, quotient_distance(fd, bracket_glm1(A, B)));
        }
        return worst;
    });
    R.check("diff.left-translation", "left-translation-differential", 3, F, "10 samples", D, 1e-7, [&] {
        auto g = R.rng("diff.left-translation", F);
        double worst = 0.0;
        const double h = 1e-5;
        for (int i = 0; i < 10; ++i) {
            Glm1Element e = sampling::random_glm1(cx, g);
            GradedMap X = sampling::random_map(cx, -1, g, 1.0);
            GradedMap fd = (star(e, Glm1Element::trusted(h * X)).rep() - star(e, Glm1Element::trusted(-h * X)).rep()) *
                           (1.0 / (2 * h));
            worst = std::max(worst, (fd - left_translate_diff(e, X)).norm());
        }
        return worst;
    });
    R.check("diff.infinitesimal-axioms", "infinitesimal-crossed-module", 0, F, "20 samples", D, 1e-10, [&] {
        auto g = R.rng("diff.infinitesimal-axioms", F);
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            GradedMap X = sampling::random_chain_map(cx, g);
            GradedMap v = sampling::random_map(cx, -1, g, 1.0), w = sampling::random_map(cx, -1, g, 1.0);
            worst = std::max(worst, (inf_delta(inf_act(X, v)) - commutator(X, inf_delta(v))).norm());
            worst = std::max(worst, quotient_distance(inf_act(inf_delta(v), w), bracket_glm1(v, w)));
        }
        return worst;
    });
}

inline void transport1_checks(Runner& R, const Fixture& fx)
{
    const std::string F = fx.name, D = doc_of(fx);
    const SuperconnectionField& al = *fx.field;
    const ComplexPtr& cx = fx.complex;
    const Mat I = Mat::Identity(cx->total_dim(), cx->total_dim());
    QuadratureConfig fine = R.cfg();
    fine.ode_steps = std::max(fine.ode_steps, 1000);

    R.check("transport1.constant-path", "transport1-unit-on-constants", 0, F, "constant", D, 0.0, [&] {
        Point x = sample_grid(fx.chart_dim)[4];
        return (beta1(al, constant_path(x), R.cfg()).matrix() - I).norm();
    });
    for (const auto& [pn, gamma] : fx.paths) {
        if (al.has_alpha1()) {
            R.check("transport1.series-vs-ode", "iterated-integral-transport", 4, F, pn, D, 1e-8, [&] {
                Transport1Series s = transport1_series(al, gamma, 8, R.cfg());
                Mat g = transport1_ode(al, gamma, fine).matrix();
                Mat gr = transport1_ode(al, reverse_path(gamma), fine).matrix();
                return std::max({(s.g.matrix() - g).norm(), (s.g_inv.matrix() - g.inverse()).norm(),
                                 (s.g_reversed.matrix() - gr).norm()});
            });
            R.check("transport1.series-inverse", "iterated-integral-inverse", 4, F, pn, D, 1e-8, [&] {
                Transport1Series s = transport1_series(al, gamma, 8, R.cfg());
                return std::max((s.g.matrix() * s.g_inv.matrix() - I).norm(), (s.g_inv.matrix() * s.g.matrix() - I).norm());
            });
        }
        R.check("beta1.time-reversal", "beta1-time-reversal", 0, F, pn, D, 1e-9, [&] {
            Mat b = beta1(al, gamma, R.cfg()).matrix();
            Mat br = beta1(al, reverse_path(gamma), R.cfg()).matrix();
            return (br - b.inverse()).norm();
        });
        R.check("beta1.inverse-holonomy", "beta1-inverse-holonomy", 0, F, pn, D, 1e-9, [&] {
            Mat b = beta1(al, gamma, R.cfg()).matrix();
            return (b * transport1_ode(al, gamma, R.cfg()).matrix() - I).norm();
        });
        R.check("beta1.concatenation", "beta1-concatenation", 9, F, pn, D, 1e-9, [&] {
            Point a = gamma(1.0);
            Point b = a;
            b(0) -= 0.4;
            if (b.size() > 1) b(1) += 0.3;
            // a curved second leg from gamma(1)
            Path sig{static_cast<int>(a.size()),
                       [a, b](double t) {
                           Point p = a + t * (b - a), v = b - a;
                           p(0) += 0.1 * std::sin(std::numbers::pi * t);
                           v(0) += 0.1 * std::numbers::pi * std::cos(std::numbers::pi * t);
                           return PathSample{p, v};
                       },
                       {}};
            Path cat = concat_paths(gamma, sig);
            // each half of the concatenation runs at double speed: same steps per factor
            QuadratureConfig twice = R.cfg();
            twice.ode_steps *= 2;
            Mat lhs = beta1(al, cat, twice).matrix();
            Mat rhs = (beta1(al, gamma, R.cfg()) * beta1(al, sig, R.cfg())).matrix();
            Mat hol = transport1_ode(al, cat, twice).matrix();
            Mat holr = (transport1_ode(al, sig, R.cfg()) * transport1_ode(al, gamma, R.cfg())).matrix();
            return std::max((lhs - rhs).norm(), (hol - holr).norm());
        });
    }
}

inline void transport2_checks(Runner& R, const Fixture& fx)
{
    const std::string F = fx.name, D = doc_of(fx);
    auto c = std::make_shared<TwoConnection>(fx.field);
    const int n = fx.chart_dim;

    R.check("connection.flatness", "flatness-equation", 0, F, "grid", D, 1e-6,
            [&] { return max_flatness_residual(*fx.field, R.cfg().fd_step); });
    if (n >= 2)
        R.check("connection.truncated-curvature", "truncated-two-connection", 0, F, "grid", D, 1e-8, [&] {
            // a tenth of fd_step keeps the O(h^2) truncation error below the tolerance
            const double h = R.cfg().fd_step / 10;
            double worst = 0.0;
            for (const Point& x : sample_grid(n))
                for (int i = 0; i < n; ++i)
                    for (int j = i + 1; j < n; ++j) {
                        int k = (n == 3) ? 3 - i - j : j;
                        CurvatureResiduals cr = curvature_two_connection(*c, x, basis_vector(n, i), basis_vector(n, j),
                                                                         basis_vector(n, k), h);
                        worst = std::max({worst, cr.FA_minus_deltaB.norm(), quotient_project(cr.curv3).norm()});
                    }
            return worst;
        });
    R.check("hol2.constant", "hol2-unit-on-constants", 0, F, "constant", D, 0.0, [&] {
        TwoPath G = constant_two_path(sample_grid(n)[4]);
        return std::max(hol2_ode(*c, G, R.cfg()).rep().norm(), hol2_integral(*c, G, R.cfg()).rep().norm());
    });
    for (const auto& pn : pick_two_paths(fx, {"square", "bump_square", "lens", "bump_lens"}, 3)) {
        const TwoPath& G = fx.two_paths.at(pn);
        R.check("hol2.ode-vs-integral", "two-holonomy-integral-form", 5, F, pn, D, 1e-6,
                [&] { return quotient_distance(hol2_ode(*c, G, R.cfg()), hol2_integral(*c, G, R.cfg())); });
        R.check("hol2.z-representation", "two-holonomy-iterated-integrals", 6, F, pn, D, 1e-6, [&] {
            GradedMap z = z_integral(*c, G, R.cfg());
            Mat H1 = transport1_ode(*fx.field, edge1(G), R.cfg()).matrix();
            GradedMap zh = GradedMap::unchecked(fx.complex, -1, z.matrix() * H1);
            return quotient_distance(zh, hol2_integral(*c, G, R.cfg()).rep());
        });
    }
}

inline void truncation_checks(Runner& R, const Fixture& fx)
{
    const std::string F = fx.name, D = doc_of(fx);
    const SuperconnectionField& al = *fx.field;
    const ComplexPtr& cx = fx.complex;
    const Mat I = Mat::Identity(cx->total_dim(), cx->total_dim());
    TruncatedRep T = truncate_rep(fx.field, R.cfg());

    R.check("rep.constants", "rep-unit-on-constants", 7, F, "constant", D, 0.0, [&] {
        Point x = sample_grid(fx.chart_dim)[4];
        double a = (T.on_path(constant_path(x)).matrix() - I).norm();
        double b = quotient_project(T.on_two_path(constant_two_path(x)).rep()).norm();
        return std::max(a, b);
    });
    for (const auto& pn : pick_two_paths(fx, {"lens", "bump_lens"}, 2)) {
        const TwoPath& G = fx.two_paths.at(pn);
        R.check("rep.delta-compatibility", "rep-boundary-compatibility", 7, F, pn, D, 1e-5, [&] {
            Mat lhs = delta(T.on_two_path(G)).matrix();
            Mat rhs = (T.on_path(edge0(G)).inverse() * T.on_path(edge1(G))).matrix();
            return (lhs - rhs).norm();
        });
    }
    if (fx.two_paths.count("bump_lens")) {
        const TwoPath& G = fx.two_paths.at("bump_lens");
        R.check("rep.reparametrization", "rep-homotopy-invariance", 7, F, "bump_lens", D, 2e-5, [&] {
            Glm1Element e = T.on_two_path(G);
            double a = quotient_distance(T.on_two_path(precompose(G, wobble(), G.relaxed)), e);
            double b = quotient_distance(T.on_two_path(shrink_well_supported(G)), e);
            return std::max(a, b);
        });
    }
    if (has(fx, {"lens_lower", "lens_upper"}))
        R.check("rep.vertical-composition", "rep-vertical-composition", 7, F, "lens_lower|lens_upper", D, 1e-5, [&] {
            const TwoPath &lo = fx.two_paths.at("lens_lower"), &up = fx.two_paths.at("lens_upper");
            Glm1Element e2 = T.on_two_path(compose_two_paths_vertical(up, lo));
            return quotient_distance(e2, star(T.on_two_path(lo), T.on_two_path(up)));
        });
    if (has(fx, {"lens_left", "lens_right"}))
        R.check("rep.horizontal-composition", "rep-horizontal-composition", 7, F, "lens_left|lens_right", D, 1e-5, [&] {
            const TwoPath &L = fx.two_paths.at("lens_left"), &Rt = fx.two_paths.at("lens_right");
            Glm1Element e2 = T.on_two_path(compose_two_paths_horizontal(Rt, L));
            Gl0Element h = T.on_path(edge0(L));
            return quotient_distance(e2, star(act(h.inverse(), T.on_two_path(Rt)), T.on_two_path(L)));
        });

    for (const auto& [sn, sg] : fx.simplices) {
        if (is_thin(sg, 9)) {
            R.check("beta2.thin-vanishing", "thin-simplex-vanishing", 9, F, sn, D, 1e-14,
                    [&] { return beta2(al, sg, R.cfg()).norm(); });
            R.check("structure.thin-cup", "thin-simplex-edge-transport", 0, F, sn, D, 1e-9, [&] {
                Gl0Element diag = beta1(al, simplex_as_path(face(sg, 1)), R.cfg());
                Gl0Element bottom = beta1(al, simplex_as_path(face(sg, 2)), R.cfg());
                Gl0Element side = beta1(al, simplex_as_path(face(sg, 0)), R.cfg());
                return (diag.matrix() - bottom.matrix() * side.matrix()).norm();
            });
        } else {
            R.check("structure.n2", "structure-equation-n2", 8, F, sn, D, 1e-5,
                    [&] { return structure_residual_n2(al, sg, R.cfg()); });
        }
    }
    if (fx.simplices.count("generic") && al.has_alpha1() && !al.terms(2).empty()) {
        R.check("structure.n2-convergence", "structure-equation-n2-refinement", 8, F, "generic", D, 4.0, [&] {
            QuadratureConfig coarse = R.cfg();
            coarse.simplex_order = 2;
            coarse.ode_steps = 4;
            coarse.panel_width = 1.0;
            QuadratureConfig refined = coarse;
            refined.simplex_order = 4;
            refined.ode_steps = 8;
            const SimplexMap& sg = fx.simplices.at("generic");
            double r0 = structure_residual_n2(al, sg, coarse), r1 = structure_residual_n2(al, sg, refined);
            return r1 > 0.0 ? r0 / r1 : std::numeric_limits<double>::infinity();
        }, "ge");
    }
}

inline void main_theorem_checks(Runner& R, const Fixture& fx)
{
    const std::string F = fx.name, D = doc_of(fx);
    auto c = std::make_shared<TwoConnection>(fx.field);
    std::string base = fx.two_paths.count("square") ? "square" : (fx.two_paths.count("lens") ? "lens" : "");
    std::string bump = fx.two_paths.count("bump_square") ? "bump_square" : (fx.two_paths.count("bump_lens") ? "bump_lens" : "");
    if (base.empty()) base = pick_two_paths(fx, {}, 1).empty() ? "" : pick_two_paths(fx, {}, 1)[0];

    std::vector<std::pair<std::string, TwoPath>> cases;
    if (!base.empty()) cases.emplace_back(base, fx.two_paths.at(base));
    if (!bump.empty()) cases.emplace_back(bump, fx.two_paths.at(bump));
    if (!base.empty()) cases.emplace_back("shrink(" + base + ")", shrink_well_supported(fx.two_paths.at(base)));
    for (const auto& [name, G] : cases)
        R.check("main.residual", "main-theorem", 10, F, name, D, 1e-4,
                [&] { return main_theorem_residual(fx.field, G, R.cfg()); });

    for (const auto& ev : fx.expected) {
        if (ev.quantity != "hol2") continue;
        const TwoPath& G = fx.two_paths.at(ev.two_path);
        GradedMap want = ev.scale * fx.maps.at(ev.map);
        R.check("main.closed-form", "main-theorem-closed-form", 10, F, ev.two_path, D + ev.id, 1e-5, [&] {
            double a = quotient_distance(hol2_ode(*c, G, R.cfg()).rep(), want);
            double b = quotient_distance(truncate_rep(fx.field, R.cfg()).on_two_path(G).rep(), want);
            return std::max(a, b);
        });
    }

    if (!base.empty() && fx.field->has_alpha1() && !fx.field->terms(2).empty())
        R.check("main.refinement", "main-theorem-refinement", 0, F, base, D, 1e-13, [&] {
            // residuals must not grow as the quadrature is refined
            QuadratureConfig q = R.cfg();
            q.panel_width = 1.0;
            double prev = std::numeric_limits<double>::infinity(), worst = 0.0;
            for (int K : {2, 4, 8}) {
                q.simplex_order = K;
                double r = main_theorem_residual(fx.field, fx.two_paths.at(base), q);
                worst = std::max(worst, r - prev);
                prev = r;
            }
            return std::max(worst, 0.0);
        });
}

}  // namespace suites

/**
 * Run a suite over the selected fixtures.  Fixture load failures produce a
 * failing "fixture.load" record and skip that fixture.
 */
inline Report run_suite(const std::string& suite, const SuiteOptions& opt)
{
    if (std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end())
        throw UsageError("unknown suite '" + suite + "'");
    opt.cfg.validate();
    Report rep;
    rep.suite = suite;
    rep.seed = opt.seed;
    rep.config = config_json(opt.cfg);
    rep.timings = opt.timings;
    Runner R(opt, rep);

    std::vector<std::string> names = opt.fixtures.empty() ? catalog::names() : opt.fixtures;
    std::vector<Fixture> fixtures;
    for (const auto& n : names) {
        try {
            fixtures.push_back(load_fixture(n, opt.cfg.fd_step));
            rep.fixtures.push_back(fixtures.back().name);
        } catch (const std::exception& e) {
            R.check("fixture.load", "fixture-schema", 0, n, "-", n, 0.0,
                    [&]() -> double { throw FixtureError(e.what()); });
            rep.fixtures.push_back(n);
        }
    }

    const bool all = suite == "all";
    if (all || suite == "algebra") {
        suites::geometry_checks(R);
        for (const auto& fx : fixtures) suites::algebra_checks(R, fx);
    }
    if (all || suite == "transport1")
        for (const auto& fx : fixtures) suites::transport1_checks(R, fx);
    if (all || suite == "transport2")
        for (const auto& fx : fixtures) suites::transport2_checks(R, fx);
    if (all || suite == "truncation")
        for (const auto& fx : fixtures) suites::truncation_checks(R, fx);
    if (all || suite == "main-theorem")
        for (const auto& fx : fixtures) suites::main_theorem_checks(R, fx);

    if (all) {
        // coverage audit: each required anchor maps to exactly one check id and
        // every record carries a known anchor.  Anchors of fixture-dependent
        // checks may be absent when the fixture list is narrowed.
        std::map<std::string, std::set<std::string>> ids;
        for (const auto& r : rep.records) ids[r.anchor].insert(r.id);
        const auto& req = required_anchors();
        const auto& aux = plumbing_anchors();
        std::string problems;
        double bad = 0.0;
        auto flag = [&](const std::string& what) {
            bad += 1.0;
            problems += (problems.empty() ? "" : ", ") + what;
        };
        for (const auto& a : req) {
            auto it = ids.find(a);
            std::size_t n = it == ids.end() ? 0 : it->second.size();
            if (n > 1 || (n == 0 && opt.fixtures.empty())) flag((n ? "shared " : "uncovered ") + a);
        }
        for (const auto& [a, s] : ids)
            if (std::find(req.begin(), req.end(), a) == req.end() && std::find(aux.begin(), aux.end(), a) == aux.end())
                flag("unknown " + a);
        R.check("coverage.audit", "coverage", 0, "-", "required anchors", "", 0.0, [&] { return bad; });
        if (!problems.empty()) rep.records.back().note = problems;
    }
    rep.normalize();
    return rep;
}

}  // namespace holonomy
