#include "holonomy/fixture.hpp"
#include "holonomy/transport.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

using namespace holonomy;

namespace {

Point pt(std::initializer_list<double> v)
{
    Point p(static_cast<int>(v.size()));
    int i = 0;
    for (double x : v) p(i++) = x;
    return p;
}

std::vector<Expr> exprs(std::initializer_list<const char*> src)
{
    std::vector<Expr> out;
    for (const char* s : src) out.push_back(parse(s));
    return out;
}

const Fixture& fixture(const std::string& name)
{
    static std::map<std::string, Fixture> cache;
    auto it = cache.find(name);
    if (it == cache.end()) it = cache.emplace(name, load_fixture(name)).first;
    return it->second;
}

Mat I_of(const ComplexPtr& cx) { return Mat::Identity(cx->total_dim(), cx->total_dim()); }

QuadratureConfig defaults() { return QuadratureConfig{}; }

}  // namespace

// ---------------------------------------------------------------------------
// 1-transport
// ---------------------------------------------------------------------------

TEST(Transport1, ZeroConnectionIsIdentity)
{
    auto cx = oracle::w121();
    auto al = SuperconnectionField::zero(cx, 2);
    Path g = expr_path(exprs({"t", "t^2"}));
    EXPECT_EQ((transport1_ode(al, g, defaults()).matrix() - I_of(cx)).norm(), 0.0);
    auto ser = transport1_series(al, g, 4, defaults());
    EXPECT_EQ((ser.g.matrix() - I_of(cx)).norm(), 0.0);
    EXPECT_EQ((ser.g_inv.matrix() - I_of(cx)).norm(), 0.0);
    EXPECT_EQ((ser.g_reversed.matrix() - I_of(cx)).norm(), 0.0);
}

TEST(Transport1, ConstantCoefficientIsMatrixExponential)
{
    auto cx = oracle::w121();
    std::mt19937_64 rng(41);
    GradedMap M = graded_commutator_with_differential(oracle::random_map(cx, -1, rng)) + 0.3 * GradedMap::identity(cx);
    SuperconnectionField al(cx, 1, {{parse("1"), {0}, M}}, {});
    QuadratureConfig cfg;
    cfg.ode_steps = 1000;
    Mat G = transport1_ode(al, expr_path(exprs({"t"})), cfg).matrix();
    Mat ref = (-M.matrix()).exp();
    EXPECT_LT((G - ref).norm(), 1e-10);
}

TEST(Transport1, SeriesMatchesOde)
{
    QuadratureConfig cfg;
    cfg.ode_steps = 1000;
    for (const char* name : {"FIX-B", "FIX-C", "FIX-E"}) {
        const Fixture& fx = fixture(name);
        const Mat I = I_of(fx.complex);
        for (const char* pn : {"curve", "loop"}) {
            const Path& g = fx.paths.at(pn);
            auto ser = transport1_series(*fx.field, g, 8, cfg);
            Mat ode = transport1_ode(*fx.field, g, cfg).matrix();
            Mat rev = transport1_ode(*fx.field, reverse_path(g), cfg).matrix();
            EXPECT_LE((ser.g.matrix() - ode).norm(), 1e-8) << name << " " << pn;
            EXPECT_LE((ser.g_reversed.matrix() - rev).norm(), 1e-8) << name << " " << pn;
            EXPECT_LE((ser.g.matrix() * ser.g_inv.matrix() - I).norm(), 1e-8) << name << " " << pn;
        }
    }
    EXPECT_THROW(transport1_series(*fixture("FIX-B").field, fixture("FIX-B").paths.at("curve"), 0, cfg),
                 std::invalid_argument);
}

TEST(Transport1, ConcatenationOrder)
{
    const Fixture& fx = fixture("FIX-E");
    QuadratureConfig cfg;
    Path g = fx.paths.at("curve");
    Point end = g(1.0);
    Path sg = expr_path(exprs({"1 + 0.3*t - 0.2*t^2", "1 - t + 0.2*sin(pi*t)"}));
    ASSERT_LT((sg(0.0) - end).norm(), 1e-12);
    Path gs = concat_paths(g, sg);
    QuadratureConfig fine = cfg;
    fine.ode_steps = 2 * cfg.ode_steps;   // same steps per leg
    Mat hg = transport1_ode(*fx.field, g, cfg).matrix(), hs = transport1_ode(*fx.field, sg, cfg).matrix();
    Mat hgs = transport1_ode(*fx.field, gs, fine).matrix();
    EXPECT_LE((hgs - hs * hg).norm(), 1e-9);
    EXPECT_GT((hgs - hg * hs).norm(), 1e-3);   // the factors do not commute here
    Mat bg = beta1(*fx.field, g, cfg).matrix(), bs = beta1(*fx.field, sg, cfg).matrix();
    EXPECT_LE((beta1(*fx.field, gs, fine).matrix() - bg * bs).norm(), 1e-9);
}

TEST(Beta1, Examples)
{
    const Fixture& fx = fixture("FIX-C");
    QuadratureConfig cfg;
    const Mat I = I_of(fx.complex);
    EXPECT_EQ((beta1(*fx.field, constant_path(pt({0.3, 0.2, 0.1})), cfg).matrix() - I).norm(), 0.0);
    for (const char* pn : {"curve", "loop"}) {
        const Path& g = fx.paths.at(pn);
        Mat b = beta1(*fx.field, g, cfg).matrix();
        Mat br = beta1(*fx.field, reverse_path(g), cfg).matrix();
        EXPECT_LE((br - b.inverse()).norm(), 1e-9) << pn;
        EXPECT_LE((b * transport1_ode(*fx.field, g, cfg).matrix() - I).norm(), 1e-9) << pn;
    }
}

// ---------------------------------------------------------------------------
// beta^2
// ---------------------------------------------------------------------------

TEST(Beta2, ThinSimplicesVanish)
{
    QuadratureConfig cfg;
    for (const auto& name : catalog::names()) {
        const Fixture& fx = fixture(name);
        for (const char* sn : {"thin", "thin_diagonal"}) {
            EXPECT_LE(beta2(*fx.field, fx.simplices.at(sn), cfg).norm(), 1e-14) << name << " " << sn;
        }
    }
}

namespace {

/// int_{I^2} det(dTheta/dt, dTheta/ds) by central differences of theta(), split at its kinks.
double theta_area_oracle()
{
    std::vector<double> x, w;
    oracle::gauss_legendre(20, x, w);
    const double h = 1e-6;
    double total = 0.0;
    for (int j = 0; j < 20; ++j) {
        const double s = x[j];
        const double cuts[] = {0.0, 0.5 * (1.0 - s), 0.5, 1.0};
        for (int p = 0; p < 3; ++p) {
            double lo = cuts[p], hi = cuts[p + 1];
            for (int i = 0; i < 20; ++i) {
                double t = lo + (hi - lo) * x[i];
                Eigen::Vector2d dt = (theta(t + h, s) - theta(t - h, s)) / (2 * h);
                Eigen::Vector2d ds = (theta(t, s + h) - theta(t, s - h)) / (2 * h);
                total += w[j] * (hi - lo) * w[i] * (dt(0) * ds(1) - dt(1) * ds(0));
            }
        }
    }
    return total;
}

}  // namespace

TEST(Beta2, FixAClosedFormOnLowerTriangle)
{
    const Fixture& fx = fixture("FIX-A");
    const GradedMap& C = fx.maps.at("C");
    double area = theta_area_oracle();
    EXPECT_NEAR(area, 0.5, 1e-8);
    SimplexMap sb = two_path_b(fx.two_paths.at("square"));
    SeriesResult r = beta2_detail(*fx.field, sb, defaults());
    EXPECT_LT((r.value - (-area) * C).norm(), 1e-8);
    EXPECT_EQ(r.layers, 2);   // alpha^1 = 0: only the (0, 0) layer is nonzero
    EXPECT_EQ(r.layer_norms[1], 0.0);
    GradedMap ra = beta2(*fx.field, two_path_a(fx.two_paths.at("square")), defaults());
    EXPECT_LT((ra - 0.5 * C).norm(), 1e-12);
}

TEST(Beta2, StructureEquation)
{
    QuadratureConfig cfg;
    for (const char* name : {"FIX-A", "FIX-C", "FIX-D", "FIX-E"}) {
        const Fixture& fx = fixture(name);
        for (const char* sn : {"generic", "skew"})
            EXPECT_LE(structure_residual_n2(*fx.field, fx.simplices.at(sn), cfg), 1e-5) << name << " " << sn;
        EXPECT_LE(structure_residual_n2(*fx.field, fx.simplices.at("thin"), cfg), 1e-9) << name;
    }
    auto zero = SuperconnectionField::zero(oracle::w121(), 2);
    EXPECT_EQ(structure_residual_n2(zero, fixture("FIX-D").simplices.at("generic"), cfg), 0.0);
}

// ---------------------------------------------------------------------------
// 2-holonomy
// ---------------------------------------------------------------------------

TEST(Hol2, ZeroBIsUnit)
{
    const Fixture& fx = fixture("FIX-B");   // alpha^2 = 0
    TwoConnection c(fx.field);
    const TwoPath& G = fx.two_paths.at("lens");
    EXPECT_LT(hol2_ode(c, G, defaults()).rep().norm(), 1e-15);
    EXPECT_LT(hol2_integral(c, G, defaults()).rep().norm(), 1e-15);
    EXPECT_LT(z_integral(c, G, defaults()).norm(), 1e-15);
}

TEST(Hol2, ConstantTwoPathIsUnit)
{
    const Fixture& fx = fixture("FIX-D");
    TwoConnection c(fx.field);
    TwoPath G = constant_two_path(pt({0.4, 0.6}));
    EXPECT_EQ(hol2_ode(c, G, defaults()).rep().norm(), 0.0);
    EXPECT_EQ(hol2_integral(c, G, defaults()).rep().norm(), 0.0);
}

TEST(Hol2, FixAClosedForm)
{
    const Fixture& fx = fixture("FIX-A");
    TwoConnection c(fx.field);
    const GradedMap& C = fx.maps.at("C");
    for (const char* pn : {"square", "lens"}) {
        const TwoPath& G = fx.two_paths.at(pn);
        EXPECT_LT((hol2_ode(c, G, defaults()).rep() + C).norm(), 1e-10) << pn;
        EXPECT_LT((hol2_integral(c, G, defaults()).rep() + C).norm(), 1e-10) << pn;
        EXPECT_LT((z_integral(c, G, defaults()) + C).norm(), 1e-10) << pn;
    }
}

TEST(Hol2, RejectsNonTwoPaths)
{
    const Fixture& fx = fixture("FIX-A");
    TwoConnection c(fx.field);
    TwoPath G = expr_two_path(exprs({"t", "s"}));   // not marked relaxed
    EXPECT_THROW(hol2_ode(c, G, defaults()), GeometryError);
    EXPECT_THROW(hol2_integral(c, G, defaults()), GeometryError);
}

TEST(Hol2, OdeMatchesIntegral)
{
    for (const auto& name : catalog::names()) {
        const Fixture& fx = fixture(name);
        TwoConnection c(fx.field);
        const char* pn = fx.two_paths.count("bump_square") ? "bump_square" : "bump_lens";
        const TwoPath& G = fx.two_paths.at(pn);
        EXPECT_LE(quotient_distance(hol2_ode(c, G, defaults()), hol2_integral(c, G, defaults())), 1e-6) << name;
    }
}

TEST(Hol2, ZTimesEdgeHolonomyIsIntegralForm)
{
    for (const auto& name : catalog::names()) {
        const Fixture& fx = fixture(name);
        TwoConnection c(fx.field);
        const TwoPath& G = fx.two_paths.at("bump_lens");
        Mat H1 = transport1_ode(*fx.field, edge1(G), defaults()).matrix();
        GradedMap zh = GradedMap::unchecked(fx.complex, -1, z_integral(c, G, defaults()).matrix() * H1);
        EXPECT_LE(quotient_distance(zh, hol2_integral(c, G, defaults()).rep()), 1e-6) << name;
    }
}

TEST(Z, PureBIsAreaIntegral)
{
    // A = 0: Z = int int b_s(t) dt ds
    const Fixture& fx = fixture("FIX-D");
    auto al = std::make_shared<SuperconnectionField>(fx.complex, 2, std::vector<FormTerm>{}, fx.field->terms(2));
    TwoConnection c(al);
    const TwoPath& G = fx.two_paths.at("lens");
    std::vector<double> x, w;
    oracle::gauss_legendre(24, x, w);
    Mat ref = Mat::Zero(fx.complex->total_dim(), fx.complex->total_dim());
    for (int i = 0; i < 24; ++i)
        for (int j = 0; j < 24; ++j) {
            TwoSample p = G.eval(x[i], x[j]);
            ref += w[i] * w[j] * c.B(p.p, p.pt, p.ps);
        }
    SeriesResult r = z_integral_detail(c, G, defaults());
    EXPECT_LT((r.value.matrix() - ref).norm(), 1e-12);
    EXPECT_EQ(r.layers, 2);
}

namespace {

/**
 * Layers L = m + n of Z by direct summation over the conical rule on
 * Delta_{L+1} x I: the word a(u_1) ... b(u_{m+1}) ... a(u_{L+1}) with
 * u_i = 1 - t_i, for every position m of b.
 */
std::vector<Mat> z_layers_oracle(const TwoConnection& c, const TwoPath& G, int Lmax, int q)
{
    std::vector<double> sx, sw;
    oracle::gauss_legendre(q, sx, sw);
    const int N = c.complex()->total_dim();
    std::vector<Mat> out;
    for (int L = 0; L <= Lmax; ++L) {
        const int k = L + 1;
        auto rule = oracle::conical_rule(k, q);
        Mat acc = Mat::Zero(N, N);
        for (int js = 0; js < q; ++js) {
            const double s = sx[js];
            for (std::size_t p = 0; p < rule.points.size(); ++p) {
                std::vector<Mat> a(k), b(k);
                for (int i = 0; i < k; ++i) {
                    TwoSample x = G.eval(1.0 - rule.points[p][i], s);
                    a[i] = c.A(x.p, x.pt);
                    b[i] = c.B(x.p, x.pt, x.ps);
                }
                for (int m = 0; m < k; ++m) {
                    Mat word = Mat::Identity(N, N);
                    for (int i = 0; i < k; ++i) word = word * (i == m ? b[i] : a[i]);
                    acc += sw[js] * rule.weights[p] * word;
                }
            }
        }
        out.push_back(acc);
    }
    return out;
}

}  // namespace

TEST(Z, LayersMatchBruteForce)
{
    for (const char* name : {"FIX-C", "FIX-E"}) {
        const Fixture& fx = fixture(name);
        TwoConnection c(fx.field);
        const TwoPath& G = fx.two_paths.at("bump_lens");
        QuadratureConfig cfg;
        cfg.series_max = 2;
        cfg.term_tol = 1e-300;
        SeriesResult r = z_integral_detail(c, G, cfg);
        auto ref = z_layers_oracle(c, G, 2, 14);
        ASSERT_EQ(r.layers, 3);
        Mat sum = Mat::Zero(ref[0].rows(), ref[0].cols());
        for (int L = 0; L < 3; ++L) {
            EXPECT_NEAR(r.layer_norms[L], ref[L].norm(), 1e-9 * (1.0 + ref[L].norm())) << name << " layer " << L;
            sum += ref[L];
        }
        EXPECT_GT(ref[1].norm(), 1e-3) << name;   // mixed layers contribute
        EXPECT_LT((r.value.matrix() - sum).norm(), 1e-9) << name;
    }
}

// ---------------------------------------------------------------------------
// Truncation and the comparison of the two constructions
// ---------------------------------------------------------------------------

TEST(TruncateRep, ZeroSuperconnection)
{
    auto cx = oracle::w121();
    auto al = std::make_shared<SuperconnectionField>(SuperconnectionField::zero(cx, 2));
    TruncatedRep rep = truncate_rep(al, defaults());
    const Fixture& fx = fixture("FIX-D");
    EXPECT_EQ((rep.on_path(fx.paths.at("curve")).matrix() - I_of(cx)).norm(), 0.0);
    EXPECT_EQ(rep.on_two_path(fx.two_paths.at("lens")).rep().norm(), 0.0);
    EXPECT_EQ(main_theorem_residual(al, fx.two_paths.at("lens"), defaults()), 0.0);
}

TEST(TruncateRep, DeltaCompatibility)
{
    for (const char* name : {"FIX-C", "FIX-D", "FIX-E"}) {
        const Fixture& fx = fixture(name);
        TruncatedRep rep = truncate_rep(fx.field, defaults());
        const TwoPath& G = fx.two_paths.at("bump_lens");
        Mat lhs = delta(rep.on_two_path(G)).matrix();
        Mat rhs = rep.on_path(edge0(G)).inverse().matrix() * rep.on_path(edge1(G)).matrix();
        EXPECT_LE((lhs - rhs).norm(), 1e-5) << name;
    }
}

TEST(TruncateRep, FixAIdentitySquare)
{
    const Fixture& fx = fixture("FIX-A");
    TruncatedRep rep = truncate_rep(fx.field, defaults());
    Glm1Element v = rep.on_two_path(fx.two_paths.at("square"));
    EXPECT_LE(quotient_distance(v.rep(), -1.0 * fx.maps.at("C")), 1e-5);
}

TEST(MainTheorem, ResidualsAtDefaults)
{
    for (const char* name : {"FIX-A", "FIX-C", "FIX-D", "FIX-E"}) {
        const Fixture& fx = fixture(name);
        for (const char* pn : {"square", "bump_square", "lens", "bump_lens"}) {
            if (!fx.two_paths.count(pn)) continue;
            EXPECT_LE(main_theorem_residual(fx.field, fx.two_paths.at(pn), defaults()), 1e-4) << name << " " << pn;
        }
    }
}

TEST(MainTheorem, FixCConvergesUnderRefinement)
{
    const Fixture& fx = fixture("FIX-C");
    QuadratureConfig coarse;
    coarse.panel_width = 1.0;
    coarse.simplex_order = 2;
    QuadratureConfig fine = coarse;
    fine.simplex_order = 4;
    for (const char* pn : {"square", "lens"}) {
        double r2 = main_theorem_residual(fx.field, fx.two_paths.at(pn), coarse);
        double r4 = main_theorem_residual(fx.field, fx.two_paths.at(pn), fine);
        EXPECT_GE(r2 / r4, 4.0) << pn << ": " << r2 << " -> " << r4;
    }
}

TEST(Shrink, ConstantStaysConstant)
{
    TwoPath G = shrink_well_supported(constant_two_path(pt({0.1, 0.2})));
    for (double t : {0.0, 0.7, 1.0})
        for (double s : {0.0, 0.2, 1.0}) EXPECT_EQ(G(t, s), pt({0.1, 0.2}));
}

TEST(Shrink, EdgesAreReparametrised)
{
    const TwoPath& G = fixture("FIX-C").two_paths.at("bump_lens");
    TwoPath S = shrink_well_supported(G);
    auto r = [](double t) { return std::clamp((t - 0.625) / 0.25, 0.0, 1.0); };
    for (int i = 0; i <= 40; ++i) {
        double t = i / 40.0;
        EXPECT_LT((S(t, 0.0) - G(r(t), 0.0)).norm(), 1e-9);
        EXPECT_LT((S(t, 1.0) - G(r(t), 1.0)).norm(), 1e-9);
        // outside the sub-square the map has rank below two
        EXPECT_LT((S(t, 0.05) - S(t, 0.0)).norm(), 1e-15);
    }
    EXPECT_NO_THROW(validate_two_path(S));
}

TEST(Shrink, HomotopyInvarianceOfResidual)
{
    const Fixture& fx = fixture("FIX-A");
    for (const char* pn : {"square", "lens"}) {
        const TwoPath& G = fx.two_paths.at(pn);
        double r0 = main_theorem_residual(fx.field, G, defaults());
        double r1 = main_theorem_residual(fx.field, shrink_well_supported(G), defaults());
        EXPECT_LE(std::abs(r1 - r0), 2e-5) << pn;
        TwoConnection c(fx.field);
        EXPECT_LE(quotient_distance(hol2_ode(c, G, defaults()), hol2_ode(c, shrink_well_supported(G), defaults())),
                  2e-5)
            << pn;
    }
}
