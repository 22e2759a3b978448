#include "holonomy/fixture.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace holonomy;

namespace {

Point pt(std::initializer_list<double> v)
{
    Point p(static_cast<int>(v.size()));
    int i = 0;
    for (double x : v) p(i++) = x;
    return p;
}

/// FIX-A complex with alpha^2 = coeff dx^dy (x) map on a chart of dimension n.
std::shared_ptr<const SuperconnectionField> pure_alpha2(const std::string& coeff, int n, GradedMap* C_out = nullptr)
{
    Mat d = Mat::Zero(2, 2);
    d(0, 0) = 1.0;
    auto cx = CochainComplex::create(0, {2, 2}, {d});
    Mat c = Mat::Zero(4, 4);
    c(1, 3) = 1.0;
    GradedMap C(cx, -1, c);
    if (C_out) *C_out = C;
    return std::make_shared<SuperconnectionField>(cx, n, std::vector<FormTerm>{},
                                                  std::vector<FormTerm>{{parse(coeff), {0, 1}, C}});
}

}  // namespace

TEST(Superconnection, RejectsMalformedTerms)
{
    auto cx = oracle::rank11();
    GradedMap id = GradedMap::identity(cx), m1(cx, -1);
    EXPECT_THROW(SuperconnectionField(cx, 2, {{parse("1"), {0}, m1}}, {}), StructuralError);
    EXPECT_THROW(SuperconnectionField(cx, 2, {{parse("1"), {0, 1}, id}}, {}), StructuralError);
    EXPECT_THROW(SuperconnectionField(cx, 2, {{parse("1"), {2}, id}}, {}), StructuralError);
    EXPECT_THROW(SuperconnectionField(cx, 4, {}, {}), StructuralError);
    EXPECT_THROW(SuperconnectionField(oracle::rank11(), 2, {{parse("1"), {0}, id}}, {}), StructuralError);
}

TEST(Truncation, ZeroSuperconnection)
{
    auto cx = oracle::w121();
    auto al = std::make_shared<SuperconnectionField>(SuperconnectionField::zero(cx, 3));
    TwoConnection c = truncate_connection(al);
    Point x = pt({0.2, 0.3, 0.4}), v = pt({1, 0, 0}), w = pt({0, 1, 0}), u = pt({0, 0, 1});
    EXPECT_EQ(c.A(x, v).norm(), 0.0);
    EXPECT_EQ(c.B(x, v, w).norm(), 0.0);
    for (int n = 1; n <= 3; ++n) {
        std::vector<Point> vs{v, w, u};
        vs.resize(n);
        EXPECT_EQ(flatness_residual(*al, x, vs, n, 1e-4).norm(), 0.0);
    }
    auto cr = curvature_two_connection(c, x, v, w, u, 1e-4);
    EXPECT_EQ(cr.FA_minus_deltaB.norm(), 0.0);
    EXPECT_EQ(cr.curv3.norm(), 0.0);
}

TEST(Truncation, FixAGivesMinusC)
{
    GradedMap C;
    auto al = pure_alpha2("1", 2, &C);
    TwoConnection c = truncate_connection(al);
    Point x = pt({0.3, 0.6}), ex = pt({1, 0}), ey = pt({0, 1});
    EXPECT_EQ(c.A(x, ex).norm(), 0.0);
    EXPECT_EQ((c.B(x, ex, ey) + C.matrix()).norm(), 0.0);
    EXPECT_EQ((c.B(x, ey, ex) - C.matrix()).norm(), 0.0);
    EXPECT_LT(graded_commutator_with_differential(C).norm(), 1e-15);
}

TEST(Truncation, BIsMinusProjectedAlpha2OnEveryFixture)
{
    for (const auto& name : catalog::names()) {
        Fixture fx = load_fixture(name);
        TwoConnection c(fx.field);
        const int n = fx.chart_dim;
        for (const Point& x : sample_grid(n))
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    Point v = basis_vector(n, i) + 0.3 * basis_vector(n, j), w = basis_vector(n, j);
                    Mat expect = -oracle::project_out_boundary(fx.complex, fx.field->a2(x, v, w));
                    EXPECT_LT((c.B(x, v, w) - expect).norm(), 1e-12) << name;
                }
    }
}

TEST(Truncation, FixCClosedForm)
{
    // B = dphi ^ dx (x) pi(N'), phi = 0.7 cos x + 0.6 sin 2y + 0.5 x z
    Fixture fx = load_fixture("FIX-C");
    TwoConnection c(fx.field);
    const GradedMap& Np = fx.maps.at("Nprime");
    Mat piN = oracle::project_out_boundary(fx.complex, Np.matrix());
    Point x = pt({0.4, 0.2, 0.7});
    double phi_y = 1.2 * std::cos(0.4), phi_z = 0.5 * 0.4;
    Point ex = pt({1, 0, 0}), ey = pt({0, 1, 0}), ez = pt({0, 0, 1});
    // (dphi ^ dx)(e_x, e_y) = -phi_y, (dphi ^ dx)(e_x, e_z) = -phi_z
    EXPECT_LT((c.B(x, ex, ey) + phi_y * piN).norm(), 1e-14);
    EXPECT_LT((c.B(x, ex, ez) + phi_z * piN).norm(), 1e-14);
    EXPECT_LT(c.B(x, ey, ez).norm(), 1e-14);
}

TEST(Flatness, FixAIsFlat)
{
    auto al = pure_alpha2("1 + x*y", 2);
    Point x = pt({0.3, 0.8});
    EXPECT_LE(flatness_residual(*al, x, {pt({1, 0}), pt({0, 1})}, 2, 1e-4).norm(), 1e-10);
    auto al3 = pure_alpha2("1 + x*y", 3);
    Point x3 = pt({0.3, 0.8, 0.1});
    EXPECT_LE(flatness_residual(*al3, x3, {pt({1, 0, 0}), pt({0, 1, 0}), pt({0, 0, 1})}, 3, 1e-4).norm(), 1e-10);
    EXPECT_LE(max_flatness_residual(*al3, 1e-4), 1e-10);
    TwoConnection c = truncate_connection(al3);
    for (const Point& p : sample_grid(3)) {
        auto cr = curvature_two_connection(c, p, pt({1, 0, 0}), pt({0, 1, 0}), pt({0, 0, 1}), 1e-4);
        EXPECT_LE(cr.FA_minus_deltaB.norm(), 1e-10);
        EXPECT_LE(cr.curv3.norm(), 1e-10);
    }
}

TEST(Flatness, FixBAtRoundoff)
{
    // central differences of these coefficients cancel exactly in d alpha1
    Fixture fx = load_fixture("FIX-B");
    Point x = pt({0.7, 0.4}), ex = pt({1, 0}), ey = pt({0, 1});
    for (double h : {2e-2, 1e-2, 5e-3})
        EXPECT_LE(flatness_residual(*fx.field, x, {ex, ey}, 2, h).norm(), 1e-12) << h;
    EXPECT_LT(flatness_residual(*fx.field, x, {ex}, 1, 1e-4).norm(), 1e-15);
}

TEST(Flatness, SecondOrderConvergence)
{
    // alpha1 = d(e^x y^3) M: the difference quotients err by e^x h^2 (1 - y^2 / 2)
    nlohmann::json doc = {
        {"name", "exact-form"},
        {"chart_dim", 2},
        {"complex", {{"lowest_degree", 0}, {"dims", {1, 1}}, {"differential", {{{1.0}}}}}},
        {"maps", {{"M", {{"degree", 0}, {"blocks", {{"0", {{1.0}}}, {"1", {{1.0}}}}}}}}},
        {"alpha1",
         {{{"coeff", "exp(x)*y^3"}, {"dx", {0}}, {"map", "M"}}, {{"coeff", "3*exp(x)*y^2"}, {"dx", {1}}, {"map", "M"}}}}};
    Fixture fx = load_fixture_json(doc);
    Point x = pt({0.7, 0.4}), ex = pt({1, 0}), ey = pt({0, 1});
    double r1 = flatness_residual(*fx.field, x, {ex, ey}, 2, 2e-2).norm();
    double r2 = flatness_residual(*fx.field, x, {ex, ey}, 2, 1e-2).norm();
    double r3 = flatness_residual(*fx.field, x, {ex, ey}, 2, 5e-3).norm();
    EXPECT_NEAR(r1, std::exp(0.7) * 4e-4 * (1 - 0.08) * std::sqrt(2.0), 1e-6);
    EXPECT_NEAR(r1 / r2, 4.0, 0.2);
    EXPECT_NEAR(r2 / r3, 4.0, 0.2);
}

TEST(Flatness, NonFlatFieldIsRejected)
{
    // d(f dx^dy) = f_z dx^dy^dz != 0
    auto al = pure_alpha2("1 + x*z", 3);
    try {
        truncate_connection(al);
        FAIL() << "expected FlatnessError";
    } catch (const FlatnessError& e) {
        EXPECT_GT(e.residual, 1e-6);
        EXPECT_EQ(e.point.size(), 3);
    }
    EXPECT_THROW(flatness_residual(*al, pt({0, 0, 0}), {pt({1, 0, 0})}, 2, 1e-4), StructuralError);
}

TEST(Curvature, ThreeFormIsDzOfCoefficient)
{
    // alpha^2 = -f dx^dy C gives B = f dx^dy C, and dB(e_x, e_y, e_z) = f_z C
    GradedMap C;
    auto al = pure_alpha2("-(1 + x*z + z^2)", 3, &C);
    TwoConnection c(al);
    Point x = pt({0.4, 0.5, 0.3});
    auto cr = curvature_two_connection(c, x, pt({1, 0, 0}), pt({0, 1, 0}), pt({0, 0, 1}), 1e-4);
    double fz = 0.4 + 2 * 0.3;
    EXPECT_LT((cr.curv3.matrix() - fz * C.matrix()).norm(), 1e-9);
    EXPECT_GT(cr.curv3.norm(), 0.5);
}

TEST(Curvature, TruncationsOfCatalogFixturesAreFlat)
{
    for (const auto& name : catalog::names()) {
        Fixture fx = load_fixture(name);
        TwoConnection c = truncate_connection(fx.field);
        const int n = fx.chart_dim;
        for (const Point& x : sample_grid(n)) {
            Point u = n == 3 ? basis_vector(3, 2) : basis_vector(n, 0);
            auto cr = curvature_two_connection(c, x, basis_vector(n, 0), basis_vector(n, 1), u, 1e-5);
            EXPECT_LE(cr.FA_minus_deltaB.norm(), 1e-8) << name;
            EXPECT_LE(quotient_project(cr.curv3).norm(), 1e-8) << name;
        }
    }
}
