#include "holonomy/harness.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace holonomy;
namespace fs = std::filesystem;

namespace {

nlohmann::json minimal_doc()
{
    return {{"name", "tiny"},
            {"chart_dim", 1},
            {"complex", {{"lowest_degree", 0}, {"dims", {1, 1}}, {"differential", {{{1.0}}}}}},
            {"alpha1", nlohmann::json::array()}};
}

fs::path scratch_dir(const std::string& tag)
{
    fs::path d = fs::temp_directory_path() / ("holonomy_test_" + tag);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST(Fixture, LoadsFixA)
{
    Fixture fx = load_fixture("FIX-A");
    EXPECT_EQ(fx.name, "FIX-A");
    EXPECT_EQ(fx.chart_dim, 2);
    ASSERT_TRUE(fx.maps.count("C"));
    const GradedMap& C = fx.maps.at("C");
    EXPECT_EQ(C.degree(), -1);
    EXPECT_LE(graded_commutator_with_differential(C).matrix().norm(), 1e-15);
    EXPECT_LE(fx.flatness, 1e-10);
    EXPECT_TRUE(fx.two_paths.count("square"));
    EXPECT_TRUE(fx.two_paths.count("lens"));
    EXPECT_EQ(fx.expected.size(), 2u);
}

TEST(Fixture, LoadsFixB)
{
    Fixture fx = load_fixture("FIX-B");
    EXPECT_TRUE(fx.field->has_alpha1());
    EXPECT_TRUE(fx.field->terms(2).empty());
    EXPECT_TRUE(fx.paths.count("curve"));
    EXPECT_TRUE(fx.paths.count("loop"));
}

TEST(Fixture, MinimalDocument)
{
    Fixture fx = load_fixture_json(minimal_doc());
    EXPECT_EQ(fx.complex->total_dim(), 2);
    EXPECT_TRUE(fx.paths.empty());
}

TEST(Fixture, RejectsNonDifferential)
{
    auto doc = minimal_doc();
    doc["complex"] = {{"lowest_degree", 0}, {"dims", {1, 1, 1}}, {"differential", {{{1.0}}, {{1.0}}}}};
    EXPECT_THROW(load_fixture_json(doc), FixtureError);
}

TEST(Fixture, SchemaErrors)
{
    std::vector<nlohmann::json> bad;
    {
        auto d = minimal_doc();
        d.erase("complex");
        bad.push_back(d);
    }
    {
        auto d = minimal_doc();
        d.erase("name");
        bad.push_back(d);
    }
    {
        auto d = minimal_doc();
        d["chart_dim"] = 5;
        bad.push_back(d);
    }
    {
        auto d = minimal_doc();
        d["complex"]["differential"] = {{{1.0, 2.0}}};   // wrong shape
        bad.push_back(d);
    }
    {
        auto d = minimal_doc();
        d["alpha1"] = {{{"coeff", "x"}, {"dx", {0}}, {"map", "nope"}}};
        bad.push_back(d);
    }
    {
        auto d = minimal_doc();
        d["maps"]["M"] = {{"degree", 0}, {"blocks", {{"0", {{1.0}}}}}};
        d["alpha2"] = {{{"coeff", "1"}, {"dx", {0, 0}}, {"map", "M"}}};   // alpha2 needs degree -1
        bad.push_back(d);
    }
    {
        auto d = minimal_doc();
        d["maps"]["M"] = {{"degree", "minus one"}};
        bad.push_back(d);
    }
    {
        auto d = minimal_doc();
        d["maps"]["M"] = {{"degree", -1}, {"blocks", {{"zero", {{1.0}}}}}};
        bad.push_back(d);
    }
    {
        auto d = minimal_doc();
        d["paths"]["p"] = {{"components", {"t +"}}};
        bad.push_back(d);
    }
    {
        auto d = minimal_doc();
        d["paths"]["p"] = {{"components", {"t", "t"}}};   // chart is 1-dimensional
        bad.push_back(d);
    }
    {
        auto d = minimal_doc();
        d["two_paths"]["G"] = {{"components", {"t*s"}}};   // moves along the side t = 1
        bad.push_back(d);
    }
    {
        auto d = minimal_doc();
        d["alpha1"] = 3;
        bad.push_back(d);
    }
    for (std::size_t i = 0; i < bad.size(); ++i)
        EXPECT_THROW(load_fixture_json(bad[i]), FixtureError) << "document " << i << ": " << bad[i].dump();
}

TEST(Fixture, RejectsNonFlatField)
{
    // alpha1 = x dy M with M the identity: d alpha1 = dx dy M and alpha1^2 = 0
    auto doc = minimal_doc();
    doc["chart_dim"] = 2;
    doc["maps"]["M"] = {{"degree", 0}, {"blocks", {{"0", {{1.0}}}, {"1", {{1.0}}}}}};
    doc["alpha1"] = {{{"coeff", "x"}, {"dx", {1}}, {"map", "M"}}};
    try {
        load_fixture_json(doc);
        FAIL() << "expected FixtureError";
    } catch (const FixtureError& e) {
        EXPECT_NE(std::string(e.what()).find("not flat"), std::string::npos);
    }
    doc["alpha1"][0]["coeff"] = "2";
    EXPECT_NO_THROW(load_fixture_json(doc));
}

TEST(Fixture, UnknownNameOrPath)
{
    EXPECT_THROW(load_fixture("FIX-Z"), FixtureError);
    EXPECT_THROW(load_fixture("/nonexistent/fixture.json"), FixtureError);
}

TEST(Fixture, MalformedFile)
{
    fs::path dir = scratch_dir("malformed");
    fs::path p = dir / "broken.json";
    std::ofstream(p) << "{ \"name\": ";
    EXPECT_THROW(load_fixture(p.string()), FixtureError);
}

TEST(Fixture, EnvironmentDirectoryTakesPrecedence)
{
    fs::path dir = scratch_dir("envdir");
    auto doc = minimal_doc();
    doc["name"] = "from-env";
    std::ofstream(dir / "FIX-A.json") << doc.dump();
    ASSERT_EQ(setenv("HOLONOMY_FIXTURE_DIR", dir.c_str(), 1), 0);
    Fixture fx = load_fixture("FIX-A");
    Fixture other = load_fixture("FIX-B");   // not in the directory: built-in
    unsetenv("HOLONOMY_FIXTURE_DIR");
    EXPECT_EQ(fx.name, "from-env");
    EXPECT_EQ(other.name, "FIX-B");
}

TEST(Fixture, ShippedFilesMatchCatalog)
{
    fs::path dir = fs::path(HOLONOMY_SOURCE_DIR) / "fixtures";
    for (const auto& n : catalog::names()) {
        fs::path p = dir / (n + ".json");
        ASSERT_TRUE(fs::exists(p)) << p;
        auto doc = nlohmann::json::parse(slurp(p));
        EXPECT_EQ(doc, catalog::document(n)) << n;
        Fixture fx = load_fixture(p.string());
        EXPECT_EQ(fx.name, n);
    }
}

TEST(Report, EmptyReportIsValidJson)
{
    Report rep;
    rep.suite = "algebra";
    auto j = nlohmann::json::parse(stable_dump(to_json(rep)));
    EXPECT_EQ(j.at("records").size(), 0u);
    EXPECT_EQ(j.at("summary").at("total"), 0);
    EXPECT_EQ(j.at("tool"), "holonomy");
    EXPECT_TRUE(rep.passed());
}

TEST(Report, StableDumpSortsKeysAndKeepsDigits)
{
    nlohmann::json j = {{"b", 0.1}, {"a", {1, 2}}, {"c", nlohmann::json::object()}};
    std::string s = stable_dump(j);
    EXPECT_LT(s.find("\"a\""), s.find("\"b\""));
    EXPECT_NE(s.find("0.10000000000000001"), std::string::npos);
    EXPECT_EQ(nlohmann::json::parse(s), j);
}

TEST(Report, FailRecordRendering)
{
    Report rep;
    rep.suite = "algebra";
    CheckRecord r;
    r.id = "xmod.star-assoc";
    r.fixture = "FIX-A";
    r.subject = "samples";
    r.residual = 0.5;
    r.tolerance = 1e-10;
    r.pass = evaluate(r);
    rep.records.push_back(r);
    EXPECT_FALSE(r.pass);
    std::string t = render_text(rep);
    EXPECT_NE(t.find("FAIL"), std::string::npos);
    EXPECT_NE(t.find("0.5"), std::string::npos);
    EXPECT_NE(t.find("<=1e-10"), std::string::npos);
    EXPECT_NE(t.find("1 failed"), std::string::npos);
}

TEST(Report, NanNeverPasses)
{
    CheckRecord r;
    r.residual = std::nan("");
    r.tolerance = 1.0;
    EXPECT_FALSE(evaluate(r));
    r.relation = "ge";
    EXPECT_FALSE(evaluate(r));
    r.residual = 2.0;
    EXPECT_TRUE(evaluate(r));
}

TEST(Report, EmitErrors)
{
    Report rep;
    EXPECT_THROW(emit_report(rep, "json", "/nonexistent-dir/sub/report.json"), ReportIOError);
    EXPECT_THROW(emit_report(rep, "yaml", "-"), std::invalid_argument);
}

TEST(Report, EmitRoundTrip)
{
    fs::path dir = scratch_dir("emit");
    Report rep;
    rep.suite = "algebra";
    CheckRecord r;
    r.id = "a";
    r.residual = 1.0 / 3.0;
    r.tolerance = 1.0;
    r.pass = true;
    rep.records.push_back(r);
    emit_report(rep, "json", (dir / "r.json").string());
    auto j = nlohmann::json::parse(slurp(dir / "r.json"));
    EXPECT_EQ(j.at("records")[0].at("residual").get<double>(), 1.0 / 3.0);
    EXPECT_FALSE(j.at("records")[0].contains("wall_ms"));
}

TEST(Suite, UnknownSuite)
{
    EXPECT_THROW(run_suite("everything", SuiteOptions{}), UsageError);
}

TEST(Suite, BadConfig)
{
    SuiteOptions opt;
    opt.cfg.ode_steps = 0;
    EXPECT_THROW(run_suite("algebra", opt), std::invalid_argument);
}

TEST(Suite, AlgebraPassesAndIsDeterministic)
{
    SuiteOptions opt;
    opt.fixtures = {"FIX-A", "FIX-D"};
    Report a = run_suite("algebra", opt), b = run_suite("algebra", opt);
    for (const auto& r : a.records) EXPECT_TRUE(r.pass) << r.id << " " << r.fixture << " " << r.subject << " " << r.note;
    EXPECT_GT(a.records.size(), 10u);
    EXPECT_EQ(stable_dump(to_json(a)), stable_dump(to_json(b)));
    EXPECT_EQ(a.fixtures, (std::vector<std::string>{"FIX-A", "FIX-D"}));
}

TEST(Suite, SeedChangesSamplesNotVerdicts)
{
    SuiteOptions opt;
    opt.fixtures = {"FIX-A"};
    Report a = run_suite("algebra", opt);
    opt.seed = 7;
    Report b = run_suite("algebra", opt);
    EXPECT_TRUE(b.passed());
    EXPECT_NE(stable_dump(to_json(a)), stable_dump(to_json(b)));
}

TEST(Suite, MainTheoremOnFixA)
{
    SuiteOptions opt;
    opt.fixtures = {"FIX-A"};
    Report rep = run_suite("main-theorem", opt);
    int residuals = 0;
    for (const auto& r : rep.records) {
        EXPECT_TRUE(r.pass) << r.id << " " << r.subject << " " << r.note;
        if (r.id == "main.residual") {
            ++residuals;
            EXPECT_LE(r.residual, 1e-4);
            EXPECT_EQ(r.criterion, 10);
        }
    }
    EXPECT_GE(residuals, 2);
}

TEST(Suite, BadFixtureGivesFailingRecord)
{
    SuiteOptions opt;
    opt.fixtures = {"FIX-A", "no-such-fixture"};
    Report rep = run_suite("algebra", opt);
    EXPECT_FALSE(rep.passed());
    int load = 0;
    for (const auto& r : rep.records)
        if (r.id == "fixture.load") {
            ++load;
            EXPECT_FALSE(r.pass);
            EXPECT_EQ(r.fixture, "no-such-fixture");
            EXPECT_NE(r.note.find("unknown fixture"), std::string::npos);
        } else {
            EXPECT_TRUE(r.pass) << r.id;
        }
    EXPECT_EQ(load, 1);
}

TEST(Suite, RecordsAreSorted)
{
    SuiteOptions opt;
    opt.fixtures = {"FIX-B"};
    Report rep = run_suite("transport1", opt);
    ASSERT_FALSE(rep.records.empty());
    for (std::size_t i = 1; i < rep.records.size(); ++i) {
        const auto &p = rep.records[i - 1], &q = rep.records[i];
        EXPECT_LE(std::tie(p.id, p.fixture, p.subject), std::tie(q.id, q.fixture, q.subject));
    }
}

TEST(Suite, AnchorListsAreDisjointAndUnique)
{
    std::set<std::string> seen;
    for (const auto& a : required_anchors()) EXPECT_TRUE(seen.insert(a).second) << a;
    for (const auto& a : plumbing_anchors()) EXPECT_TRUE(seen.insert(a).second) << a;
}
