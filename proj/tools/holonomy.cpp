// Command-line front end for the verification suites.
//
// Exit status: 0 all checks passed, 1 at least one check failed,
// 2 usage error, 3 I/O error.

#include "holonomy/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIO = 3;

}  // namespace

int main(int argc, char** argv)
{
    using namespace holonomy;

    CLI::App app{"holonomy: 2-dimensional parallel transport verification"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    SuiteOptions opt;
    std::string suite, format = "json", out;

    auto* check = app.add_subcommand("check", "Run a verification suite");
    check->add_option("suite", suite, "algebra | transport1 | transport2 | truncation | main-theorem | all")
        ->required();
    check->add_option("--fixture", opt.fixtures, "Built-in fixture name or JSON path (repeatable)");
    check->add_option("--ode-steps", opt.cfg.ode_steps, "RK4 steps per unit parameter")->capture_default_str();
    check->add_option("--simplex-order", opt.cfg.simplex_order, "Gauss points per panel and axis")
        ->capture_default_str();
    check->add_option("--series-max", opt.cfg.series_max, "Largest m + n in the iterated-integral series")
        ->capture_default_str();
    check->add_option("--term-tol", opt.cfg.term_tol, "Series layer cutoff")->capture_default_str();
    check->add_option("--fd-step", opt.cfg.fd_step, "Finite-difference step")->capture_default_str();
    check->add_option("--panel-width", opt.cfg.panel_width, "Widest quadrature panel")->capture_default_str();
    check->add_option("--format", format, "Report format")
        ->check(CLI::IsMember({"json", "text"}))
        ->capture_default_str();
    check->add_option("--out", out, "Report path (default stdout)");
    check->add_option("--seed", opt.seed, "Random seed")->capture_default_str();
    check->add_flag("--timings", opt.timings, "Include wall time per record");

    std::string fixture_name;
    auto* fixture = app.add_subcommand("fixture", "Print a built-in fixture document");
    fixture->add_option("name", fixture_name, "Fixture name")->required();

    auto* list = app.add_subcommand("list", "List suites and built-in fixtures");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (*list) {
        std::cout << "suites:";
        for (const auto& s : suite_names()) std::cout << ' ' << s;
        std::cout << "\nfixtures:";
        for (const auto& f : catalog::names()) std::cout << ' ' << f;
        std::cout << '\n';
        return 0;
    }

    if (*fixture) {
        try {
            std::cout << stable_dump(catalog::document(fixture_name));
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitUsage;
        }
        return 0;
    }

    Report rep;
    try {
        rep = run_suite(suite, opt);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    try {
        emit_report(rep, format, out);
    } catch (const ReportIOError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIO;
    }
    if (!rep.passed()) {
        std::cerr << rep.failures() << " of " << rep.records.size() << " checks failed\n";
        return kExitFail;
    }
    return 0;
}
