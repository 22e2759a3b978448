// Acceptance run: the "all" suite at default configuration, summarised as one
// PASS/FAIL line per acceptance criterion 1-10.

#include "holonomy/harness.hpp"

#include <chrono>
#include <cstdio>
#include <map>
#include <set>

namespace {

struct Criterion {
    int id;
    const char* title;
    double budget_s;
    std::vector<std::string> fixtures;   // must each contribute a record
};

const std::vector<Criterion>& criteria()
{
    static const std::vector<Criterion> c{
        {1, "crossed-module axioms", 5, {"FIX-A", "FIX-B", "FIX-C", "FIX-D"}},
        {2, "group axioms of the star product", 5, {"FIX-A", "FIX-B", "FIX-C", "FIX-D"}},
        {3, "differentiation functor", 10, {"FIX-A", "FIX-B", "FIX-C", "FIX-D"}},
        {4, "1-transport series vs ODE", 10, {"FIX-B", "FIX-C"}},
        {5, "hol2 ODE vs integral", 30, {"FIX-A", "FIX-B", "FIX-C", "FIX-D"}},
        {6, "Z representation", 30, {"FIX-A", "FIX-B", "FIX-C", "FIX-D"}},
        {7, "2-representation axioms", 60, {"FIX-A", "FIX-C"}},
        {8, "structure equation n=2", 30, {"FIX-A", "FIX-B", "FIX-C", "FIX-D"}},
        {9, "well-behavedness", 10, {"FIX-A", "FIX-B", "FIX-C", "FIX-D"}},
        {10, "main theorem", 90, {"FIX-A", "FIX-C", "FIX-D"}},
    };
    return c;
}

}  // namespace

int main()
{
    using namespace holonomy;
    SuiteOptions opt;
    opt.timings = true;

    auto t0 = std::chrono::steady_clock::now();
    Report rep = run_suite("all", opt);
    double total_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::printf("holonomy acceptance  version %s  seed %llu\n", kToolVersion,
                static_cast<unsigned long long>(opt.seed));
    bool ok = true;
    for (const auto& c : criteria()) {
        int n = 0, failed = 0;
        double ms = 0.0, worst = 0.0;
        const CheckRecord* worst_rec = nullptr;
        std::set<std::string> seen;
        for (const auto& r : rep.records) {
            if (r.criterion != c.id) continue;
            ++n;
            ms += r.wall_ms;
            seen.insert(r.fixture);
            if (!r.pass) ++failed;
            // margin: residual / tol for "le", tol / residual for "ge"
            double m = r.relation == "ge" ? (r.residual > 0 ? r.tolerance / r.residual : INFINITY)
                                          : (r.tolerance > 0 ? r.residual / r.tolerance : (r.residual > 0 ? INFINITY : 0));
            if (!worst_rec || m > worst || std::isnan(r.residual)) {
                worst = std::isnan(r.residual) ? INFINITY : m;
                worst_rec = &r;
            }
        }
        std::string missing;
        for (const auto& f : c.fixtures)
            if (!seen.count(f)) missing += " " + f;
        bool in_budget = ms / 1000.0 < c.budget_s;
        bool pass = n > 0 && failed == 0 && missing.empty() && in_budget;
        ok = ok && pass;
        std::printf("%s  criterion %2d  %-34s %3d checks  %d failed  worst %-10s %.3g (%s)  %.2f s / %.0f s",
                    pass ? "PASS" : "FAIL", c.id, c.title, n, failed, worst_rec ? worst_rec->id.c_str() : "-",
                    worst_rec ? worst_rec->residual : 0.0, worst_rec ? worst_rec->fixture.c_str() : "-", ms / 1000.0,
                    c.budget_s);
        if (!missing.empty()) std::printf("  missing fixtures:%s", missing.c_str());
        std::printf("\n");
    }

    int sup = 0, sup_failed = 0;
    for (const auto& r : rep.records)
        if (r.criterion == 0) {
            ++sup;
            if (!r.pass) {
                ++sup_failed;
                std::printf("FAIL  supporting %s [%s/%s] residual %.3g tol %.3g %s\n", r.id.c_str(), r.fixture.c_str(),
                            r.subject.c_str(), r.residual, r.tolerance, r.note.c_str());
            }
        }
    std::printf("%s  supporting checks  %d checks  %d failed\n", sup_failed ? "FAIL" : "PASS", sup, sup_failed);
    ok = ok && sup_failed == 0 && total_s < 300.0;
    std::printf("%s  total  %zu checks  %.1f s / 300 s\n", ok ? "PASS" : "FAIL", rep.records.size(), total_s);
    return ok ? 0 : 1;
}
