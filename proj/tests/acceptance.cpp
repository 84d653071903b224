#include "bdlab/suites.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace bdlab;

namespace {

// wall-clock limits
constexpr double kAc1Seconds = 60;
constexpr double kAc4Seconds = 120;

struct Outcome {
    bool pass = true;
    std::string detail;
};

// every check whose claim starts with one of `prefixes` passes, and there are at least `min` of them
Outcome checks_with(const Report& r, const std::vector<std::string>& prefixes, std::size_t min)
{
    Outcome o;
    std::size_t n = 0, bad = 0;
    for (const auto& c : r.checks) {
        bool hit = prefixes.empty();
        for (const auto& p : prefixes)
            hit = hit || c.claim.rfind(p, 0) == 0;
        if (!hit)
            continue;
        ++n;
        if (!c.pass) {
            if (bad++ == 0)
                o.detail = "first failure: " + c.claim;
        }
    }
    o.pass = bad == 0 && n >= min;
    if (o.detail.empty())
        o.detail = std::to_string(n) + " checks";
    else
        o.detail += " (" + std::to_string(bad) + "/" + std::to_string(n) + " failed)";
    if (n < min)
        o.detail += ", expected ≥ " + std::to_string(min);
    return o;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int failures = 0;

void line(const std::string& ac, const Outcome& o)
{
    std::cout << ac << " " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
    failures += o.pass ? 0 : 1;
}

void guarded(const std::string& ac, const std::function<Outcome()>& f)
{
    try {
        line(ac, f());
    } catch (const std::exception& e) {
        line(ac, {false, std::string("exception: ") + e.what()});
    }
}

}

int main()
{
    RunConfig cfg;

    guarded("AC1", [&] {
        auto t0 = std::chrono::steady_clock::now();
        Report r = suite_analysis(cfg);
        double s = seconds_since(t0);
        Outcome o = checks_with(r, {}, 4);
        o.pass = o.pass && s < kAc1Seconds && r.extra["nodes"].get<long>() >= 50;
        o.detail += ", " + r.extra["nodes"].dump() + " nodes, " + std::to_string(s) + " s";
        return o;
    });

    guarded("AC2", [&] {
        Report r = suite_selfdet(cfg);
        Outcome o = checks_with(r, {}, 10);
        bool neg = checks_with(r, {"negative case yields a witness pair"}, 1).pass;
        o.pass = o.pass && neg;
        return o;
    });

    guarded("AC3", [&] { return checks_with(suite_quotient(cfg), {}, 20); });

    guarded("AC4", [&] {
        auto t0 = std::chrono::steady_clock::now();
        Report r = suite_mt(cfg);
        double s = seconds_since(t0);
        Outcome o = checks_with(r, {"mt_norm + tail", "admissible functional ≥"}, 64);
        o.pass = o.pass && s < kAc4Seconds;
        o.detail += ", " + std::to_string(s) + " s";
        return o;
    });

    guarded("AC5", [&] {
        Report r = suite_depseq(cfg);
        Outcome o = checks_with(r, {"e*_γ(x) = θ", "plain sum", "blow-up age", "e*_γ(Σ(−1)^k x_k)",
                                       "ratio"},
            4 + 10 + 3);
        o.pass = o.pass && cfg.length >= 4;
        return o;
    });

    guarded("AC6", [&] { return checks_with(suite_c0sm(cfg), {"unbounded weights"}, 3); });

    guarded("AC7", [&] {
        Report r = suite_l1(cfg);
        return checks_with(r, {"e*_γ(Σλx) = (1/m_1)Σ|λ|"}, 10);
    });

    guarded("AC8", [&] { return checks_with(suite_extension(cfg), {"micro row"}, 4); });

    guarded("AC9", [&] {
        namespace fs = std::filesystem;
        fs::path dir = fs::temp_directory_path() / "bdlab_ac9";
        fs::create_directories(dir);
        std::string a = (dir / "a.json").string(), b = (dir / "b.json").string();
        fs::remove(a);
        fs::remove(b);
        std::string cli = BDLAB_CLI;
        std::string base = "\"" + cli + "\" verify all --seed 7 --out ";
        int ra = std::system((base + "\"" + a + "\" 2>/dev/null").c_str());
        int rb = std::system((base + "\"" + b + "\" 2>/dev/null").c_str());
        std::string ta = slurp(a), tb = slurp(b);
        Outcome o;
        o.pass = ra == 0 && rb == 0 && !ta.empty() && ta == tb;
        o.detail = std::to_string(ta.size()) + " bytes, exit codes " + std::to_string(ra) + "/" +
            std::to_string(rb);
        return o;
    });

    return failures == 0 ? 0 : 1;
}
