#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"
#include "dta/bivariate.hpp"
#include "helpers.hpp"
#include "nlohmann/json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    RunResult r;
    const std::string cmd = std::string(DTA_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int st = pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

fs::path work_dir() {
    static fs::path d = [] {
        fs::path p = fs::temp_directory_path() / ("dta_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return d;
}

json load_json(const fs::path& p) { return json::parse(slurp(p.string())); }

} // namespace

TEST_CASE("usage errors exit with code 2") {
    CHECK(run_cli("").code == 2);                            // missing subcommand
    CHECK(run_cli("frobnicate x.csv").code == 2);            // unknown subcommand
    CHECK(run_cli("fit").code == 2);                         // missing input
    CHECK(run_cli(std::string("fit ") + LAG_CSV_PATH + " --no-such-flag").code == 2);
    CHECK(run_cli(std::string("test ") + LAG_CSV_PATH + " --B 0").code == 2);
    CHECK(run_cli(std::string("fit ") + LAG_CSV_PATH + " --level 1.2").code == 2);
    CHECK(run_cli(std::string("fit ") + LAG_CSV_PATH + " --correction -1").code == 2);
    CHECK(run_cli("--help").code == 0);
}

TEST_CASE("missing input file exits with code 4") {
    CHECK(run_cli("report /nonexistent/missing.csv").code == 4);
}

TEST_CASE("malformed CSV exits with code 2") {
    fs::path bad = work_dir() / "bad.csv";
    std::ofstream(bad) << "study,TP,FN\nA,1,2\n";
    CHECK(run_cli("fit " + bad.string()).code == 2);
}

TEST_CASE("fit prints the summary block") {
    RunResult r = run_cli(std::string("fit ") + LAG_CSV_PATH);
    CHECK(r.code == 0);
    CHECK(r.out.find("logLik") != std::string::npos);
    CHECK(r.out.find("0.653") != std::string::npos);
    CHECK(r.out.find("-1.448") != std::string::npos);
}

TEST_CASE("report emits a parseable JSON document with the expected content") {
    fs::path out = work_dir() / "report.json";
    RunResult r = run_cli(std::string("report ") + LAG_CSV_PATH + " --B 100 --seed 3 -o " +
                          out.string());
    REQUIRE(r.code == 0);
    json doc = load_json(out);

    CHECK(doc["schema"] == 1);
    CHECK(doc["n_studies"] == 17);
    CHECK(doc["settings"]["B"] == 100);
    CHECK(doc["settings"]["seed"] == 3);
    CHECK(doc["settings"]["correction"] == 0.5);
    CHECK(doc["settings"]["se_covariate"] == "total");
    CHECK(std::string(doc["input_digest"]).rfind("fnv1a64:", 0) == 0);

    CHECK(doc["fit"]["mu"][0].get<double>() == doctest::Approx(0.6527201).epsilon(1e-6));
    CHECK(doc["fit"]["mu"][1].get<double>() == doctest::Approx(-1.4483726).epsilon(1e-6));
    CHECK(doc["fit"]["converged"] == true);
    CHECK(doc["sroc"]["auc"].get<double>() == doctest::Approx(0.7593).epsilon(2e-3));
    CHECK(doc["egger"]["logit_fpr"]["t"].get<double>() == doctest::Approx(-2.4233).epsilon(2e-3));
    CHECK(doc["msset2"]["T"].get<double>() == doctest::Approx(9.581602).epsilon(1e-4));
    CHECK(doc["msset3"]["B"] == 100);
    CHECK(doc["msset3"]["boot_stats"].size() == 100);
    CHECK(doc["warnings"].is_array());

    // numeric round trip: serialized values parse back to the library's doubles
    auto fit = dta::fit_reitsma(load_lag());
    CHECK(doc["fit"]["mu"][0].get<double>() == doctest::Approx(fit.mu.v1).epsilon(1e-15));
    CHECK(doc["fit"]["loglik"].get<double>() == doctest::Approx(fit.loglik).epsilon(1e-15));
}

TEST_CASE("single-subcommand JSON sections match the full report") {
    fs::path f1 = work_dir() / "fit.json";
    fs::path f2 = work_dir() / "full.json";
    fs::path f3 = work_dir() / "egger.json";
    REQUIRE(run_cli(std::string("fit ") + LAG_CSV_PATH + " -o " + f1.string()).code == 0);
    REQUIRE(run_cli(std::string("report ") + LAG_CSV_PATH + " --B 100 -o " + f2.string()).code ==
            0);
    REQUIRE(run_cli(std::string("egger ") + LAG_CSV_PATH + " -o " + f3.string()).code == 0);
    json a = load_json(f1), b = load_json(f2), c = load_json(f3);
    CHECK(a["fit"] == b["fit"]);
    CHECK(c["egger"] == b["egger"]);
    CHECK(a["input_digest"] == b["input_digest"]);
}

TEST_CASE("plot writes SVG figures and CSV series") {
    fs::path pre = work_dir() / "plots";
    RunResult r = run_cli(std::string("plot ") + LAG_CSV_PATH + " --plots-prefix " + pre.string());
    REQUIRE(r.code == 0);
    for (const char* suffix : {"_sroc.svg", "_funnel_logit_sens.svg", "_funnel_logit_fpr.svg"}) {
        fs::path f = pre;
        f += suffix;
        INFO(f.string());
        REQUIRE(fs::exists(f));
        std::string svg = slurp(f.string());
        CHECK(svg.rfind("<svg", 0) == 0);
        std::size_t count = 0, pos = 0;
        while ((pos = svg.find("<circle", pos)) != std::string::npos) {
            ++count;
            ++pos;
        }
        CHECK(count >= 17);  // one marker per study
    }
    std::string pts = slurp((pre.string() + "_sroc_points.csv"));
    CHECK(std::count(pts.begin(), pts.end(), '\n') == 18);  // header + 17 studies
    std::string curve = slurp((pre.string() + "_sroc_curve.csv"));
    CHECK(curve.rfind("fpr,sens", 0) == 0);
    // digest covers input bytes only, so plot runs do not disturb report determinism
    fs::path missing_pre = fs::path("/nonexistent-dir") / "x";
    CHECK(run_cli(std::string("plot ") + LAG_CSV_PATH + " --plots-prefix " +
                  missing_pre.string()).code == 4);
}

TEST_CASE("plot requires a prefix") {
    CHECK(run_cli(std::string("plot ") + LAG_CSV_PATH).code == 2);
}

TEST_CASE("column-map accepts renamed headers") {
    fs::path renamed = work_dir() / "renamed.csv";
    {
        std::string body = slurp(LAG_CSV_PATH);
        body.replace(0, body.find('\n'), "id,tpos,fneg,fpos,tneg");
        std::ofstream(renamed, std::ios::binary) << body;
    }
    CHECK(run_cli("fit " + renamed.string()).code == 2);
    RunResult r = run_cli("fit " + renamed.string() + " --column-map id,tpos,fneg,fpos,tneg");
    CHECK(r.code == 0);
    CHECK(r.out.find("0.653") != std::string::npos);
}
