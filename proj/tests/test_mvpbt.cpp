#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "dta/bivariate.hpp"
#include "dta/mvpbt.hpp"
#include "helpers.hpp"

using namespace dta;

TEST_CASE("score statistic reproduces the reference values on lag.csv") {
    auto studies = load_lag();
    PBTestResult r = msset2(studies);  // default covariate: total SE
    CHECK(r.T == doctest::Approx(9.581602).epsilon(2e-4));
    CHECK(r.P == doctest::Approx(0.008305801).epsilon(1e-3));
    CHECK(r.b0.v1 == doctest::Approx(0.6527201).epsilon(1e-5));
    CHECK(r.b0.v2 == doctest::Approx(-1.4483726).epsilon(1e-5));
    CHECK(r.P == doctest::Approx(std::exp(-r.T / 2.0)).epsilon(1e-14));

    PBTestResult w = msset2(studies, SECovariate::within);
    CHECK(w.T == doctest::Approx(8.269754).epsilon(2e-4));
    CHECK(w.P == doctest::Approx(0.016004637).epsilon(1e-3));
}

TEST_CASE("statistic is invariant under study permutation and outcome mirroring") {
    auto studies = load_lag();
    auto fit = fit_reitsma(studies);
    PBTestResult base = msset2(studies);

    auto perm = studies;
    std::reverse(perm.begin(), perm.end());
    std::swap(perm[2], perm[9]);
    // at a fixed covariance the score computation is exactly order-free
    CHECK(msset2(perm, fit).T == doctest::Approx(base.T).epsilon(1e-9));
    // refitting on the permuted list only adds optimizer noise
    CHECK(msset2(perm).T == doctest::Approx(base.T).epsilon(1e-5));

    // mirroring both outcomes flips the mean but leaves the quadratic form unchanged
    auto mirror = studies;
    for (auto& s : mirror) {
        s.y.v1 = -s.y.v1;
        s.y.v2 = -s.y.v2;
    }
    CHECK(msset2(mirror).T == doctest::Approx(base.T).epsilon(1e-7));
}

TEST_CASE("explicit-fit overload matches the self-fitting one") {
    auto studies = load_lag();
    auto fit = fit_reitsma(studies);
    CHECK(msset2(studies, fit).T == doctest::Approx(msset2(studies).T).epsilon(1e-14));
}

TEST_CASE("small samples are rejected") {
    auto studies = load_lag();
    studies.resize(3);
    CHECK_THROWS_AS(msset2(studies), test_error);
}

TEST_CASE("bootstrap replicates are stream-deterministic") {
    auto studies = load_lag();
    auto fit = fit_reitsma(studies);
    RngStream r1(5, 3), r2(5, 3), r3(5, 4);
    double t1 = bootstrap_replicate(fit, studies, r1, SECovariate::total);
    double t2 = bootstrap_replicate(fit, studies, r2, SECovariate::total);
    double t3 = bootstrap_replicate(fit, studies, r3, SECovariate::total);
    CHECK(t1 == t2);
    CHECK(t1 != t3);
    CHECK(t1 >= 0.0);
}

TEST_CASE("bootstrap test: determinism across thread counts") {
    auto studies = load_lag();
    PBTestResult a = msset3(studies, 300, 11, SECovariate::total, 1);
    PBTestResult b = msset3(studies, 300, 11, SECovariate::total, 4);
    PBTestResult c = msset3(studies, 300, 11, SECovariate::total, 3);
    REQUIRE(a.boot_stats.size() == b.boot_stats.size());
    for (std::size_t i = 0; i < a.boot_stats.size(); ++i) {
        CHECK(a.boot_stats[i] == b.boot_stats[i]);
        CHECK(a.boot_stats[i] == c.boot_stats[i]);
    }
    CHECK(a.P == b.P);
    CHECK(a.T == doctest::Approx(9.581602).epsilon(2e-4));
    CHECK(a.P > 0.0);
    CHECK(a.P <= 1.0);
}

TEST_CASE("extending B with the same seed preserves the leading replicates") {
    auto studies = load_lag();
    PBTestResult a = msset3(studies, 150, 21, SECovariate::total, 2);
    PBTestResult b = msset3(studies, 300, 21, SECovariate::total, 4);
    REQUIRE(a.n_failed == 0);
    REQUIRE(b.n_failed == 0);
    for (std::size_t i = 0; i < a.boot_stats.size(); ++i)
        CHECK(a.boot_stats[i] == b.boot_stats[i]);
}

TEST_CASE("bootstrap p-value uses the add-one convention") {
    auto studies = load_lag();
    PBTestResult r = msset3(studies, 200, 2, SECovariate::total, 2);
    REQUIRE(r.n_failed == 0);
    long long exceed = 0;
    for (double t : r.boot_stats)
        if (t >= r.T) ++exceed;
    CHECK(r.P == doctest::Approx(double(exceed + 1) / double(200 + 1)).epsilon(1e-14));
}

TEST_CASE("invalid arguments") {
    auto studies = load_lag();
    CHECK_THROWS_AS(msset3(studies, 0, 1, SECovariate::total, 1), std::invalid_argument);
    CHECK_THROWS_AS(parse_se_covariate("between"), input_error);
    CHECK(parse_se_covariate("within") == SECovariate::within);
    CHECK(se_covariate_name(SECovariate::total) == "total");
}
