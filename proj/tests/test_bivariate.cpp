#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "dta/bivariate.hpp"
#include "helpers.hpp"

using namespace dta;

TEST_CASE("gls_profile with zero heterogeneity equals inverse-variance means") {
    auto studies = load_lag();
    Mat2 zero{0, 0, 0, 0};
    auto [mu, cov] = gls_profile(zero, studies);
    // S_i are diagonal, so the two outcomes decouple into scalar weighted means
    double sw1 = 0, swy1 = 0, sw2 = 0, swy2 = 0;
    for (const auto& s : studies) {
        sw1 += 1.0 / s.S.a11;
        swy1 += s.y.v1 / s.S.a11;
        sw2 += 1.0 / s.S.a22;
        swy2 += s.y.v2 / s.S.a22;
    }
    CHECK(mu.v1 == doctest::Approx(swy1 / sw1).epsilon(1e-12));
    CHECK(mu.v2 == doctest::Approx(swy2 / sw2).epsilon(1e-12));
    CHECK(cov.a11 == doctest::Approx(1.0 / sw1).epsilon(1e-12));
    CHECK(cov.a22 == doctest::Approx(1.0 / sw2).epsilon(1e-12));
    CHECK(std::abs(cov.a12) < 1e-15);
}

TEST_CASE("REML fit reproduces the reference estimates on lag.csv") {
    auto fit = fit_reitsma(load_lag());
    CHECK(fit.converged);
    CHECK_FALSE(fit.boundary);
    CHECK(fit.n == 17);
    CHECK(fit.mu.v1 == doctest::Approx(0.65272008).epsilon(1e-6));
    CHECK(fit.mu.v2 == doctest::Approx(-1.44837265).epsilon(1e-6));
    CHECK(std::sqrt(fit.cov_mu.a11) == doctest::Approx(0.14690653).epsilon(1e-6));
    CHECK(std::sqrt(fit.cov_mu.a22) == doctest::Approx(0.20836810).epsilon(1e-6));
    CHECK(fit.sd.v1 == doctest::Approx(0.31985872).epsilon(1e-5));
    CHECK(fit.sd.v2 == doctest::Approx(0.72405205).epsilon(1e-5));
    CHECK(fit.rho == doctest::Approx(-0.2185).epsilon(5e-3));
    CHECK(fit.loglik == doctest::Approx(22.453).epsilon(1e-4));
    CHECK(fit.aic == doctest::Approx(-34.906).epsilon(1e-4));
    CHECK(fit.bic == doctest::Approx(-27.274).epsilon(1e-4));
    // consistency of the information-criterion conventions
    CHECK(fit.aic == doctest::Approx(-2 * fit.loglik + 10.0));
    CHECK(fit.bic == doctest::Approx(-2 * fit.loglik + 5.0 * std::log(2.0 * 17)));
}

TEST_CASE("reml_loglik is maximal at the fitted covariance") {
    auto studies = load_lag();
    auto fit = fit_reitsma(studies);
    double at_opt = reml_loglik(fit.sigma, studies);
    CHECK(at_opt == doctest::Approx(fit.loglik).epsilon(1e-10));
    for (double d : {-0.03, 0.03}) {
        Mat2 s = fit.sigma;
        s.a11 = std::max(1e-6, s.a11 + d);
        CHECK(reml_loglik(s, studies) < at_opt);
        Mat2 s2 = fit.sigma;
        s2.a12 += d;
        s2.a21 += d;
        CHECK(reml_loglik(s2, studies) < at_opt);
    }
}

TEST_CASE("fit is invariant under study order") {
    auto studies = load_lag();
    auto rev = studies;
    std::reverse(rev.begin(), rev.end());
    auto f1 = fit_reitsma(studies);
    auto f2 = fit_reitsma(rev);
    CHECK(f1.mu.v1 == doctest::Approx(f2.mu.v1).epsilon(1e-9));
    CHECK(f1.mu.v2 == doctest::Approx(f2.mu.v2).epsilon(1e-9));
    CHECK(f1.sigma.a12 == doctest::Approx(f2.sigma.a12).epsilon(1e-7));
    CHECK(f1.loglik == doctest::Approx(f2.loglik).epsilon(1e-10));
}

TEST_CASE("summarize back-transforms and covers the reference intervals") {
    auto fit = fit_reitsma(load_lag());
    FitSummary s = summarize(fit);
    CHECK(s.sens.back == doctest::Approx(0.658).epsilon(2e-3));
    CHECK(s.sens.back_lb == doctest::Approx(0.590).epsilon(2e-3));
    CHECK(s.sens.back_ub == doctest::Approx(0.719).epsilon(2e-3));
    CHECK(s.fpr.back == doctest::Approx(0.190).epsilon(3e-3));
    CHECK(s.fpr.back_lb == doctest::Approx(0.135).epsilon(3e-3));
    CHECK(s.fpr.back_ub == doctest::Approx(0.261).epsilon(3e-3));
    CHECK(s.sens.z == doctest::Approx(4.44309781).epsilon(1e-5));
    CHECK(s.fpr.z == doctest::Approx(-6.95102866).epsilon(1e-5));
    CHECK(s.sens.p == doctest::Approx(2 * 0.5 * std::erfc(s.sens.z / std::sqrt(2.0))).epsilon(1e-9));

    // a synthetic fit with unit covariance: interval is mu +- 1.96 on the logit scale
    BivariateFit unit{};
    unit.mu = {0.0, 0.0};
    unit.cov_mu = Mat2::identity();
    unit.sigma = {0, 0, 0, 0};
    unit.sd = {0, 0};
    unit.converged = true;
    FitSummary u = summarize(unit, 0.95);
    CHECK(u.sens.back == doctest::Approx(0.5));
    CHECK(u.sens.back_lb == doctest::Approx(invlogit(-1.9599639845400545)).epsilon(1e-10));
    CHECK(u.sens.back_ub == doctest::Approx(invlogit(1.9599639845400545)).epsilon(1e-10));
}

TEST_CASE("format_summary mentions the key quantities") {
    auto fit = fit_reitsma(load_lag());
    std::string txt = format_summary(fit, summarize(fit));
    CHECK(txt.find("logLik") != std::string::npos);
    CHECK(txt.find("sensitivity") != std::string::npos);
    CHECK(txt.find("0.653") != std::string::npos);
    CHECK(txt.find("-1.448") != std::string::npos);
}

TEST_CASE("degenerate inputs raise fit_error") {
    std::vector<TransformedStudy> one = {{"A", {0.1, -0.2}, {0.2, 0, 0, 0.3}, {0, 0}}};
    CHECK_THROWS_AS(fit_reitsma(one), fit_error);
}
