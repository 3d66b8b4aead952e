#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "dta/bivariate.hpp"
#include "dta/sroc.hpp"
#include "helpers.hpp"

using namespace dta;

static BivariateFit lag_fit() { return fit_reitsma(load_lag()); }

TEST_CASE("HSROC mapping round-trips the bivariate parameters") {
    auto fit = lag_fit();
    HSROCParams p = map_hsroc(fit);
    Vec2 mu;
    Mat2 sigma;
    unmap_hsroc(p, mu, sigma);
    CHECK(mu.v1 == doctest::Approx(fit.mu.v1).epsilon(1e-10));
    CHECK(mu.v2 == doctest::Approx(fit.mu.v2).epsilon(1e-10));
    CHECK(sigma.a11 == doctest::Approx(fit.sigma.a11).epsilon(1e-10));
    CHECK(sigma.a12 == doctest::Approx(fit.sigma.a12).epsilon(1e-8));
    CHECK(sigma.a22 == doctest::Approx(fit.sigma.a22).epsilon(1e-10));
    // shape parameter from the variance ratio
    CHECK(p.Beta == doctest::Approx(std::log(fit.sd.v2 / fit.sd.v1)).epsilon(1e-10));
}

TEST_CASE("SROC curve passes through the summary point") {
    auto fit = lag_fit();
    HSROCParams p = map_hsroc(fit);
    double sp = sroc_sens(invlogit(fit.mu.v2), p);
    CHECK(sp == doctest::Approx(invlogit(fit.mu.v1)).epsilon(1e-12));
}

TEST_CASE("symmetric curve: equal variances give Beta 0 and a symmetric SROC") {
    BivariateFit f{};
    f.mu = {1.0, -1.0};
    f.sigma = {0.25, 0.05, 0.05, 0.25};
    f.sd = {0.5, 0.5};
    f.converged = true;
    HSROCParams p = map_hsroc(f);
    CHECK(p.Beta == doctest::Approx(0.0));
    // symmetry: sens(fpr) and fpr(sens) mirror across the anti-diagonal
    double s = sroc_sens(0.3, p);
    CHECK(sroc_sens(1.0 - s, p) == doctest::Approx(1.0 - 0.3).epsilon(1e-10));
}

TEST_CASE("AUC of the chance diagonal is one half") {
    HSROCParams p{};
    p.Lambda = 0.0;
    p.Beta = 0.0;
    p.Theta = 0.0;
    p.tau_alpha2 = p.tau_theta2 = 0.0;
    // Lambda = 0, Beta = 0 means sens(fpr) = fpr
    CHECK(sroc_sens(0.37, p) == doctest::Approx(0.37).epsilon(1e-12));
    CHECK(auc(p) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(partial_auc(p, 0.2, 0.6) == doctest::Approx(0.4).epsilon(1e-9));  // mean of fpr on range
}

TEST_CASE("lag.csv summary curve areas match the reference values") {
    auto tables = lag_tables();
    auto fit = lag_fit();
    SROCCurve c = sroc_curve(fit, tables, 5000);
    CHECK(c.auc == doctest::Approx(0.7593).epsilon(2e-3));
    CHECK(c.pauc == doctest::Approx(0.6755).epsilon(2e-3));
    CHECK(c.fpr_range.first == doctest::Approx(1.0 / 82.0).epsilon(1e-12));
    CHECK(c.fpr_range.second == doctest::Approx(8.0 / 15.0).epsilon(1e-12));
    REQUIRE(c.grid.size() > 100);
    for (std::size_t i = 1; i < c.grid.size(); ++i) {
        CHECK(c.grid[i].first > c.grid[i - 1].first);           // fpr strictly increasing
        CHECK(c.grid[i].second >= c.grid[i - 1].second - 1e-12);  // sens monotone for this fit
    }
}

TEST_CASE("observed FPR range uses raw counts") {
    auto r = observed_fpr_range(lag_tables());
    CHECK(r.first == doctest::Approx(1.0 / 82.0).epsilon(1e-14));   // Kindermann1970: 1/(1+81)
    CHECK(r.second == doctest::Approx(8.0 / 15.0).epsilon(1e-14));  // Brown1979: 8/(8+7)
}

TEST_CASE("AUC converges in the grid parameter") {
    auto fit = lag_fit();
    HSROCParams p = map_hsroc(fit);
    double a1 = auc(p, 2000), a2 = auc(p, 5000), a3 = auc(p, 20000);
    CHECK(std::abs(a1 - a3) < 5e-4);
    CHECK(std::abs(a2 - a3) < 2e-4);
}

TEST_CASE("confidence and prediction ellipses lie on the correct contours") {
    auto fit = lag_fit();
    const double level = 0.95;
    const double r2 = -2.0 * std::log(1.0 - level);  // chi-square(2) quantile
    auto check_contour = [&](const std::vector<std::pair<double, double>>& pts, const Mat2& cov) {
        Mat2 w = mat2_inv(cov);
        for (const auto& [fpr, sens] : pts) {
            Vec2 d{logit(sens) - fit.mu.v1, logit(fpr) - fit.mu.v2};
            CHECK(quadform(d, w) == doctest::Approx(r2).epsilon(1e-8));
        }
    };
    auto conf = confidence_region(fit, level);
    auto pred = prediction_region(fit, level);
    REQUIRE(conf.size() >= 128);
    REQUIRE(pred.size() == conf.size());
    check_contour(conf, fit.cov_mu);
    Mat2 total = fit.cov_mu + fit.sigma;
    check_contour(pred, total);
}

TEST_CASE("degenerate fit is rejected by the mapping") {
    BivariateFit f{};
    f.mu = {0.5, -0.5};
    f.sigma = {0, 0, 0, 0.2};
    f.sd = {0.0, std::sqrt(0.2)};
    f.converged = true;
    f.boundary = true;
    CHECK_THROWS_AS(map_hsroc(f), fit_error);
}
