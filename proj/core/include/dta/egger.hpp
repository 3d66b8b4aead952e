#pragma once

#include <array>
#include <utility>
#include <vector>

#include "dta/errors.hpp"

namespace dta {

// Univariate random-effects fit; centers the funnel plot.
struct UniFit {
    double mu = 0.0;
    double tau2 = 0.0;
};

// Egger-type regression test: WLS of y on (1, se) with fixed weights 1/v and
// multiplicative dispersion phi.
struct EggerResult {
    double slope = 0.0;
    double limit_b = 0.0;  // intercept: predicted effect as se -> 0
    double t = 0.0;
    int df = 0;            // N - 2
    double p = 0.0;        // 2 * t_sf(|t|, df)
    double ci_lb = 0.0, ci_ub = 0.0;  // 95% CI of limit_b (t quantiles)
    double phi = 0.0;      // weighted RSS / (N - 2)
};

struct FunnelSeries {
    std::vector<std::pair<double, double>> points;  // (effect y_i, se_i)
    double center = 0.0;                            // vertical line at fit.mu
    // pseudo-confidence contour rows: (se, lower, upper) with bounds mu -+ z0.975*se
    std::vector<std::array<double, 3>> contour;
};

// REML over tau2 >= 0 by golden-section on [0, 10*var(y)], tolerance 1e-10.
UniFit uni_reml_fit(const std::vector<double>& y, const std::vector<double>& v);

EggerResult egger_test(const std::vector<double>& y, const std::vector<double>& v);

FunnelSeries funnel_series(const std::vector<double>& y, const std::vector<double>& v,
                           const UniFit& fit);

} // namespace dta
