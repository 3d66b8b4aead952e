#include "dta/egger.hpp"

#include <algorithm>
#include <cmath>

#include "dta/numerics.hpp"

namespace dta {

namespace {

// Univariate REML log-likelihood profiled over mu (constants dropped).
double uni_reml_ll(double tau2, const std::vector<double>& y, const std::vector<double>& v) {
    double sw = 0.0, swy = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double w = 1.0 / (v[i] + tau2);
        sw += w;
        swy += w * y[i];
    }
    const double mu = swy / sw;
    double ll = -std::log(sw);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double vi = v[i] + tau2;
        ll -= std::log(vi) + (y[i] - mu) * (y[i] - mu) / vi;
    }
    return 0.5 * ll;
}

} // namespace

UniFit uni_reml_fit(const std::vector<double>& y, const std::vector<double>& v) {
    const std::size_t n = y.size();
    if (n < 2 || v.size() != n) throw fit_error("uni_reml_fit: need at least 2 studies");
    for (double vi : v)
        if (!(vi > 0.0)) throw fit_error("uni_reml_fit: variances must be positive");

    double mean = 0.0;
    for (double yi : y) mean += yi / double(n);
    double var = 0.0;
    for (double yi : y) var += (yi - mean) * (yi - mean) / double(n - 1);

    double tau2 = 0.0;
    if (var > 0.0) {
        // golden-section maximization on [0, 10*var(y)]
        const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
        double a = 0.0, b = 10.0 * var;
        double c = b - gr * (b - a), d = a + gr * (b - a);
        double fc = uni_reml_ll(c, y, v), fd = uni_reml_ll(d, y, v);
        while (b - a > 1e-10) {
            if (fc > fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - gr * (b - a);
                fc = uni_reml_ll(c, y, v);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + gr * (b - a);
                fd = uni_reml_ll(d, y, v);
            }
        }
        tau2 = 0.5 * (a + b);
        if (uni_reml_ll(0.0, y, v) >= uni_reml_ll(tau2, y, v)) tau2 = 0.0;
    }

    double sw = 0.0, swy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = 1.0 / (v[i] + tau2);
        sw += w;
        swy += w * y[i];
    }
    return {swy / sw, tau2};
}

EggerResult egger_test(const std::vector<double>& y, const std::vector<double>& v) {
    const std::size_t n = y.size();
    if (n < 3 || v.size() != n) throw test_error("egger_test: need at least 3 studies");
    for (double vi : v)
        if (!(vi > 0.0)) throw test_error("egger_test: variances must be positive");

    // WLS of y on (1, se) with weights 1/v: normal equations via 2x2 algebra.
    Mat2 xtwx{};
    Vec2 xtwy{};
    for (std::size_t i = 0; i < n; ++i) {
        const double se = std::sqrt(v[i]);
        const double w = 1.0 / v[i];
        xtwx = xtwx + Mat2{w, w * se, w * se, w * se * se};
        xtwy = xtwy + Vec2{w * y[i], w * se * y[i]};
    }
    Mat2 inv;
    try {
        inv = mat2_inv(xtwx);
    } catch (const singular_matrix_error&) {
        throw test_error("egger_test: singular design (all standard errors equal)");
    }
    // Relative conditioning guard: equal SEs make the columns collinear.
    if (std::abs(mat2_det(xtwx)) <= 1e-10 * xtwx.a11 * xtwx.a22)
        throw test_error("egger_test: singular design (all standard errors equal)");

    const Vec2 beta = inv * xtwy;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double se = std::sqrt(v[i]);
        const double r = y[i] - beta.v1 - beta.v2 * se;
        rss += r * r / v[i];
    }

    EggerResult res;
    res.df = static_cast<int>(n) - 2;
    res.phi = rss / res.df;
    if (res.phi <= 1e-13) throw test_error("egger_test: zero dispersion (collinear data)");
    res.limit_b = beta.v1;
    res.slope = beta.v2;
    res.t = res.slope / std::sqrt(res.phi * inv.a22);
    res.p = 2.0 * t_sf(std::abs(res.t), res.df);
    const double tq = t_quantile(0.975, res.df);
    const double se_b = std::sqrt(res.phi * inv.a11);
    res.ci_lb = res.limit_b - tq * se_b;
    res.ci_ub = res.limit_b + tq * se_b;
    return res;
}

FunnelSeries funnel_series(const std::vector<double>& y, const std::vector<double>& v,
                           const UniFit& fit) {
    FunnelSeries f;
    f.center = fit.mu;
    double se_max = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double se = std::sqrt(v[i]);
        f.points.emplace_back(y[i], se);
        se_max = std::max(se_max, se);
    }
    const double z = norm_quantile(0.975);
    const int pts = 25;
    for (int k = 0; k <= pts; ++k) {
        const double se = se_max * 1.05 * k / pts;
        f.contour.push_back({se, fit.mu - z * se, fit.mu + z * se});
    }
    return f;
}

} // namespace dta
