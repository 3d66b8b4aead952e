#include "dta/bivariate.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace dta {

namespace {

// Sum of log absolute Jacobians of the logit transform at the corrected
// proportions: constant in Sigma, but part of the reported likelihood so that
// logLik/AIC/BIC refer to the proportion-scale data.
double logit_jacobian(const std::vector<TransformedStudy>& studies) {
    double jac = 0.0;
    for (const TransformedStudy& s : studies) {
        const double p = invlogit(s.y.v1);
        const double q = invlogit(s.y.v2);
        jac += -std::log(p * (1.0 - p)) - std::log(q * (1.0 - q));
    }
    return jac;
}

void check_psd(const Mat2& sigma) {
    if (sigma.a11 < 0.0 || sigma.a22 < 0.0 || mat2_det(sigma) < -1e-12)
        throw std::domain_error("sigma is not positive semidefinite");
}

Mat2 from_log_cholesky(const std::vector<double>& th) {
    const double l11 = std::exp(th[0]);
    const double l21 = th[1];
    const double l22 = std::exp(th[2]);
    return {l11 * l11, l11 * l21, l11 * l21, l21 * l21 + l22 * l22};
}

// DerSimonian-Laird moment estimate of the between-study variance, per outcome.
double dl_tau2(const std::vector<TransformedStudy>& studies, int outcome) {
    double sw = 0.0, swy = 0.0, sw2 = 0.0;
    for (const TransformedStudy& s : studies) {
        const double v = outcome == 0 ? s.S.a11 : s.S.a22;
        const double y = outcome == 0 ? s.y.v1 : s.y.v2;
        const double w = 1.0 / v;
        sw += w;
        swy += w * y;
        sw2 += w * w;
    }
    const double ybar = swy / sw;
    double q = 0.0;
    for (const TransformedStudy& s : studies) {
        const double v = outcome == 0 ? s.S.a11 : s.S.a22;
        const double y = outcome == 0 ? s.y.v1 : s.y.v2;
        q += (y - ybar) * (y - ybar) / v;
    }
    const double denom = sw - sw2 / sw;
    const double n1 = static_cast<double>(studies.size()) - 1.0;
    return denom > 0.0 ? std::max((q - n1) / denom, 0.0) : 0.0;
}

} // namespace

std::pair<Vec2, Mat2> gls_profile(const Mat2& sigma, const std::vector<TransformedStudy>& studies) {
    if (studies.empty()) throw fit_error("gls_profile: no studies");
    Mat2 A{};
    Vec2 b{};
    for (const TransformedStudy& s : studies) {
        Mat2 w;
        try {
            w = mat2_inv(s.S + sigma);
        } catch (const singular_matrix_error& e) {
            throw fit_error(std::string("gls_profile: singular V_i (") + e.what() + ")");
        }
        A = A + w;
        b = b + w * s.y;
    }
    Mat2 cov;
    try {
        cov = mat2_inv(A);
    } catch (const singular_matrix_error& e) {
        throw fit_error(std::string("gls_profile: singular weight sum (") + e.what() + ")");
    }
    return {cov * b, cov};
}

double reml_loglik(const Mat2& sigma, const std::vector<TransformedStudy>& studies) {
    check_psd(sigma);
    const std::size_t n = studies.size();
    if (n == 0) throw fit_error("reml_loglik: no studies");

    Mat2 A{};
    Vec2 b{};
    double sum_logdet = 0.0;
    std::vector<Mat2> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Mat2 v = studies[i].S + sigma;
        const double d = mat2_det(v);
        if (d <= 0.0) throw std::domain_error("reml_loglik: V_i not positive definite");
        sum_logdet += std::log(d);
        w[i] = mat2_inv(v);
        A = A + w[i];
        b = b + w[i] * studies[i].y;
    }
    const Mat2 cov = mat2_inv(A);
    const Vec2 mu = cov * b;

    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) rss += quadform(studies[i].y - mu, w[i]);

    const double two_pi = 2.0 * std::numbers::pi;
    const double value = -0.5 * ((2.0 * double(n) - 2.0) * std::log(two_pi) + sum_logdet +
                                 std::log(mat2_det(A)) + rss);
    return value + logit_jacobian(studies);
}

BivariateFit fit_reitsma(const std::vector<TransformedStudy>& studies) {
    const std::size_t n = studies.size();
    if (n < 2) throw fit_error("fit_reitsma: need at least 2 studies");

    const double t1 = std::max(dl_tau2(studies, 0), 1e-4);
    const double t2 = std::max(dl_tau2(studies, 1), 1e-4);
    const std::vector<double> start = {0.5 * std::log(t1), 0.0, 0.5 * std::log(t2)};

    auto objective = [&studies](const std::vector<double>& th) {
        return -reml_loglik(from_log_cholesky(th), studies);
    };
    const NelderMeadResult opt = nelder_mead(objective, start, 1e-10, 5000);

    BivariateFit fit;
    fit.n = static_cast<int>(n);
    fit.converged = opt.converged;
    fit.sigma = from_log_cholesky(opt.x);

    // Report near-zero variance components as exactly zero (with the implied
    // zero covariance) and flag the boundary.
    if (fit.sigma.a11 < 1e-8 || fit.sigma.a22 < 1e-8) {
        fit.boundary = true;
        if (fit.sigma.a11 < 1e-8) fit.sigma = {0.0, 0.0, 0.0, fit.sigma.a22};
        if (fit.sigma.a22 < 1e-8) fit.sigma = {fit.sigma.a11, 0.0, 0.0, 0.0};
    }

    auto [mu, cov_mu] = gls_profile(fit.sigma, studies);
    fit.mu = mu;
    fit.cov_mu = cov_mu;
    fit.sd = {std::sqrt(fit.sigma.a11), std::sqrt(fit.sigma.a22)};
    fit.rho = (fit.sd.v1 > 0.0 && fit.sd.v2 > 0.0) ? fit.sigma.a12 / (fit.sd.v1 * fit.sd.v2) : 0.0;
    fit.loglik = reml_loglik(fit.sigma, studies);
    fit.aic = -2.0 * fit.loglik + 2.0 * 5.0;
    fit.bic = -2.0 * fit.loglik + 5.0 * std::log(2.0 * double(n));
    return fit;
}

FitSummary summarize(const BivariateFit& fit, double level) {
    if (!(level > 0.0 && level < 1.0)) throw std::domain_error("summarize: level must lie in (0,1)");
    const double zq = norm_quantile(1.0 - 0.5 * (1.0 - level));
    auto line = [&](double est, double var) {
        SummaryLine l;
        l.estimate = est;
        l.se = std::sqrt(var);
        l.z = est / l.se;
        l.p = 2.0 * norm_sf(std::abs(l.z));
        l.ci_lb = est - zq * l.se;
        l.ci_ub = est + zq * l.se;
        l.back = invlogit(est);
        l.back_lb = invlogit(l.ci_lb);
        l.back_ub = invlogit(l.ci_ub);
        return l;
    };
    FitSummary s;
    s.level = level;
    s.sens = line(fit.mu.v1, fit.cov_mu.a11);
    s.fpr = line(fit.mu.v2, fit.cov_mu.a22);
    return s;
}

std::string format_summary(const BivariateFit& fit, const FitSummary& s) {
    char buf[256];
    std::string out;
    out += "Bivariate diagnostic random-effects meta-analysis (REML)\n";
    std::snprintf(buf, sizeof buf, "Studies: %d%s\n", fit.n,
                  fit.converged ? "" : "   [WARNING: optimizer did not converge]");
    out += buf;
    const int pct = static_cast<int>(std::lround(s.level * 100));
    std::snprintf(buf, sizeof buf, "%-16s %9s %9s %9s %9s %9s %9s\n", "", "estimate", "se", "z",
                  "p", (std::to_string(pct) + "%lo").c_str(), (std::to_string(pct) + "%hi").c_str());
    out += buf;
    auto row = [&](const char* name, const SummaryLine& l) {
        std::snprintf(buf, sizeof buf, "%-16s %9.3f %9.3f %9.3f %9.4g %9.3f %9.3f\n", name,
                      l.estimate, l.se, l.z, l.p, l.ci_lb, l.ci_ub);
        out += buf;
    };
    row("logit(sens)", s.sens);
    row("logit(fpr)", s.fpr);
    auto back = [&](const char* name, const SummaryLine& l) {
        std::snprintf(buf, sizeof buf, "%-16s %9.3f %27s %9.3f %9.3f\n", name, l.back, "", l.back_lb,
                      l.back_ub);
        out += buf;
    };
    back("sensitivity", s.sens);
    back("false pos. rate", s.fpr);
    std::snprintf(buf, sizeof buf,
                  "Between-study SD: %.3f (sens), %.3f (fpr); correlation: %.3f%s\n", fit.sd.v1,
                  fit.sd.v2, fit.rho, fit.boundary ? "   [boundary]" : "");
    out += buf;
    std::snprintf(buf, sizeof buf, "logLik: %.3f   AIC: %.3f   BIC: %.3f\n", fit.loglik, fit.aic,
                  fit.bic);
    out += buf;
    return out;
}

} // namespace dta
