#include "dta/sroc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dta {

HSROCParams map_hsroc(const BivariateFit& fit) {
    const double sd1 = fit.sd.v1, sd2 = fit.sd.v2;
    if (sd1 <= 0.0 || sd2 <= 0.0)
        throw fit_error("map_hsroc: zero between-study SD (boundary fit); no SROC mapping");
    HSROCParams p;
    p.Beta = std::log(sd2 / sd1);
    const double e = std::exp(0.5 * p.Beta);  // sqrt(sd2/sd1)
    p.Lambda = fit.mu.v1 * e - fit.mu.v2 / e;
    p.Theta = 0.5 * (fit.mu.v1 * e + fit.mu.v2 / e);
    p.tau_alpha2 = 2.0 * (sd1 * sd2 - fit.sigma.a12);
    p.tau_theta2 = 0.5 * (sd1 * sd2 + fit.sigma.a12);
    return p;
}

void unmap_hsroc(const HSROCParams& p, Vec2& mu, Mat2& sigma) {
    const double b = std::exp(p.Beta);  // sd2/sd1
    const double prod = p.tau_theta2 + 0.25 * p.tau_alpha2;  // sd1*sd2
    const double sd1 = std::sqrt(prod / b);
    const double sd2 = b * sd1;
    const double s12 = prod - 0.5 * p.tau_alpha2;
    const double e = std::exp(0.5 * p.Beta);
    mu.v1 = (p.Theta + 0.5 * p.Lambda) / e;
    mu.v2 = (p.Theta - 0.5 * p.Lambda) * e;
    sigma = {sd1 * sd1, s12, s12, sd2 * sd2};
}

double sroc_sens(double fpr, const HSROCParams& p) {
    return invlogit(p.Lambda * std::exp(-0.5 * p.Beta) + std::exp(-p.Beta) * logit(fpr));
}

double auc(const HSROCParams& p, int grid) { return partial_auc(p, 0.0, 1.0, grid); }

double partial_auc(const HSROCParams& p, double fpr_lo, double fpr_hi, int grid) {
    if (!(fpr_lo >= 0.0 && fpr_lo < fpr_hi && fpr_hi <= 1.0))
        throw std::domain_error("partial_auc: need 0 <= lo < hi <= 1");
    if (grid < 2) throw std::domain_error("partial_auc: grid too small");
    const double h = (fpr_hi - fpr_lo) / grid;
    double sum = 0.0;
    for (int k = 0; k < grid; ++k) sum += sroc_sens(fpr_lo + (k + 0.5) * h, p);
    return sum / grid;  // normalized by the range width
}

std::pair<double, double> observed_fpr_range(const std::vector<StudyTable>& tables) {
    if (tables.empty()) throw input_error("observed_fpr_range: no studies");
    double lo = 1.0, hi = 0.0;
    for (const StudyTable& t : tables) {
        const double fpr = double(t.fp) / double(t.fp + t.tn);
        lo = std::min(lo, fpr);
        hi = std::max(hi, fpr);
    }
    return {lo, hi};
}

SROCCurve sroc_curve(const BivariateFit& fit, const std::vector<StudyTable>& tables, int grid) {
    const HSROCParams p = map_hsroc(fit);
    SROCCurve c;
    c.fpr_range = observed_fpr_range(tables);
    c.auc = auc(p, grid);
    c.pauc = partial_auc(p, c.fpr_range.first, c.fpr_range.second, grid);
    const int pts = 512;
    c.grid.reserve(pts);
    for (int k = 0; k < pts; ++k) {
        const double fpr = (k + 0.5) / pts;
        c.grid.emplace_back(fpr, sroc_sens(fpr, p));
    }
    return c;
}

namespace {

std::vector<std::pair<double, double>> ellipse(Vec2 mu, const Mat2& m, double level, int points) {
    if (!(level > 0.0 && level < 1.0)) throw std::domain_error("region level must lie in (0,1)");
    const double r = std::sqrt(-2.0 * std::log1p(-level));  // chi^2_2 quantile is -2 ln(1-level)
    const Mat2 L = mat2_chol(m);
    std::vector<std::pair<double, double>> out;
    out.reserve(points);
    for (int k = 0; k < points; ++k) {
        const double a = 2.0 * std::numbers::pi * k / points;
        const Vec2 z{r * std::cos(a), r * std::sin(a)};
        const Vec2 c = mu + Vec2{L.a11 * z.v1, L.a21 * z.v1 + L.a22 * z.v2};
        out.emplace_back(invlogit(c.v2), invlogit(c.v1));  // (FPR, sens) axes
    }
    return out;
}

} // namespace

std::vector<std::pair<double, double>> confidence_region(const BivariateFit& fit, double level,
                                                         int points) {
    return ellipse(fit.mu, fit.cov_mu, level, points);
}

std::vector<std::pair<double, double>> prediction_region(const BivariateFit& fit, double level,
                                                         int points) {
    return ellipse(fit.mu, fit.cov_mu + fit.sigma, level, points);
}

} // namespace dta
