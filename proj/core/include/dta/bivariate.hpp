#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dta/ingest.hpp"
#include "dta/numerics.hpp"

namespace dta {

// Bivariate random-effects fit: y_i ~ N2(mu, S_i + Sigma), Sigma estimated by REML.
struct BivariateFit {
    Vec2 mu;            // pooled (logit sensitivity, logit FPR)
    Mat2 cov_mu;        // covariance of mu-hat
    Mat2 sigma;         // between-study covariance Sigma
    Vec2 sd;            // sqrt of Sigma diagonals
    double rho = 0.0;   // between-study correlation
    double loglik = 0.0;
    double aic = 0.0;   // -2*loglik + 2*5 (2 means + 3 covariance components)
    double bic = 0.0;   // -2*loglik + 5*ln(2N)
    int n = 0;
    bool converged = false;
    bool boundary = false;  // some Sigma diagonal hit ~0 and was reported as 0
};

// GLS mean and its covariance at fixed Sigma: weights W_i = (S_i + Sigma)^-1,
// mu = (sum W_i)^-1 sum W_i y_i, cov_mu = (sum W_i)^-1.
std::pair<Vec2, Mat2> gls_profile(const Mat2& sigma, const std::vector<TransformedStudy>& studies);

// Restricted log-likelihood profiled over the means, reported in the convention
// that includes the logit-transform Jacobian of the corrected proportions (a
// data-dependent constant in Sigma, so the optimum is unchanged):
//   -1/2 [ (2N-2) ln 2pi + sum ln det V_i + ln det(sum V_i^-1) + sum r_i' V_i^-1 r_i ]
//   + sum_i [ -ln(p_i (1-p_i)) - ln(q_i (1-q_i)) ]
// with V_i = S_i + Sigma, r_i = y_i - mu(Sigma), p_i/q_i the back-transformed y_i.
double reml_loglik(const Mat2& sigma, const std::vector<TransformedStudy>& studies);

// Maximize reml_loglik over Sigma in log-Cholesky coordinates (ln L11, L21, ln L22),
// starting from DerSimonian-Laird per-outcome moment estimates (floored at 1e-4).
BivariateFit fit_reitsma(const std::vector<TransformedStudy>& studies);

struct SummaryLine {
    double estimate = 0.0;  // logit scale
    double se = 0.0;
    double z = 0.0;
    double p = 0.0;
    double ci_lb = 0.0, ci_ub = 0.0;        // logit scale
    double back = 0.0;                      // invlogit(estimate)
    double back_lb = 0.0, back_ub = 0.0;    // invlogit CI
};

struct FitSummary {
    SummaryLine sens;  // sensitivity row
    SummaryLine fpr;   // false positive rate row
    double level = 0.95;
};

FitSummary summarize(const BivariateFit& fit, double level = 0.95);
std::string format_summary(const BivariateFit& fit, const FitSummary& s);

} // namespace dta
