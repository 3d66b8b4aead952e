#pragma once

#include <utility>
#include <vector>

#include "dta/bivariate.hpp"

namespace dta {

// Rutter-Gatsonis HSROC parameters, derived from a bivariate fit.
struct HSROCParams {
    double Lambda = 0.0;      // accuracy
    double Beta = 0.0;        // shape/asymmetry; exp(Beta) = sd2/sd1
    double Theta = 0.0;       // threshold
    double tau_theta2 = 0.0;  // threshold variance
    double tau_alpha2 = 0.0;  // accuracy variance
};

struct SROCCurve {
    std::vector<std::pair<double, double>> grid;  // (fpr, sens) plot series
    double auc = 0.0;
    double pauc = 0.0;                            // normalized partial AUC
    std::pair<double, double> fpr_range;          // observed FPR bounds (raw counts)
};

HSROCParams map_hsroc(const BivariateFit& fit);  // degenerate sd -> fit_error

// Inverse of map_hsroc; recovers (mu, Sigma).
void unmap_hsroc(const HSROCParams& p, Vec2& mu, Mat2& sigma);

// sens(fpr) = invlogit(Lambda e^{-Beta/2} + e^{-Beta} logit(fpr)), 0 < fpr < 1.
double sroc_sens(double fpr, const HSROCParams& p);

// Midpoint integration on a uniform grid of `grid` cells; midpoints avoid the
// logit singularities at 0 and 1. partial_auc is normalized by (hi - lo).
double auc(const HSROCParams& p, int grid = 5000);
double partial_auc(const HSROCParams& p, double fpr_lo, double fpr_hi, int grid = 5000);

// (min, max) of fp/(fp+tn) over the studies, from uncorrected counts.
std::pair<double, double> observed_fpr_range(const std::vector<StudyTable>& tables);

SROCCurve sroc_curve(const BivariateFit& fit, const std::vector<StudyTable>& tables,
                     int grid = 5000);

// Ellipses on (FPR, sensitivity) axes: the logit-scale ellipse at the chi^2_2
// quantile of `level`, mapped pointwise through invlogit. Confidence uses
// cov_mu, prediction uses cov_mu + Sigma.
std::vector<std::pair<double, double>> confidence_region(const BivariateFit& fit, double level,
                                                         int points = 256);
std::vector<std::pair<double, double>> prediction_region(const BivariateFit& fit, double level,
                                                         int points = 256);

} // namespace dta
