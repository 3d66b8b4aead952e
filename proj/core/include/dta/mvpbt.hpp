#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dta/bivariate.hpp"

namespace dta {

// Which standard error enters the extended mean model as the small-study
// covariate s_ij: the within-study SE sqrt(S_i,jj) or the total SE
// sqrt(S_i,jj + Sigma_jj). The total form reproduces the reference results.
enum class SECovariate { within, total };

SECovariate parse_se_covariate(const std::string& name);  // "within" | "total"
std::string se_covariate_name(SECovariate c);

struct PBTestResult {
    double T = 0.0;                  // score statistic, >= 0
    double P = 1.0;                  // msset2: exp(-T/2); msset3: (r+1)/(B_eff+1)
    Vec2 b0;                         // null-model pooled means
    std::vector<double> boot_stats;  // msset3 only: successful replicate T*, length B - n_failed
    long long B = 0;
    std::uint64_t seed = 0;
    long long n_failed = 0;
};

// MSSET2: efficient score test of H0 "no small-study effect on either outcome"
// in the extended model E[y_ij] = b0j + aj s_ij. With weights (S_i+Sigma)^-1
// fixed at the REML plug-in, the statistic is the GLS Wald form on (a1, a2),
// computed via the Schur complement of the stacked 4-coefficient system:
//   U = sum D_i W_i (y_i - b0),  J = sum D_i W_i D_i - (sum D_i W_i)(sum W_i)^-1 (sum W_i D_i),
//   T = U' J^-1 U,  P = chisq_sf(T, 2),  with D_i = diag(s_i1, s_i2).
PBTestResult msset2(const std::vector<TransformedStudy>& studies,
                    SECovariate cov = SECovariate::total);

// Same, reusing an existing null fit (its Sigma supplies the weights; b0 is the
// GLS mean recomputed at that Sigma, identical to fit.mu for a converged fit).
PBTestResult msset2(const std::vector<TransformedStudy>& studies, const BivariateFit& fit,
                    SECovariate cov = SECovariate::total);

// One parametric-bootstrap replicate: draw y*_i ~ N2(mu-hat, S_i + Sigma-hat)
// with S_i fixed, re-run msset2 (including its REML refit), return its T.
// Throws on replicate-level fit/test failure; the caller counts failures.
double bootstrap_replicate(const BivariateFit& fit, const std::vector<TransformedStudy>& studies,
                           RngStream& rng, SECovariate cov = SECovariate::total);

// MSSET3: parametric bootstrap version. B replicates on per-replicate RNG
// streams (results bit-identical for a given seed regardless of thread count;
// threads = 0 picks hardware concurrency). P = (#{T* >= T} + 1)/(B_eff + 1).
PBTestResult msset3(const std::vector<TransformedStudy>& studies, long long B, std::uint64_t seed,
                    SECovariate cov = SECovariate::total, int threads = 0);

} // namespace dta
