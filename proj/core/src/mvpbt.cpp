#include "dta/mvpbt.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace dta {

SECovariate parse_se_covariate(const std::string& name) {
    if (name == "within") return SECovariate::within;
    if (name == "total") return SECovariate::total;
    throw input_error("unknown se covariate '" + name + "' (expected within|total)");
}

std::string se_covariate_name(SECovariate c) {
    return c == SECovariate::within ? "within" : "total";
}

PBTestResult msset2(const std::vector<TransformedStudy>& studies, const BivariateFit& fit,
                    SECovariate cov) {
    if (studies.size() < 4)
        throw test_error("msset2: need at least 4 studies (4 mean-model coefficients)");
    if (!fit.converged) throw fit_error("msset2: null model fit did not converge");

    const Mat2& sigma = fit.sigma;
    const Vec2 b0 = gls_profile(sigma, studies).first;  // == fit.mu for a self-consistent fit

    Mat2 q7{}, q6{}, q5{};
    Vec2 u{};
    for (const TransformedStudy& s : studies) {
        const Mat2 w = mat2_inv(s.S + sigma);
        const double s1 =
            std::sqrt(s.S.a11 + (cov == SECovariate::total ? sigma.a11 : 0.0));
        const double s2 =
            std::sqrt(s.S.a22 + (cov == SECovariate::total ? sigma.a22 : 0.0));
        const Mat2 d = Mat2::diag(s1, s2);
        u = u + d * (w * (s.y - b0));
        q7 = q7 + w;
        q6 = q6 + w * d;
        q5 = q5 + d * w * d;
    }

    // Schur complement of the slope block in the stacked 4-coefficient GLS system.
    const Mat2 j = q5 - q6.transpose() * mat2_inv(q7) * q6;
    if (!(mat2_det(j) > 1e-10 * std::max(j.a11 * j.a22, 1e-300)))
        throw test_error("msset2: singular design (constant SE covariate within an outcome)");

    PBTestResult res;
    res.b0 = b0;
    res.T = std::max(quadform(u, mat2_inv(j)), 0.0);
    res.P = chisq_sf(res.T, 2.0);
    return res;
}

PBTestResult msset2(const std::vector<TransformedStudy>& studies, SECovariate cov) {
    return msset2(studies, fit_reitsma(studies), cov);
}

double bootstrap_replicate(const BivariateFit& fit, const std::vector<TransformedStudy>& studies,
                           RngStream& rng, SECovariate cov) {
    std::vector<TransformedStudy> synth = studies;
    for (TransformedStudy& s : synth) s.y = mvn2_sample(fit.mu, s.S + fit.sigma, rng);
    return msset2(synth, fit_reitsma(synth), cov).T;
}

PBTestResult msset3(const std::vector<TransformedStudy>& studies, long long B, std::uint64_t seed,
                    SECovariate cov, int threads) {
    if (B < 1) throw std::invalid_argument("msset3: B must be >= 1");
    const BivariateFit fit = fit_reitsma(studies);
    const PBTestResult observed = msset2(studies, fit, cov);

    std::vector<double> stats(static_cast<std::size_t>(B), 0.0);
    std::vector<char> ok(static_cast<std::size_t>(B), 0);

    int nthreads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (nthreads < 1) nthreads = 1;
    if (static_cast<long long>(nthreads) > B) nthreads = static_cast<int>(B);

    // Replicate k always uses stream k+1, so results do not depend on the
    // thread partition.
    auto worker = [&](long long lo, long long hi) {
        for (long long k = lo; k < hi; ++k) {
            RngStream rng(seed, static_cast<std::uint64_t>(k) + 1);
            try {
                stats[k] = bootstrap_replicate(fit, studies, rng, cov);
                ok[k] = 1;
            } catch (const std::exception&) {
                ok[k] = 0;
            }
        }
    };

    if (nthreads <= 1) {
        worker(0, B);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (int t = 0; t < nthreads; ++t) {
            const long long lo = B * t / nthreads;
            const long long hi = B * (t + 1) / nthreads;
            pool.emplace_back(worker, lo, hi);
        }
        for (std::thread& t : pool) t.join();
    }

    PBTestResult res;
    res.T = observed.T;
    res.b0 = observed.b0;
    res.B = B;
    res.seed = seed;
    res.boot_stats.reserve(static_cast<std::size_t>(B));
    long long exceed = 0;
    for (long long k = 0; k < B; ++k) {
        if (!ok[k]) continue;
        res.boot_stats.push_back(stats[k]);
        if (stats[k] >= res.T) ++exceed;
    }
    res.n_failed = B - static_cast<long long>(res.boot_stats.size());
    if (res.boot_stats.empty()) throw test_error("msset3: all bootstrap replicates failed");
    res.P = double(exceed + 1) / double(res.boot_stats.size() + 1);
    return res;
}

} // namespace dta
