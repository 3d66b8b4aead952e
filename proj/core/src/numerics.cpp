#include "dta/numerics.hpp"

#include <math.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace dta {

double mat2_det(const Mat2& m) { return m.a11 * m.a22 - m.a12 * m.a21; }

Mat2 mat2_inv(const Mat2& m) {
    const double d = mat2_det(m);
    if (std::abs(d) <= 1e-14) throw singular_matrix_error(d);
    const double id = 1.0 / d;
    return {id * m.a22, -id * m.a12, -id * m.a21, id * m.a11};
}

Mat2 mat2_chol(const Mat2& m) {
    if (m.a11 < -1e-12 || m.a22 < -1e-12 || mat2_det(m) < -1e-12)
        throw std::domain_error("mat2_chol: matrix is not positive semidefinite");
    const double l11 = std::sqrt(std::max(m.a11, 0.0));
    const double l21 = l11 > 0.0 ? m.a21 / l11 : 0.0;
    const double l22 = std::sqrt(std::max(m.a22 - l21 * l21, 0.0));
    return {l11, 0.0, l21, l22};
}

double logit(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("logit: argument must lie in (0,1)");
    return std::log(p / (1.0 - p));
}

double invlogit(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
double norm_sf(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// Wichura (1988), algorithm AS241, PPND16.
double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("norm_quantile: argument must lie in (0,1)");
    const double q = p - 0.5;
    double r;
    if (std::abs(q) <= 0.425) {
        r = 0.180625 - q * q;
        const double num =
            q * (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                      6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                    1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                  1.3314166789178437745e2) * r + 3.3871328727963666080e0);
        const double den =
            (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                  3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
              4.2313330701600911252e1) * r + 1.0);
        return num / den;
    }
    r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        const double num =
            (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0);
        const double den =
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
        x = num / den;
    } else {
        r -= 5.0;
        const double num =
            (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0);
        const double den =
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
        x = num / den;
    }
    return q < 0.0 ? -x : x;
}

namespace {

double lgamma_ts(double x) {
    int sign = 0;
    return ::lgamma_r(x, &sign);  // thread-safe variant; args here are always positive
}

// Regularized incomplete beta I_x(a,b), Lentz continued fraction.
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 500;
    constexpr double kEps = 3e-16;
    constexpr double kFpMin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

double betai(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double bt =
        std::exp(lgamma_ts(a + b) - lgamma_ts(a) - lgamma_ts(b) + a * std::log(x) +
                 b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

// Regularized lower incomplete gamma P(a,x): series for x < a+1, else 1 - CF.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 3e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - lgamma_ts(a));
}

double gamma_q_cf(double a, double x) {
    constexpr double kFpMin = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / kFpMin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = b + an / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 3e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - lgamma_ts(a));
}

} // namespace

double t_sf(double x, double df) {
    if (!(df >= 1.0)) throw std::domain_error("t_sf: df must be >= 1");
    if (x < 0.0) return 1.0 - t_sf(-x, df);
    if (x == 0.0) return 0.5;
    return 0.5 * betai(0.5 * df, 0.5, df / (df + x * x));
}

double t_quantile(double p, double df) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("t_quantile: p must lie in (0,1)");
    if (!(df >= 1.0)) throw std::domain_error("t_quantile: df must be >= 1");
    if (p == 0.5) return 0.0;
    if (p < 0.5) return -t_quantile(1.0 - p, df);
    const double target = 1.0 - p;  // t_sf(x) = target, x > 0
    double lo = 0.0, hi = 1.0;
    while (t_sf(hi, df) > target) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (t_sf(mid, df) > target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double chisq_sf(double x, double df) {
    if (!(df >= 1.0)) throw std::domain_error("chisq_sf: df must be >= 1");
    if (x < 0.0) throw std::domain_error("chisq_sf: x must be >= 0");
    if (df == 2.0) return std::exp(-0.5 * x);  // exact; msset2 relies on this identity
    if (x == 0.0) return 1.0;
    const double a = 0.5 * df, xx = 0.5 * x;
    if (xx < a + 1.0) return 1.0 - gamma_p_series(a, xx);
    return gamma_q_cf(a, xx);
}

namespace {

struct SimplexPoint {
    std::vector<double> x;
    double f;
};

double safe_eval(const std::function<double(const std::vector<double>&)>& f,
                 const std::vector<double>& x) {
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
}

NelderMeadResult nm_pass(const std::function<double(const std::vector<double>&)>& f,
                         const std::vector<double>& x0, double tol, int max_iter) {
    const std::size_t n = x0.size();
    std::vector<SimplexPoint> s(n + 1);
    s[0] = {x0, safe_eval(f, x0)};
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> xi = x0;
        xi[i] += 0.1 * std::max(std::abs(x0[i]), 0.1);
        s[i + 1] = {std::move(xi), 0.0};
        s[i + 1].f = safe_eval(f, s[i + 1].x);
    }

    NelderMeadResult res;
    auto by_f = [](const SimplexPoint& a, const SimplexPoint& b) { return a.f < b.f; };
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        std::sort(s.begin(), s.end(), by_f);

        double diam = 0.0;
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                diam = std::max(diam, std::abs(s[i].x[j] - s[0].x[j]));
        if (diam < tol && s[n].f - s[0].f < tol) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += s[i].x[j] / double(n);

        auto affine = [&](double t) {  // centroid + t*(centroid - worst)
            std::vector<double> x(n);
            for (std::size_t j = 0; j < n; ++j) x[j] = centroid[j] + t * (centroid[j] - s[n].x[j]);
            return x;
        };

        std::vector<double> xr = affine(1.0);
        const double fr = safe_eval(f, xr);
        if (fr < s[0].f) {
            std::vector<double> xe = affine(2.0);
            const double fe = safe_eval(f, xe);
            if (fe < fr)
                s[n] = {std::move(xe), fe};
            else
                s[n] = {std::move(xr), fr};
        } else if (fr < s[n - 1].f) {
            s[n] = {std::move(xr), fr};
        } else {
            const bool outside = fr < s[n].f;
            std::vector<double> xc = affine(outside ? 0.5 : -0.5);
            const double fc = safe_eval(f, xc);
            if (fc < (outside ? fr : s[n].f)) {
                s[n] = {std::move(xc), fc};
            } else {
                for (std::size_t i = 1; i <= n; ++i) {  // shrink toward the best point
                    for (std::size_t j = 0; j < n; ++j)
                        s[i].x[j] = s[0].x[j] + 0.5 * (s[i].x[j] - s[0].x[j]);
                    s[i].f = safe_eval(f, s[i].x);
                }
            }
        }
    }
    std::sort(s.begin(), s.end(), by_f);
    res.x = s[0].x;
    res.fval = s[0].f;
    res.iterations = iter;
    return res;
}

} // namespace

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, double tol, int max_iter) {
    if (x0.empty()) throw std::domain_error("nelder_mead: empty start point");
    if (std::isnan(f(x0))) throw std::domain_error("nelder_mead: objective is NaN at x0");
    NelderMeadResult first = nm_pass(f, x0, tol, max_iter);
    NelderMeadResult second = nm_pass(f, first.x, tol, max_iter);  // restart from incumbent
    NelderMeadResult& best = second.fval <= first.fval ? second : first;
    best.iterations = first.iterations + second.iterations;
    best.converged = second.converged;
    return best;
}

namespace {

inline std::uint32_t mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    return static_cast<std::uint32_t>(p);
}

inline void philox_round(std::uint32_t c[4], const std::uint32_t k[2]) {
    std::uint32_t hi0, hi1;
    const std::uint32_t lo0 = mulhilo(0xD2511F53u, c[0], hi0);
    const std::uint32_t lo1 = mulhilo(0xCD9E8D57u, c[2], hi1);
    const std::uint32_t n0 = hi1 ^ c[1] ^ k[0];
    const std::uint32_t n2 = hi0 ^ c[3] ^ k[1];
    c[0] = n0;
    c[1] = lo1;
    c[2] = n2;
    c[3] = lo0;
}

} // namespace

void philox4x32_10(const std::uint32_t ctr[4], const std::uint32_t key[2], std::uint32_t out[4]) {
    std::uint32_t c[4] = {ctr[0], ctr[1], ctr[2], ctr[3]};
    std::uint32_t k[2] = {key[0], key[1]};
    for (int r = 0; r < 9; ++r) {
        philox_round(c, k);
        k[0] += 0x9E3779B9u;  // golden-ratio Weyl increments
        k[1] += 0xBB67AE85u;
    }
    philox_round(c, k);
    out[0] = c[0];
    out[1] = c[1];
    out[2] = c[2];
    out[3] = c[3];
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
    : seed_(master_seed), stream_(stream_index) {}

std::uint64_t RngStream::next_u64() {
    if (avail_ == 0) {
        const std::uint32_t ctr[4] = {
            static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
            static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
        const std::uint32_t key[2] = {static_cast<std::uint32_t>(seed_),
                                      static_cast<std::uint32_t>(seed_ >> 32)};
        std::uint32_t out[4];
        philox4x32_10(ctr, key, out);
        buf_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
        buf_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
        ++block_;
        avail_ = 2;
    }
    return buf_[2 - avail_--];
}

double RngStream::next_double() {
    return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1p-52;
}

double RngStream::next_normal() { return norm_quantile(next_double()); }

Vec2 mvn2_sample(Vec2 mu, const Mat2& cov, RngStream& rng) {
    const Mat2 L = mat2_chol(cov);  // throws on non-PSD input
    const double z1 = rng.next_normal();
    const double z2 = rng.next_normal();
    return {mu.v1 + L.a11 * z1, mu.v2 + L.a21 * z1 + L.a22 * z2};
}

} // namespace dta
