#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dta/errors.hpp"

namespace dta {

struct Vec2 {
    double v1 = 0.0;
    double v2 = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.v1 + b.v1, a.v2 + b.v2}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.v1 - b.v1, a.v2 - b.v2}; }
inline Vec2 operator*(double c, Vec2 a) { return {c * a.v1, c * a.v2}; }
inline double dot(Vec2 a, Vec2 b) { return a.v1 * b.v1 + a.v2 * b.v2; }

// Plain 2x2 matrix; used for within-study covariances S_i, between-study Sigma,
// and all the small GLS/score algebra built from them.
struct Mat2 {
    double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 diag(double d1, double d2) { return {d1, 0.0, 0.0, d2}; }

    Mat2 transpose() const { return {a11, a21, a12, a22}; }
};

inline Mat2 operator+(const Mat2& a, const Mat2& b) {
    return {a.a11 + b.a11, a.a12 + b.a12, a.a21 + b.a21, a.a22 + b.a22};
}
inline Mat2 operator-(const Mat2& a, const Mat2& b) {
    return {a.a11 - b.a11, a.a12 - b.a12, a.a21 - b.a21, a.a22 - b.a22};
}
inline Mat2 operator*(double c, const Mat2& a) {
    return {c * a.a11, c * a.a12, c * a.a21, c * a.a22};
}
inline Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
            a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
}
inline Vec2 operator*(const Mat2& m, Vec2 v) {
    return {m.a11 * v.v1 + m.a12 * v.v2, m.a21 * v.v1 + m.a22 * v.v2};
}

double mat2_det(const Mat2& m);
Mat2 mat2_inv(const Mat2& m);   // throws singular_matrix_error when |det| <= 1e-14
Mat2 mat2_chol(const Mat2& m);  // lower-triangular L with L*L^T = m; PSD input (semidefinite ok)

inline double quadform(Vec2 v, const Mat2& m) { return dot(v, m * v); }

double logit(double p);     // domain error unless 0 < p < 1
double invlogit(double x);

double norm_cdf(double x);
double norm_sf(double x);
double norm_quantile(double p);        // Wichura's AS241, |err| < 1e-15
double t_sf(double x, double df);      // P(T_df > x), df >= 1
double t_quantile(double p, double df);
double chisq_sf(double x, double df);  // P(X^2_df > x); df == 2 is exp(-x/2) exactly

struct NelderMeadResult {
    std::vector<double> x;
    double fval = 0.0;
    bool converged = false;
    int iterations = 0;
};

// Derivative-free minimization with one automatic restart from the incumbent.
// Converged when both the simplex diameter and the f-spread fall below tol;
// max_iter caps each of the two passes. f(x0) must be finite.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, double tol = 1e-10, int max_iter = 5000);

// Philox4x32-10 block function (counter-based, splittable).
void philox4x32_10(const std::uint32_t ctr[4], const std::uint32_t key[2], std::uint32_t out[4]);

// Reproducible stream: (master seed, stream index) fully determine the sequence,
// and distinct stream indices give independent sequences regardless of the order
// streams are consumed in. This is what makes parallel bootstrap runs bit-stable.
class RngStream {
public:
    static constexpr const char* algorithm = "philox4x32-10";

    RngStream(std::uint64_t master_seed, std::uint64_t stream_index);

    std::uint64_t next_u64();
    double next_double();  // uniform on (0,1), 52-bit resolution, never 0 or 1
    double next_normal();  // standard normal via inverse CDF

    std::uint64_t master_seed() const { return seed_; }
    std::uint64_t stream_index() const { return stream_; }

private:
    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
    std::uint64_t block_ = 0;
    std::uint64_t buf_[2] = {0, 0};
    int avail_ = 0;
};

// One draw from N2(mu, cov). cov = 0 returns mu exactly; non-PSD cov throws.
Vec2 mvn2_sample(Vec2 mu, const Mat2& cov, RngStream& rng);

} // namespace dta
