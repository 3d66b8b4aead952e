#pragma once

#include <stdexcept>
#include <string>

namespace dta {

// Bad user-supplied data: malformed CSV, impossible counts, zero cells without correction.
class input_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Model estimation failed: singular weights, insufficient studies, non-convergence.
class fit_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A hypothesis test could not be formed: singular design, all bootstrap replicates failed.
class test_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// 2x2 inversion/Cholesky failure; carries the offending determinant.
class singular_matrix_error : public std::runtime_error {
public:
    explicit singular_matrix_error(double det)
        : std::runtime_error("singular 2x2 matrix, det = " + std::to_string(det)), det(det) {}
    double det;
};

} // namespace dta
