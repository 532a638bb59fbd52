#include "wzsim/kernels.hpp"

#include <cmath>

// Scalar reference kernels. These are the semantics the SIMD variants are
// checked against.

namespace wzsim::kernels {
namespace {

void axpy_scalar(double* y, double a, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(double* out, double a, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i];
}

void hadamard_scalar(double* y, const double* f, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] *= f[i];
}

void add3_scalar(double* out, const double* a, const double* b, const double* c,
                 std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i] + c[i];
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double nrm2sq_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

double nrm2sq_diff_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

double max_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = std::fabs(a[i] - b[i]);
        if (d > m) m = d;
    }
    return m;
}

} // namespace

const Backend& scalar_backend() {
    static const Backend backend = {
        "scalar",        axpy_scalar,   scale_scalar,       hadamard_scalar,
        add3_scalar,     dot_scalar,    nrm2sq_scalar,      nrm2sq_diff_scalar,
        max_abs_diff_scalar,
    };
    return backend;
}

} // namespace wzsim::kernels
