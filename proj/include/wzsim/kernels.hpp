#pragma once

// Vector arithmetic kernels used by the integrator inner loops.
//
// Every kernel has a scalar reference implementation and, on x86-64 with
// AVX2+FMA, a SIMD variant. The backend is chosen once at runtime; the
// WZSIM_KERNELS environment variable ("scalar", "avx2", "auto") overrides
// autodetection. SIMD variants may differ from the scalar reference in the
// last few ulps (FMA contraction, vectorized reduction order); the
// equivalence test suite pins the tolerance.

#include <cstddef>
#include <string>

namespace wzsim::kernels {

struct Backend {
    const char* name;

    // y[i] += a * x[i]
    void (*axpy)(double* y, double a, const double* x, std::size_t n);
    // out[i] = a * x[i]
    void (*scale)(double* out, double a, const double* x, std::size_t n);
    // y[i] *= f[i]
    void (*hadamard)(double* y, const double* f, std::size_t n);
    // out[i] = a[i] + b[i] + c[i]
    void (*add3)(double* out, const double* a, const double* b, const double* c,
                 std::size_t n);
    // sum of x[i] * y[i]
    double (*dot)(const double* x, const double* y, std::size_t n);
    // sum of x[i]^2
    double (*nrm2sq)(const double* x, std::size_t n);
    // sum of (a[i] - b[i])^2
    double (*nrm2sq_diff)(const double* a, const double* b, std::size_t n);
    // max over i of |a[i] - b[i]|
    double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
};

const Backend& scalar_backend();
#if defined(__x86_64__) || defined(_M_X64)
const Backend& avx2_backend();
bool avx2_available();
#endif

// Active backend (selected on first use; see WZSIM_KERNELS).
const Backend& active();

// Force a backend by name ("scalar", "avx2", "auto"). Throws ArgumentError on
// unknown names or unavailable backends. Not thread-safe against concurrent
// kernel use; intended for tests and start-up configuration.
void select(const std::string& name);

} // namespace wzsim::kernels
