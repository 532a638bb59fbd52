#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "wzsim/kernels.hpp"

using namespace wzsim;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

// sizes covering empty, sub-lane, lane-aligned and remainder cases
const std::vector<std::size_t> kSizes = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 33, 100, 1001};

bool close(double a, double b, double tol) {
    return std::fabs(a - b) <= tol * (1.0 + std::max(std::fabs(a), std::fabs(b)));
}

} // namespace

TEST_CASE("scalar and simd backends agree") {
    const auto& ref = kernels::scalar_backend();
#if defined(__x86_64__) || defined(_M_X64)
    if (!kernels::avx2_available()) return;
    const auto& simd = kernels::avx2_backend();
#else
    return;
#endif
    std::mt19937_64 rng(99);
    for (std::size_t n : kSizes) {
        auto x = random_vec(rng, n);
        auto y = random_vec(rng, n);
        auto z = random_vec(rng, n);
        const double a = 0.37;

        auto y1 = y, y2 = y;
        ref.axpy(y1.data(), a, x.data(), n);
        simd.axpy(y2.data(), a, x.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(close(y1[i], y2[i], 1e-15));

        std::vector<double> o1(n), o2(n);
        ref.scale(o1.data(), a, x.data(), n);
        simd.scale(o2.data(), a, x.data(), n);
        CHECK(o1 == o2);

        auto h1 = y, h2 = y;
        ref.hadamard(h1.data(), x.data(), n);
        simd.hadamard(h2.data(), x.data(), n);
        CHECK(h1 == h2);

        ref.add3(o1.data(), x.data(), y.data(), z.data(), n);
        simd.add3(o2.data(), x.data(), y.data(), z.data(), n);
        CHECK(o1 == o2);

        CHECK(close(ref.dot(x.data(), y.data(), n), simd.dot(x.data(), y.data(), n), 1e-13));
        CHECK(close(ref.nrm2sq(x.data(), n), simd.nrm2sq(x.data(), n), 1e-13));
        CHECK(close(ref.nrm2sq_diff(x.data(), y.data(), n),
                    simd.nrm2sq_diff(x.data(), y.data(), n), 1e-13));
        CHECK(ref.max_abs_diff(x.data(), y.data(), n) ==
              simd.max_abs_diff(x.data(), y.data(), n));
    }
}

TEST_CASE("kernel selection") {
    kernels::select("scalar");
    CHECK(std::string(kernels::active().name) == "scalar");
#if defined(__x86_64__) || defined(_M_X64)
    if (kernels::avx2_available()) {
        kernels::select("avx2");
        CHECK(std::string(kernels::active().name) == "avx2");
    }
#endif
    kernels::select("auto");
    CHECK_THROWS(kernels::select("neon512"));
}

TEST_CASE("scalar reference values") {
    const auto& k = kernels::scalar_backend();
    std::vector<double> y = {1.0, 2.0, 3.0};
    const std::vector<double> x = {1.0, -1.0, 0.5};
    k.axpy(y.data(), 2.0, x.data(), 3);
    CHECK(y == std::vector<double>{3.0, 0.0, 4.0});
    CHECK(k.dot(x.data(), x.data(), 3) == doctest::Approx(2.25));
    CHECK(k.max_abs_diff(y.data(), x.data(), 3) == doctest::Approx(3.5));
}
