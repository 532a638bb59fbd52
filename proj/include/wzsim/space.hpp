#pragma once

// Finite-dimensional realizations of the state space: a spectral basis with
// per-mode eigenvalues, a weighted maturity grid for forward curves, or a
// product of such factors. Vectors are coefficient arrays over one declared
// space; all arithmetic requires identical descriptors.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace wzsim {

enum class SpaceKind { Spectral, WeightedGrid, Product };

struct SpaceDescriptor;
using SpacePtr = std::shared_ptr<const SpaceDescriptor>;

struct SpaceDescriptor {
    SpaceKind kind;
    int dim = 0;

    // Spectral: eigenvalue of the generator per basis mode.
    std::vector<double> eigenvalues;

    // Weighted grid: strictly increasing maturities x_i >= 0 and the weight
    // exponent beta of the |h'|^2 e^{beta x} norm.
    std::vector<double> grid;
    double beta = 0.0;

    // Product: factor blocks stored contiguously in declared order.
    std::vector<SpacePtr> factors;

    static SpacePtr spectral(std::vector<double> eigenvalues);
    static SpacePtr weighted_grid(std::vector<double> grid, double beta);
    static SpacePtr product(std::vector<SpacePtr> factors);
};

bool same_space(const SpaceDescriptor& a, const SpaceDescriptor& b);

struct HVector {
    SpacePtr space;
    std::vector<double> coeffs;

    HVector() = default;
    HVector(SpacePtr s, std::vector<double> c);

    static HVector zero(SpacePtr s);

    int dim() const { return space ? space->dim : 0; }
    std::span<const double> span() const { return {coeffs.data(), coeffs.size()}; }
};

// Structural checks; throw StructuralError / ArgumentError.
void require_valid(const HVector& v);
void require_same_space(const HVector& a, const HVector& b);

HVector add(const HVector& a, const HVector& b);
HVector sub(const HVector& a, const HVector& b);
HVector scale(double a, const HVector& v);

// Norm of the declared space: Euclidean (spectral), discrete
// |h(0)|^2 + int |h'|^2 e^{beta x} dx quadrature (weighted grid), or the
// root-sum-square of factor norms (product).
double norm(const HVector& v);
double norm_span(const SpaceDescriptor& space, std::span<const double> coeffs);

// Weighted-grid helpers shared with the forward-curve module: second-order
// derivative estimate (3-point central interior, 3-point one-sided ends) and
// the discrete H_beta norm on an arbitrary grid (flat extrapolation beyond
// the last node contributes nothing).
void grid_derivative(std::span<const double> grid, std::span<const double> values,
                     std::span<double> out);
double hbeta_norm_on_grid(std::span<const double> grid, std::span<const double> values,
                          double beta);

} // namespace wzsim
