#pragma once

// Evaluatable C0-semigroups and their generator actions.
//
// Realizations:
//   spectral-diagonal  S_t multiplies mode k by exp(lambda_k t); A is the
//                      diagonal eigenvalue scaling.
//   grid-shift         S_t h(x) = h(x + t) on a maturity grid, with linear
//                      interpolation between nodes and hold-last-value
//                      extrapolation beyond the last maturity; A is the
//                      first derivative on the grid.
//   product            blockwise action of component semigroups.

#include <optional>
#include <span>
#include <vector>

#include "wzsim/space.hpp"

namespace wzsim {

enum class SemigroupKind { SpectralDiagonal, GridShift, Product };

class Semigroup {
public:
    Semigroup() = default; // empty; assign from a factory before use

    static Semigroup spectral_diagonal(SpacePtr space);
    static Semigroup grid_shift(SpacePtr space);
    static Semigroup product(SpacePtr space, std::vector<Semigroup> components);

    SemigroupKind kind() const { return kind_; }
    const SpacePtr& space() const { return space_; }

    // S_t v. apply(0, v) == v exactly. t < 0 -> ArgumentError.
    HVector apply(double t, const HVector& v) const;
    void apply_span(double t, std::span<const double> in, std::span<double> out) const;

    // A v under the realization.
    HVector generator_apply(const HVector& v) const;
    void generator_span(std::span<const double> in, std::span<double> out) const;

    // Per-coordinate decay factors of S_dt when the whole semigroup is
    // diagonal (spectral or product-of-spectral); empty otherwise. Allows the
    // integrators to propagate states with one elementwise multiply.
    std::optional<std::vector<double>> step_factors(double dt) const;

    // phi_dt(z) = integral_0^dt S_u z du. Exact per mode for diagonal parts,
    // 4-point Gauss-Legendre for grid shifts.
    HVector phi(double dt, const HVector& z) const;
    void phi_span(double dt, std::span<const double> in, std::span<double> out) const;

private:
    SemigroupKind kind_ = SemigroupKind::SpectralDiagonal;
    SpacePtr space_;
    std::vector<Semigroup> components_;
};

// Spectral-diagonal semigroup with eigenvalues scale * base[k] + shift.
// Realizes perturbed generators B = A + R built from a base spectrum.
Semigroup build_perturbed_spectral(const std::vector<double>& base_eigenvalues,
                                   double scale, double shift);

// sqrt(norm(v)^2 + norm(A v)^2)
double graph_norm(const HVector& v, const Semigroup& s);

// Linear interpolation of grid values at target x (hold-last beyond the end).
double interp_on_grid(std::span<const double> grid, std::span<const double> values,
                      double x);

} // namespace wzsim
