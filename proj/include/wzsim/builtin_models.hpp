#pragma once

// Built-in model catalog:
//   heat        1-D stochastic quantization on (0, pi), Dirichlet sine modes,
//               generator Delta - mass^2, constant (additive) volatilities
//   cable       stochastic cable equation, generator (lambda^2 Delta - id)/tau,
//               constant volatilities
//   geometric   scalar oracle: A = 0, b = 0, sigma(x) = sigma x. Unbounded
//               sigma, so outside the regularity assumptions; used only as a
//               closed-form sanity oracle, never in rate-acceptance runs.
//   nemytskii   spectral heat with coordinatewise sigma(x)_k = c_k tanh(x_k),
//               a bounded C_b^2 multiplicative test case
//
// The HJMM model lives in hjmm.hpp.

#include <vector>

#include "wzsim/model.hpp"

namespace wzsim {

// Dirichlet spectrum -k^2, k = 1..dim, of the 1-D Laplacian on (0, pi).
std::vector<double> dirichlet_laplacian_spectrum(int dim);

struct AdditiveSpectralParams {
    int dim = 8;
    int channels = 1;
    double vol_scale = 0.3;
};

// sigma_{j,k} used by the additive catalog models: vol_scale / k^2, with
// alternating sign on even channels (all constant vectors lie in D(A)).
std::vector<std::vector<double>> additive_sigma_table(const AdditiveSpectralParams& p);

SPDEModel make_heat_model(const AdditiveSpectralParams& p, double mass);
SPDEModel make_cable_model(const AdditiveSpectralParams& p, double length_const,
                           double time_const);

SPDEModel make_geometric_model(double sigma);

struct NemytskiiParams {
    int dim = 16;
    int channels = 1;
    double vol_scale = 0.4; // c_k = vol_scale / k
};
SPDEModel make_nemytskii_heat_model(const NemytskiiParams& p);

// Negative-control fixture: nemytskii model whose declared Jacobian action is
// off by a factor of two. validate_model must fail on it.
SPDEModel make_broken_jacobian_model();

// Default initial state of the spectral models: x0_k = 1 / k^2.
HVector default_spectral_x0(const SpacePtr& space);

} // namespace wzsim
