#pragma once

// SPDE model bundle: semigroup, drift b, volatilities sigma_j and their
// Jacobian actions. The drift slot holds the coefficient the Wong-Zakai PDE
// integrates; the Ito equation the stochastic schemes target carries
// drift_hat = b + rho/2 with rho the Stratonovich correction.
//
// Coefficient maps must be pure; models are immutable and shareable across
// workers.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wzsim/semigroup.hpp"
#include "wzsim/space.hpp"

namespace wzsim {

using CoefficientMap = std::function<HVector(const HVector&)>;
// (point, direction) -> directional derivative, linear in the direction
using JacobianAction = std::function<HVector(const HVector&, const HVector&)>;

// Declared coefficient bounds; documentation plus inputs to the sampled
// validation checks. declared = false disables the bound checks.
struct CoefficientBounds {
    bool declared = false;
    double sigma_bound = 0.0;   // sup over j, x of max(|sigma_j|, |D sigma_j|, |D^2 sigma_j|)
    double b_bound = 0.0;
    double b_lipschitz = 0.0;
};

struct SPDEModel {
    std::string name;
    SpacePtr space;
    Semigroup semigroup;
    int r = 0;
    CoefficientMap drift; // the Wong-Zakai side drift b
    std::vector<CoefficientMap> vols;
    std::vector<JacobianAction> vol_jacobians;
    CoefficientBounds bounds;
    // Draws a smooth probe vector for the sampled validation checks.
    std::function<HVector(std::uint64_t)> probe_sampler;

    HVector probe(std::uint64_t index) const;
};

// rho(x) = sum_j D sigma_j(x)[sigma_j(x)]
HVector stratonovich_correction(const SPDEModel& model, const HVector& x);

// b_hat(x) = b(x) + rho(x)/2
HVector drift_hat(const SPDEModel& model, const HVector& x);

struct ValidationProbe {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double limit = 0.0;
    std::string note;
};

struct ValidationReport {
    std::string model_name;
    std::vector<ValidationProbe> probes;
    bool pass() const;
};

// Sampled mechanization of the regularity assumptions: Jacobians against
// central finite differences, linearity of the Jacobian action, repeat-call
// determinism, declared-bound and Lipschitz-ratio checks. Never throws;
// failures are reported.
ValidationReport validate_model(const SPDEModel& model);

} // namespace wzsim
