#pragma once

// Time integrators on a shared Brownian lattice:
//
//   euler_maruyama     accelerated exponential Euler-Maruyama: coefficients
//                      frozen at the coarse cell's left state, the semigroup
//                      factor S_{t-s} kept exact inside the cell; stochastic
//                      convolutions are fine-lattice left-point sums.
//   exponential_euler  the variant with the semigroup factor frozen at the
//                      cell's left endpoint, S_{t - [s]^-}.
//   wong_zakai         deterministic mild integrator of the pathwise PDE
//                      driven by the polygonal derivative: per coarse cell a
//                      predictor/corrector exponential rule on
//                      xi' = A xi + b(xi) + sum_j sigma_j(xi) Bdot^j.
//                      The drift here is b, not b + rho/2.
//   reference_solution euler_maruyama at the finest lattice resolution.
//
// All schemes monitor on the fine lattice grid, so pathwise sup errors are
// comparable across coarse resolutions. Integrators are pure functions of
// (model, x0, lattice, config).

#include <vector>

#include "wzsim/model.hpp"
#include "wzsim/noise.hpp"

namespace wzsim {

enum class SchemeTag { EulerMaruyama, ExponentialEuler, WongZakai, Reference };

const char* scheme_tag_name(SchemeTag tag);

struct Trajectory {
    std::vector<double> times; // the fine monitoring grid, m_fine + 1 nodes
    std::vector<HVector> states;
    SchemeTag tag = SchemeTag::EulerMaruyama;
    int m = 0;
};

struct SchemeConfig {
    int m = 1;           // coarse step count; must divide the lattice's m_fine
    int inner_steps = 0; // WZ substeps per coarse cell; 0 = m_fine / m
    int monitoring = 0;  // monitoring resolution; 0 = m_fine (the only supported value)
};

Trajectory euler_maruyama(const SPDEModel& model, const HVector& x0,
                          const BrownianLattice& lat, const SchemeConfig& cfg);
Trajectory exponential_euler(const SPDEModel& model, const HVector& x0,
                             const BrownianLattice& lat, const SchemeConfig& cfg);
Trajectory wong_zakai(const SPDEModel& model, const HVector& x0,
                      const BrownianLattice& lat, const SchemeConfig& cfg);
Trajectory reference_solution(const SPDEModel& model, const HVector& x0,
                              const BrownianLattice& lat);

} // namespace wzsim
