#pragma once

// Hand-coded Wong-Zakai stepper for the forward-rate model, written directly
// from the per-cell integral equations for the pair (curve, variance factor):
//
//   rho_m(t, x)  = rho_m(k d, x + t - k d)
//                + int_k^t [ alpha - beta_corr + sum_j Bdot_j gamma_j ](..., x + t - s) ds
//   zeta_m(t)    = zeta_m(k d)
//                + int_k^t [ mu - 1/2 sum_j lambda_j lambda_j' + sum_j Bdot_j lambda_j ] ds
//
// It shares no scheme, semigroup or curve-operator code with the library;
// interpolation, quadrature and the volatility family are re-implemented here
// so the generic integrator can be cross-checked against an independent
// transcription using the same discretization parameters (exponential
// trapezoidal substeps, 4-point Gauss-Legendre shift quadrature, two or more
// corrector sweeps at tolerance 1e-10).

#include <cmath>
#include <vector>

#include "wzsim/hjmm.hpp"
#include "wzsim/noise.hpp"

namespace hand {

struct State {
    std::vector<double> curve;
    double v = 0.0;
};

namespace detail {

inline double interp(const std::vector<double>& grid, const std::vector<double>& vals,
                     double x) {
    if (x >= grid.back()) return vals.back();
    if (x <= grid.front()) return vals.front();
    std::size_t lo = 0, hi = grid.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        (grid[mid] <= x ? lo : hi) = mid;
    }
    const double w = (x - grid[lo]) / (grid[lo + 1] - grid[lo]);
    return vals[lo] + w * (vals[lo + 1] - vals[lo]);
}

inline double lam_tilde(double v) { return 1.0 + 0.5 * std::tanh(v); }
inline double lam_tilde_d(double v) {
    const double t = std::tanh(v);
    return 0.5 * (1.0 - t * t);
}

struct Coeffs {
    std::vector<double> curve_rhs; // alpha - beta + sum Bdot gamma, on the grid
    double scalar_rhs = 0.0;       // mu - 1/2 sum lambda lambda' + sum Bdot lambda
};

inline Coeffs rhs(const wzsim::hjmm::HJMMParams& p, const std::vector<double>& grid,
                  const State& s, const std::vector<double>& bdot) {
    const std::size_t n = grid.size();
    const std::size_t r = p.a.size();
    Coeffs out;
    out.curve_rhs.assign(n, 0.0);

    const double lt = lam_tilde(s.v);
    const double ltd = lam_tilde_d(s.v);
    for (std::size_t j = 0; j < r; ++j) {
        const double lam_j = p.nu[j] / (1.0 + s.v * s.v);
        const double lam_j_d = -2.0 * s.v * p.nu[j] / ((1.0 + s.v * s.v) * (1.0 + s.v * s.v));

        // gamma_j and its running integral by trapezoid
        std::vector<double> g(n), ig(n);
        for (std::size_t i = 0; i < n; ++i) g[i] = lt * p.c[j] * std::exp(-p.a[j] * grid[i]);
        ig[0] = 0.0;
        for (std::size_t i = 1; i < n; ++i)
            ig[i] = ig[i - 1] + 0.5 * (g[i] + g[i - 1]) * (grid[i] - grid[i - 1]);

        for (std::size_t i = 0; i < n; ++i) {
            const double beta_corr = 0.5 * ltd * p.c[j] * std::exp(-p.a[j] * grid[i]) * lam_j;
            out.curve_rhs[i] += g[i] * ig[i] - beta_corr + bdot[j] * g[i];
        }
        out.scalar_rhs += -0.5 * lam_j * lam_j_d + bdot[j] * lam_j;
    }
    out.scalar_rhs += p.kappa * (p.theta - std::tanh(s.v));
    return out;
}

// shifted curve plus the Gauss-Legendre shift convolution of the right side
inline State advance(const wzsim::hjmm::HJMMParams& p, const std::vector<double>& grid,
                     const State& s, const std::vector<double>& bdot, double h) {
    static const double node[4] = {0.06943184420297371, 0.33000947820757187,
                                   0.66999052179242813, 0.93056815579702629};
    static const double weight[4] = {0.17392742256872693, 0.32607257743127307,
                                     0.32607257743127307, 0.17392742256872693};
    const std::size_t n = grid.size();

    auto shifted_base = [&](std::vector<double>& out) {
        out.resize(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = interp(grid, s.curve, grid[i] + h);
    };
    auto conv = [&](const std::vector<double>& z, std::vector<double>& out) {
        out.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int g = 0; g < 4; ++g) acc += weight[g] * interp(grid, z, grid[i] + node[g] * h);
            out[i] = h * acc;
        }
    };

    std::vector<double> base;
    shifted_base(base);

    const Coeffs f0 = rhs(p, grid, s, bdot);
    std::vector<double> phi_f0;
    conv(f0.curve_rhs, phi_f0);

    State cur;
    cur.curve.resize(n);
    for (std::size_t i = 0; i < n; ++i) cur.curve[i] = base[i] + phi_f0[i];
    cur.v = s.v + h * f0.scalar_rhs;

    for (int sweep = 1; sweep <= 8; ++sweep) {
        const Coeffs fc = rhs(p, grid, cur, bdot);
        std::vector<double> favg(n), phi;
        for (std::size_t i = 0; i < n; ++i) favg[i] = 0.5 * (f0.curve_rhs[i] + fc.curve_rhs[i]);
        conv(favg, phi);
        State next;
        next.curve.resize(n);
        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            next.curve[i] = base[i] + phi[i];
            delta = std::max(delta, std::fabs(next.curve[i] - cur.curve[i]));
        }
        next.v = s.v + h * 0.5 * (f0.scalar_rhs + fc.scalar_rhs);
        delta = std::max(delta, std::fabs(next.v - cur.v));
        cur = next;
        if (sweep >= 2 && delta <= 1e-10) break;
    }
    return cur;
}

} // namespace detail

// Runs the full Wong-Zakai recursion on the coarse lattice and returns the
// terminal state; monitoring matches the generic integrator's fine grid.
inline std::vector<State> run(const wzsim::hjmm::HJMMParams& p, const std::vector<double>& grid,
                              const State& initial, const wzsim::BrownianLattice& lat, int m) {
    const int m_fine = lat.m_fine();
    const int block = m_fine / m;
    const double dm = lat.horizon() / m;
    const double h = dm / block;
    const std::size_t r = p.a.size();

    std::vector<State> monitored;
    monitored.push_back(initial);
    State s = initial;
    for (int k = 0; k < m; ++k) {
        std::vector<double> bdot(r);
        for (std::size_t j = 0; j < r; ++j)
            bdot[j] = (lat.value_at_node(static_cast<int>(j) + 1, (k + 1) * block) -
                       lat.value_at_node(static_cast<int>(j) + 1, k * block)) /
                      dm;
        for (int i = 0; i < block; ++i) {
            s = detail::advance(p, grid, s, bdot, h);
            monitored.push_back(s);
        }
    }
    return monitored;
}

} // namespace hand
