#pragma once

// Musiela-parametrized HJM forward-rate model with stochastic volatility.
//
// State: (r(t), v(t)) on the product of a weighted forward-curve space and
// the real line. The curve moves under the right-shift semigroup; the
// no-arbitrage drift is alpha(h,v) = sum_j gamma_j(h,v) * I gamma_j(h,v)
// with I the cumulative integral operator. Volatility family:
//
//   gamma_j(h,v)(x) = ltilde(v) c_j exp(-a_j x),  ltilde(v) = 1 + tanh(v)/2
//   lambda_j(v)     = nu_j / (1 + v^2)
//   mu(v)           = kappa (theta - tanh(v))
//
// which is bounded with two bounded derivatives and decays into the smaller
// weighted space provided a_j > beta'/2.
//
// The model's drift slot carries the Wong-Zakai-side coefficient
// (alpha - beta_corr, mu - 1/2 sum lambda_j lambda_j'), so the Ito drift
// b + rho/2 recovered by the schemes is exactly (alpha, mu).

#include <iosfwd>
#include <vector>

#include "wzsim/model.hpp"

namespace wzsim::hjmm {

struct ForwardCurve {
    std::vector<double> maturities; // x_0 = 0 < x_1 < ... (years)
    std::vector<double> values;     // h(x_i)
    double beta = 0.5;
};

struct HJMMParams {
    double beta = 0.5;
    double beta_prime = 1.0;         // > beta
    std::vector<double> a = {1.0, 1.5};   // decay rates, a_j > beta_prime / 2
    std::vector<double> c = {0.01, 0.02}; // curve vol scales
    std::vector<double> nu = {0.3, 0.2};  // vol-of-vol scales
    double kappa = 0.5;
    double theta = 0.0;
    std::vector<double> grid; // empty = default_grid()
};

// Default maturity grid: 1/24 steps to 2y, 1/12 to 5y, 1/4 to 10y, 1/2 to 30y.
std::vector<double> default_grid();

// Discrete H_beta norm sqrt(|h(0)|^2 + int |h'|^2 e^{beta x} dx).
double hbeta_norm(const ForwardCurve& curve);

// Cumulative integral (I h)(x_i) = int_0^{x_i} h, trapezoid on the grid.
ForwardCurve integral_operator(const ForwardCurve& curve);

// HJM no-arbitrage drift alpha(h,v) = sum_j gamma_j * I gamma_j.
ForwardCurve hjm_drift(const HJMMParams& params, const ForwardCurve& curve, double v);

struct BetaCorrection {
    ForwardCurve curve_part; // 1/2 sum_j (D_r gamma_j [gamma_j] + D_v gamma_j lambda_j)
    double scalar_part = 0;  // 1/2 sum_j lambda_j lambda_j'
};

// The Wong-Zakai correction of the pathwise PDE; equals one half of the
// assembled model's Stratonovich correction.
BetaCorrection wz_beta_correction(const HJMMParams& params, const ForwardCurve& curve,
                                  double v);

// Assembles the product-space SPDE model. Throws ArgumentError when the
// shape constraints (beta' > beta > 0, a_j > beta'/2) are violated.
SPDEModel build_hjmm_model(const HJMMParams& params);

// Zero-coupon bond price exp(-int_0^T h) from the Musiela curve.
double bond_price(const ForwardCurve& curve, double maturity);

// gamma_j curve values on the grid (exposed for tests and the drift).
std::vector<double> gamma_curve(const HJMMParams& params, int j, double v);
double lambda_j(const HJMMParams& params, int j, double v);
double mu(const HJMMParams& params, double v);

// Default initial state: r0(x) = 0.05 - 0.02 exp(-0.3 x), v0 = 0.
ForwardCurve default_initial_curve(const HJMMParams& params);
HVector pack_state(const SPDEModel& model, const ForwardCurve& curve, double v);
void unpack_state(const SPDEModel& model, const HVector& state, ForwardCurve& curve,
                  double& v);

// Curve I/O: CSV with a "maturity,rate" header.
ForwardCurve load_curve_csv(std::istream& is, double beta);
void save_curve_csv(const ForwardCurve& curve, std::ostream& os);
// Bond-price term structure: CSV "maturity,price" at the grid maturities.
void bond_prices_csv(const ForwardCurve& curve, std::ostream& os);

} // namespace wzsim::hjmm
