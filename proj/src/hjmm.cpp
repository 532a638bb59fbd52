#include "wzsim/hjmm.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "wzsim/errors.hpp"
#include "wzsim/noise.hpp"

namespace wzsim::hjmm {
namespace {

double ltilde(double v) { return 1.0 + 0.5 * std::tanh(v); }
double ltilde_prime(double v) {
    const double th = std::tanh(v);
    return 0.5 * (1.0 - th * th);
}

double lambda_prime(const HJMMParams& p, int j, double v) {
    const double d = 1.0 + v * v;
    return -2.0 * v * p.nu[static_cast<std::size_t>(j)] / (d * d);
}

void check_params(const HJMMParams& p) {
    if (!(p.beta > 0.0) || !(p.beta_prime > p.beta))
        throw ArgumentError("hjmm requires beta' > beta > 0");
    const std::size_t r = p.a.size();
    if (r == 0 || p.c.size() != r || p.nu.size() != r)
        throw ArgumentError("hjmm volatility family arrays must have equal positive length");
    for (double aj : p.a)
        if (!(aj > 0.5 * p.beta_prime))
            throw ArgumentError("hjmm requires a_j > beta'/2 for every factor");
}

std::vector<double> grid_of(const HJMMParams& p) {
    return p.grid.empty() ? default_grid() : p.grid;
}

} // namespace

std::vector<double> default_grid() {
    std::vector<double> g{0.0};
    auto fill_to = [&g](double until, double step) {
        while (g.back() < until - 1e-9) g.push_back(g.back() + step);
    };
    fill_to(2.0, 1.0 / 24.0);
    fill_to(5.0, 1.0 / 12.0);
    fill_to(10.0, 0.25);
    fill_to(30.0, 0.5);
    return g;
}

double hbeta_norm(const ForwardCurve& curve) {
    return hbeta_norm_on_grid(curve.maturities, curve.values, curve.beta);
}

ForwardCurve integral_operator(const ForwardCurve& curve) {
    ForwardCurve out = curve;
    const auto& x = curve.maturities;
    const auto& h = curve.values;
    out.values[0] = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i)
        out.values[i] = out.values[i - 1] + 0.5 * (h[i] + h[i - 1]) * (x[i] - x[i - 1]);
    return out;
}

std::vector<double> gamma_curve(const HJMMParams& p, int j, double v) {
    const auto g = grid_of(p);
    const double lv = ltilde(v);
    const double cj = p.c[static_cast<std::size_t>(j)];
    const double aj = p.a[static_cast<std::size_t>(j)];
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = lv * cj * std::exp(-aj * g[i]);
    return out;
}

double lambda_j(const HJMMParams& p, int j, double v) {
    return p.nu[static_cast<std::size_t>(j)] / (1.0 + v * v);
}

double mu(const HJMMParams& p, double v) { return p.kappa * (p.theta - std::tanh(v)); }

ForwardCurve hjm_drift(const HJMMParams& p, const ForwardCurve& curve, double v) {
    check_params(p);
    ForwardCurve out = curve;
    std::fill(out.values.begin(), out.values.end(), 0.0);
    for (std::size_t j = 0; j < p.a.size(); ++j) {
        ForwardCurve gj = curve;
        gj.values = gamma_curve(p, static_cast<int>(j), v);
        const ForwardCurve igj = integral_operator(gj);
        for (std::size_t i = 0; i < out.values.size(); ++i)
            out.values[i] += gj.values[i] * igj.values[i]; // pointwise product
    }
    return out;
}

BetaCorrection wz_beta_correction(const HJMMParams& p, const ForwardCurve& curve, double v) {
    check_params(p);
    BetaCorrection corr;
    corr.curve_part = curve;
    std::fill(corr.curve_part.values.begin(), corr.curve_part.values.end(), 0.0);
    const auto g = grid_of(p);
    // gamma is h-independent, so D_r gamma [gamma] = 0; only the v-coupling
    // D_v gamma_j * lambda_j contributes to the curve block.
    for (std::size_t j = 0; j < p.a.size(); ++j) {
        const double lj = lambda_j(p, static_cast<int>(j), v);
        const double dv = ltilde_prime(v) * p.c[j];
        for (std::size_t i = 0; i < g.size(); ++i)
            corr.curve_part.values[i] += 0.5 * dv * std::exp(-p.a[j] * g[i]) * lj;
        corr.scalar_part +=
            0.5 * lj * lambda_prime(p, static_cast<int>(j), v);
    }
    return corr;
}

ForwardCurve default_initial_curve(const HJMMParams& p) {
    ForwardCurve c;
    c.maturities = grid_of(p);
    c.beta = p.beta;
    c.values.resize(c.maturities.size());
    for (std::size_t i = 0; i < c.maturities.size(); ++i)
        c.values[i] = 0.05 - 0.02 * std::exp(-0.3 * c.maturities[i]);
    return c;
}

HVector pack_state(const SPDEModel& model, const ForwardCurve& curve, double v) {
    HVector out = HVector::zero(model.space);
    if (curve.values.size() + 1 != out.coeffs.size())
        throw StructuralError("curve does not match the model grid");
    std::copy(curve.values.begin(), curve.values.end(), out.coeffs.begin());
    out.coeffs.back() = v;
    return out;
}

void unpack_state(const SPDEModel& model, const HVector& state, ForwardCurve& curve,
                  double& v) {
    const auto& grid_space = model.space->factors.at(0);
    curve.maturities = grid_space->grid;
    curve.beta = grid_space->beta;
    curve.values.assign(state.coeffs.begin(), state.coeffs.end() - 1);
    v = state.coeffs.back();
}

SPDEModel build_hjmm_model(const HJMMParams& params) {
    check_params(params);
    const auto grid = grid_of(params);
    const int r = static_cast<int>(params.a.size());

    SpacePtr curve_space = SpaceDescriptor::weighted_grid(grid, params.beta);
    SpacePtr scalar_space = SpaceDescriptor::spectral({0.0});
    SpacePtr space = SpaceDescriptor::product({curve_space, scalar_space});

    std::vector<Semigroup> parts;
    parts.push_back(Semigroup::grid_shift(curve_space));
    parts.push_back(Semigroup::spectral_diagonal(scalar_space)); // identity on the factor

    SPDEModel model;
    model.name = "hjmm";
    model.space = space;
    model.semigroup = Semigroup::product(space, std::move(parts));
    model.r = r;

    const std::size_t dim_curve = grid.size();
    const HJMMParams p = params;

    auto as_curve = [grid, dim_curve, p](const HVector& x) {
        ForwardCurve c;
        c.maturities = grid;
        c.beta = p.beta;
        c.values.assign(x.coeffs.begin(), x.coeffs.begin() + static_cast<long>(dim_curve));
        return c;
    };

    // Wong-Zakai-side drift: (alpha - beta_corr, mu - 1/2 sum lambda lambda').
    model.drift = [p, space, as_curve](const HVector& x) {
        const ForwardCurve rc = as_curve(x);
        const double v = x.coeffs.back();
        const ForwardCurve alpha = hjm_drift(p, rc, v);
        const BetaCorrection corr = wz_beta_correction(p, rc, v);
        HVector out = HVector::zero(space);
        for (std::size_t i = 0; i < alpha.values.size(); ++i)
            out.coeffs[i] = alpha.values[i] - corr.curve_part.values[i];
        out.coeffs.back() = mu(p, v) - corr.scalar_part;
        return out;
    };

    for (int j = 0; j < r; ++j) {
        model.vols.push_back([p, j, space](const HVector& x) {
            const double v = x.coeffs.back();
            HVector out = HVector::zero(space);
            const auto gj = gamma_curve(p, j, v);
            std::copy(gj.begin(), gj.end(), out.coeffs.begin());
            out.coeffs.back() = lambda_j(p, j, v);
            return out;
        });
        // gamma depends on the state only through v, so the Jacobian action
        // on direction (g, w) is (ltilde'(v) w c_j e^{-a_j x}, lambda_j'(v) w).
        model.vol_jacobians.push_back([p, j, space, dim_curve](const HVector& x,
                                                               const HVector& h) {
            const double v = x.coeffs.back();
            const double w = h.coeffs.back();
            HVector out = HVector::zero(space);
            const double dv = ltilde_prime(v) * p.c[static_cast<std::size_t>(j)] * w;
            const auto& grid = space->factors[0]->grid;
            for (std::size_t i = 0; i < dim_curve; ++i)
                out.coeffs[i] = dv * std::exp(-p.a[static_cast<std::size_t>(j)] * grid[i]);
            out.coeffs.back() = lambda_prime(p, j, v) * w;
            return out;
        });
    }

    // smooth probes: a few random exponentials plus a random scalar factor
    model.probe_sampler = [space, grid, dim_curve](std::uint64_t index) {
        std::uint64_t s = splitmix64(0x48AA11EEULL ^ index);
        auto u = [&s]() {
            s = splitmix64(s);
            return static_cast<double>(s >> 11) * 0x1.0p-53;
        };
        HVector v = HVector::zero(space);
        const double a1 = 0.3 + u(), a2 = 0.3 + u();
        const double c1 = 0.04 * (u() - 0.5), c2 = 0.04 * (u() - 0.5);
        const double level = 0.05 * u();
        for (std::size_t i = 0; i < dim_curve; ++i)
            v.coeffs[i] = level + c1 * std::exp(-a1 * grid[i]) + c2 * std::exp(-a2 * grid[i]);
        v.coeffs.back() = 2.0 * (u() - 0.5);
        return v;
    };

    model.bounds.declared = false; // curve-space constants reported, not asserted
    return model;
}

double bond_price(const ForwardCurve& curve, double maturity) {
    const auto& x = curve.maturities;
    if (maturity < 0.0 || maturity > x.back())
        throw ArgumentError("bond maturity outside the curve grid");
    double integral = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (x[i] <= maturity) {
            integral += 0.5 * (curve.values[i] + curve.values[i - 1]) * (x[i] - x[i - 1]);
            if (x[i] == maturity) break;
        } else {
            // partial cell up to maturity, linear interpolant
            const double x0 = x[i - 1], x1 = x[i];
            if (maturity > x0) {
                const double w = (maturity - x0) / (x1 - x0);
                const double hm = curve.values[i - 1] + w * (curve.values[i] - curve.values[i - 1]);
                integral += 0.5 * (curve.values[i - 1] + hm) * (maturity - x0);
            }
            break;
        }
    }
    return std::exp(-integral);
}

ForwardCurve load_curve_csv(std::istream& is, double beta) {
    ForwardCurve c;
    c.beta = beta;
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (first) {
            first = false;
            if (line.find("maturity") != std::string::npos) continue; // header
        }
        std::istringstream row(line);
        std::string a, b;
        if (!std::getline(row, a, ',') || !std::getline(row, b, ','))
            throw ArgumentError("curve CSV: expected 'maturity,rate' rows");
        c.maturities.push_back(std::stod(a));
        c.values.push_back(std::stod(b));
    }
    if (c.maturities.size() < 3) throw ArgumentError("curve CSV: too few rows");
    return c;
}

void save_curve_csv(const ForwardCurve& curve, std::ostream& os) {
    os << "maturity,rate\n";
    os.precision(17);
    for (std::size_t i = 0; i < curve.maturities.size(); ++i)
        os << curve.maturities[i] << ',' << curve.values[i] << '\n';
}

void bond_prices_csv(const ForwardCurve& curve, std::ostream& os) {
    os << "maturity,price\n";
    os.precision(17);
    for (std::size_t i = 0; i < curve.maturities.size(); ++i)
        os << curve.maturities[i] << ',' << bond_price(curve, curve.maturities[i]) << '\n';
}

} // namespace wzsim::hjmm
