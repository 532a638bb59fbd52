#include "wzsim/builtin_models.hpp"

#include <cmath>

#include "wzsim/errors.hpp"

namespace wzsim {
namespace {

SPDEModel make_additive_spectral(std::string name, const AdditiveSpectralParams& p,
                                 Semigroup semigroup) {
    SPDEModel model;
    model.name = std::move(name);
    model.space = semigroup.space();
    model.semigroup = std::move(semigroup);
    model.r = p.channels;
    const SpacePtr space = model.space;
    model.drift = [space](const HVector&) { return HVector::zero(space); };
    const auto table = additive_sigma_table(p);
    for (int j = 0; j < p.channels; ++j) {
        HVector sj{space, table[static_cast<std::size_t>(j)]};
        model.vols.push_back([sj](const HVector&) { return sj; });
        model.vol_jacobians.push_back(
            [space](const HVector&, const HVector&) { return HVector::zero(space); });
    }
    model.bounds.declared = true;
    model.bounds.sigma_bound = p.vol_scale; // |sigma_j| <= vol_scale, D sigma = 0
    model.bounds.b_bound = 0.0;
    model.bounds.b_lipschitz = 0.0;
    return model;
}

} // namespace

std::vector<double> dirichlet_laplacian_spectrum(int dim) {
    if (dim < 1) throw ArgumentError("dimension must be positive");
    std::vector<double> eigs(static_cast<std::size_t>(dim));
    for (int k = 1; k <= dim; ++k)
        eigs[static_cast<std::size_t>(k - 1)] = -static_cast<double>(k) * k;
    return eigs;
}

std::vector<std::vector<double>> additive_sigma_table(const AdditiveSpectralParams& p) {
    if (p.channels < 1) throw ArgumentError("channel count must be positive");
    std::vector<std::vector<double>> table;
    for (int j = 1; j <= p.channels; ++j) {
        std::vector<double> s(static_cast<std::size_t>(p.dim));
        for (int k = 1; k <= p.dim; ++k) {
            double v = p.vol_scale / (static_cast<double>(k) * k);
            if (j % 2 == 0 && k % 2 == 0) v = -v;
            s[static_cast<std::size_t>(k - 1)] = v;
        }
        table.push_back(std::move(s));
    }
    return table;
}

SPDEModel make_heat_model(const AdditiveSpectralParams& p, double mass) {
    Semigroup s = build_perturbed_spectral(dirichlet_laplacian_spectrum(p.dim), 1.0,
                                           -mass * mass);
    return make_additive_spectral("heat", p, std::move(s));
}

SPDEModel make_cable_model(const AdditiveSpectralParams& p, double length_const,
                           double time_const) {
    if (!(length_const > 0.0) || !(time_const > 0.0))
        throw ArgumentError("cable constants must be positive");
    Semigroup s = build_perturbed_spectral(dirichlet_laplacian_spectrum(p.dim),
                                           length_const * length_const / time_const,
                                           -1.0 / time_const);
    return make_additive_spectral("cable", p, std::move(s));
}

SPDEModel make_geometric_model(double sigma) {
    SPDEModel model;
    model.name = "geometric";
    model.space = SpaceDescriptor::spectral({0.0}); // A = 0
    model.semigroup = Semigroup::spectral_diagonal(model.space);
    model.r = 1;
    const SpacePtr space = model.space;
    model.drift = [space](const HVector&) { return HVector::zero(space); };
    model.vols.push_back([sigma](const HVector& x) { return scale(sigma, x); });
    model.vol_jacobians.push_back(
        [sigma](const HVector&, const HVector& h) { return scale(sigma, h); });
    // sigma(x) = sigma x is unbounded; no bounds declared on purpose.
    return model;
}

namespace {

SPDEModel make_nemytskii_impl(const NemytskiiParams& p, double jacobian_factor,
                              std::string name) {
    SPDEModel model;
    model.name = std::move(name);
    model.space = SpaceDescriptor::spectral(dirichlet_laplacian_spectrum(p.dim));
    model.semigroup = Semigroup::spectral_diagonal(model.space);
    model.r = p.channels;
    const SpacePtr space = model.space;
    std::vector<double> c(static_cast<std::size_t>(p.dim));
    double cmax = 0.0;
    for (int k = 1; k <= p.dim; ++k) {
        c[static_cast<std::size_t>(k - 1)] = p.vol_scale / static_cast<double>(k);
        cmax = std::max(cmax, std::fabs(c[static_cast<std::size_t>(k - 1)]));
    }
    model.drift = [space](const HVector&) { return HVector::zero(space); };
    for (int j = 0; j < p.channels; ++j) {
        const double flip = (j % 2 == 0) ? 1.0 : -1.0;
        model.vols.push_back([c, flip, space](const HVector& x) {
            HVector out = HVector::zero(space);
            for (std::size_t k = 0; k < c.size(); ++k)
                out.coeffs[k] = flip * c[k] * std::tanh(x.coeffs[k]);
            return out;
        });
        model.vol_jacobians.push_back(
            [c, flip, jacobian_factor, space](const HVector& x, const HVector& h) {
                HVector out = HVector::zero(space);
                for (std::size_t k = 0; k < c.size(); ++k) {
                    const double th = std::tanh(x.coeffs[k]);
                    out.coeffs[k] =
                        jacobian_factor * flip * c[k] * (1.0 - th * th) * h.coeffs[k];
                }
                return out;
            });
    }
    model.bounds.declared = true;
    // |tanh| <= 1, |tanh'| <= 1, |tanh''| <= 4/(3 sqrt(3)) < 1
    model.bounds.sigma_bound = cmax;
    model.bounds.b_bound = 0.0;
    model.bounds.b_lipschitz = 0.0;
    return model;
}

} // namespace

SPDEModel make_nemytskii_heat_model(const NemytskiiParams& p) {
    return make_nemytskii_impl(p, 1.0, "nemytskii");
}

SPDEModel make_broken_jacobian_model() {
    return make_nemytskii_impl(NemytskiiParams{}, 2.0, "broken-jacobian");
}

HVector default_spectral_x0(const SpacePtr& space) {
    HVector v = HVector::zero(space);
    for (std::size_t k = 0; k < v.coeffs.size(); ++k)
        v.coeffs[k] = 1.0 / (static_cast<double>(k + 1) * (k + 1));
    return v;
}

} // namespace wzsim
