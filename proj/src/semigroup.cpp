#include "wzsim/semigroup.hpp"

#include <algorithm>
#include <cmath>

#include "wzsim/errors.hpp"

namespace wzsim {
namespace {

// Gauss-Legendre nodes/weights on [0,1].
constexpr double kGlNode[4] = {0.06943184420297371, 0.33000947820757187,
                               0.66999052179242813, 0.93056815579702629};
constexpr double kGlWeight[4] = {0.17392742256872693, 0.32607257743127307,
                                 0.32607257743127307, 0.17392742256872693};

double phi1(double lambda, double dt) {
    // integral_0^dt e^{lambda u} du, stable at lambda -> 0
    const double z = lambda * dt;
    if (z == 0.0) return dt;
    return std::expm1(z) / lambda;
}

} // namespace

Semigroup Semigroup::spectral_diagonal(SpacePtr space) {
    if (!space || space->kind != SpaceKind::Spectral)
        throw ArgumentError("spectral_diagonal requires a spectral space");
    Semigroup s;
    s.kind_ = SemigroupKind::SpectralDiagonal;
    s.space_ = std::move(space);
    return s;
}

Semigroup Semigroup::grid_shift(SpacePtr space) {
    if (!space || space->kind != SpaceKind::WeightedGrid)
        throw ArgumentError("grid_shift requires a weighted-grid space");
    Semigroup s;
    s.kind_ = SemigroupKind::GridShift;
    s.space_ = std::move(space);
    return s;
}

Semigroup Semigroup::product(SpacePtr space, std::vector<Semigroup> components) {
    if (!space || space->kind != SpaceKind::Product)
        throw ArgumentError("product semigroup requires a product space");
    if (components.size() != space->factors.size())
        throw StructuralError("component count does not match product factors");
    for (std::size_t i = 0; i < components.size(); ++i)
        if (!same_space(*components[i].space(), *space->factors[i]))
            throw StructuralError("component space does not match product factor");
    Semigroup s;
    s.kind_ = SemigroupKind::Product;
    s.space_ = std::move(space);
    s.components_ = std::move(components);
    return s;
}

double interp_on_grid(std::span<const double> grid, std::span<const double> values,
                      double x) {
    if (x >= grid.back()) return values.back(); // hold last value
    if (x <= grid.front()) return values.front();
    const auto it = std::upper_bound(grid.begin(), grid.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - grid.begin());
    const std::size_t lo = hi - 1;
    const double w = (x - grid[lo]) / (grid[hi] - grid[lo]);
    return values[lo] + w * (values[hi] - values[lo]);
}

void Semigroup::apply_span(double t, std::span<const double> in,
                           std::span<double> out) const {
    if (t < 0.0) throw ArgumentError("semigroup time must be nonnegative");
    if (static_cast<int>(in.size()) != space_->dim || in.size() != out.size())
        throw StructuralError("semigroup apply: dimension mismatch");
    switch (kind_) {
        case SemigroupKind::SpectralDiagonal: {
            if (t == 0.0) {
                std::copy(in.begin(), in.end(), out.begin());
                return;
            }
            const auto& lam = space_->eigenvalues;
            for (std::size_t k = 0; k < in.size(); ++k)
                out[k] = std::exp(lam[k] * t) * in[k];
            return;
        }
        case SemigroupKind::GridShift: {
            const auto& x = space_->grid;
            if (t == 0.0) {
                std::copy(in.begin(), in.end(), out.begin());
                return;
            }
            // reading before writing allows in == out only via the temp below
            std::vector<double> tmp(in.begin(), in.end());
            for (std::size_t i = 0; i < x.size(); ++i)
                out[i] = interp_on_grid(x, tmp, x[i] + t);
            return;
        }
        case SemigroupKind::Product: {
            std::size_t off = 0;
            for (const auto& c : components_) {
                const std::size_t d = static_cast<std::size_t>(c.space()->dim);
                c.apply_span(t, in.subspan(off, d), out.subspan(off, d));
                off += d;
            }
            return;
        }
    }
}

HVector Semigroup::apply(double t, const HVector& v) const {
    require_valid(v);
    if (!same_space(*v.space, *space_)) throw StructuralError("semigroup/vector space mismatch");
    HVector out = HVector::zero(space_);
    apply_span(t, v.span(), {out.coeffs.data(), out.coeffs.size()});
    return out;
}

void Semigroup::generator_span(std::span<const double> in, std::span<double> out) const {
    if (static_cast<int>(in.size()) != space_->dim || in.size() != out.size())
        throw StructuralError("generator apply: dimension mismatch");
    switch (kind_) {
        case SemigroupKind::SpectralDiagonal: {
            const auto& lam = space_->eigenvalues;
            for (std::size_t k = 0; k < in.size(); ++k) out[k] = lam[k] * in[k];
            return;
        }
        case SemigroupKind::GridShift: {
            std::vector<double> tmp(in.begin(), in.end());
            grid_derivative(space_->grid, tmp, out);
            return;
        }
        case SemigroupKind::Product: {
            std::size_t off = 0;
            for (const auto& c : components_) {
                const std::size_t d = static_cast<std::size_t>(c.space()->dim);
                c.generator_span(in.subspan(off, d), out.subspan(off, d));
                off += d;
            }
            return;
        }
    }
}

HVector Semigroup::generator_apply(const HVector& v) const {
    require_valid(v);
    if (!same_space(*v.space, *space_)) throw StructuralError("semigroup/vector space mismatch");
    HVector out = HVector::zero(space_);
    generator_span(v.span(), {out.coeffs.data(), out.coeffs.size()});
    return out;
}

std::optional<std::vector<double>> Semigroup::step_factors(double dt) const {
    if (dt < 0.0) throw ArgumentError("semigroup time must be nonnegative");
    switch (kind_) {
        case SemigroupKind::SpectralDiagonal: {
            std::vector<double> f(space_->eigenvalues.size());
            for (std::size_t k = 0; k < f.size(); ++k)
                f[k] = std::exp(space_->eigenvalues[k] * dt);
            return f;
        }
        case SemigroupKind::GridShift:
            return std::nullopt;
        case SemigroupKind::Product: {
            std::vector<double> f;
            f.reserve(static_cast<std::size_t>(space_->dim));
            for (const auto& c : components_) {
                auto part = c.step_factors(dt);
                if (!part) return std::nullopt;
                f.insert(f.end(), part->begin(), part->end());
            }
            return f;
        }
    }
    return std::nullopt;
}

void Semigroup::phi_span(double dt, std::span<const double> in,
                         std::span<double> out) const {
    if (dt < 0.0) throw ArgumentError("semigroup time must be nonnegative");
    if (static_cast<int>(in.size()) != space_->dim || in.size() != out.size())
        throw StructuralError("phi: dimension mismatch");
    switch (kind_) {
        case SemigroupKind::SpectralDiagonal: {
            const auto& lam = space_->eigenvalues;
            for (std::size_t k = 0; k < in.size(); ++k)
                out[k] = phi1(lam[k], dt) * in[k];
            return;
        }
        case SemigroupKind::GridShift: {
            const auto& x = space_->grid;
            std::vector<double> tmp(in.begin(), in.end());
            for (std::size_t i = 0; i < x.size(); ++i) {
                double acc = 0.0;
                for (int g = 0; g < 4; ++g)
                    acc += kGlWeight[g] * interp_on_grid(x, tmp, x[i] + kGlNode[g] * dt);
                out[i] = dt * acc;
            }
            return;
        }
        case SemigroupKind::Product: {
            std::size_t off = 0;
            for (const auto& c : components_) {
                const std::size_t d = static_cast<std::size_t>(c.space()->dim);
                c.phi_span(dt, in.subspan(off, d), out.subspan(off, d));
                off += d;
            }
            return;
        }
    }
}

HVector Semigroup::phi(double dt, const HVector& z) const {
    require_valid(z);
    if (!same_space(*z.space, *space_)) throw StructuralError("semigroup/vector space mismatch");
    HVector out = HVector::zero(space_);
    phi_span(dt, z.span(), {out.coeffs.data(), out.coeffs.size()});
    return out;
}

Semigroup build_perturbed_spectral(const std::vector<double>& base_eigenvalues,
                                   double scale, double shift) {
    if (!std::isfinite(scale) || !std::isfinite(shift))
        throw ArgumentError("perturbed spectrum requires finite scale and shift");
    std::vector<double> eigs(base_eigenvalues.size());
    for (std::size_t k = 0; k < eigs.size(); ++k)
        eigs[k] = scale * base_eigenvalues[k] + shift;
    return Semigroup::spectral_diagonal(SpaceDescriptor::spectral(std::move(eigs)));
}

double graph_norm(const HVector& v, const Semigroup& s) {
    const double n = norm(v);
    const double na = norm(s.generator_apply(v));
    return std::sqrt(n * n + na * na);
}

} // namespace wzsim
