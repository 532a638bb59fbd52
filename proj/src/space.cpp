#include "wzsim/space.hpp"

#include <algorithm>
#include <cmath>

#include "wzsim/errors.hpp"
#include "wzsim/kernels.hpp"

namespace wzsim {

SpacePtr SpaceDescriptor::spectral(std::vector<double> eigenvalues) {
    if (eigenvalues.empty())
        throw ArgumentError("spectral space requires at least one eigenvalue");
    for (double l : eigenvalues)
        if (!std::isfinite(l)) throw ArgumentError("spectral eigenvalue not finite");
    auto s = std::make_shared<SpaceDescriptor>();
    s->kind = SpaceKind::Spectral;
    s->dim = static_cast<int>(eigenvalues.size());
    s->eigenvalues = std::move(eigenvalues);
    return s;
}

SpacePtr SpaceDescriptor::weighted_grid(std::vector<double> grid, double beta) {
    if (grid.size() < 3)
        throw ArgumentError("weighted grid requires at least three nodes");
    if (!(beta > 0.0)) throw ArgumentError("weighted grid requires beta > 0");
    if (grid.front() < 0.0) throw ArgumentError("grid maturities must be >= 0");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw ArgumentError("grid maturities must be strictly increasing");
    auto s = std::make_shared<SpaceDescriptor>();
    s->kind = SpaceKind::WeightedGrid;
    s->dim = static_cast<int>(grid.size());
    s->grid = std::move(grid);
    s->beta = beta;
    return s;
}

SpacePtr SpaceDescriptor::product(std::vector<SpacePtr> factors) {
    if (factors.empty()) throw ArgumentError("product space requires factors");
    auto s = std::make_shared<SpaceDescriptor>();
    s->kind = SpaceKind::Product;
    s->dim = 0;
    for (const auto& f : factors) {
        if (!f) throw ArgumentError("null product factor");
        s->dim += f->dim;
    }
    s->factors = std::move(factors);
    return s;
}

bool same_space(const SpaceDescriptor& a, const SpaceDescriptor& b) {
    if (&a == &b) return true;
    if (a.kind != b.kind || a.dim != b.dim) return false;
    switch (a.kind) {
        case SpaceKind::Spectral:
            return a.eigenvalues == b.eigenvalues;
        case SpaceKind::WeightedGrid:
            return a.beta == b.beta && a.grid == b.grid;
        case SpaceKind::Product:
            if (a.factors.size() != b.factors.size()) return false;
            for (std::size_t i = 0; i < a.factors.size(); ++i)
                if (!same_space(*a.factors[i], *b.factors[i])) return false;
            return true;
    }
    return false;
}

HVector::HVector(SpacePtr s, std::vector<double> c) : space(std::move(s)), coeffs(std::move(c)) {
    require_valid(*this);
}

HVector HVector::zero(SpacePtr s) {
    if (!s) throw ArgumentError("null space descriptor");
    HVector v;
    v.space = std::move(s);
    v.coeffs.assign(static_cast<std::size_t>(v.space->dim), 0.0);
    return v;
}

void require_valid(const HVector& v) {
    if (!v.space) throw StructuralError("vector has no space descriptor");
    if (static_cast<int>(v.coeffs.size()) != v.space->dim)
        throw StructuralError("coefficient count does not match space dimension");
    for (double c : v.coeffs)
        if (!std::isfinite(c)) throw ArgumentError("non-finite coefficient");
}

void require_same_space(const HVector& a, const HVector& b) {
    if (!a.space || !b.space || !same_space(*a.space, *b.space))
        throw StructuralError("space descriptors differ");
}

HVector add(const HVector& a, const HVector& b) {
    require_same_space(a, b);
    HVector out = a;
    const auto& k = kernels::active();
    k.axpy(out.coeffs.data(), 1.0, b.coeffs.data(), out.coeffs.size());
    return out;
}

HVector sub(const HVector& a, const HVector& b) {
    require_same_space(a, b);
    HVector out = a;
    const auto& k = kernels::active();
    k.axpy(out.coeffs.data(), -1.0, b.coeffs.data(), out.coeffs.size());
    return out;
}

HVector scale(double a, const HVector& v) {
    HVector out = v;
    kernels::active().scale(out.coeffs.data(), a, v.coeffs.data(), v.coeffs.size());
    return out;
}

void grid_derivative(std::span<const double> x, std::span<const double> h,
                     std::span<double> out) {
    const std::size_t n = x.size();
    if (h.size() != n || out.size() != n || n < 3)
        throw StructuralError("grid_derivative: size mismatch");
    {
        const double a = x[1] - x[0], b = x[2] - x[1];
        out[0] = -(2 * a + b) / (a * (a + b)) * h[0] + (a + b) / (a * b) * h[1] -
                 a / (b * (a + b)) * h[2];
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double a = x[i] - x[i - 1], b = x[i + 1] - x[i];
        out[i] = (h[i + 1] * a * a - h[i - 1] * b * b + h[i] * (b * b - a * a)) /
                 (a * b * (a + b));
    }
    {
        const double a = x[n - 2] - x[n - 3], b = x[n - 1] - x[n - 2];
        out[n - 1] = b / (a * (a + b)) * h[n - 3] - (a + b) / (a * b) * h[n - 2] +
                     (a + 2 * b) / (b * (a + b)) * h[n - 1];
    }
}

double hbeta_norm_on_grid(std::span<const double> x, std::span<const double> h,
                          double beta) {
    const std::size_t n = x.size();
    if (h.size() != n || n < 3) throw StructuralError("hbeta_norm: size mismatch");
    std::vector<double> d(n);
    grid_derivative(x, h, d);
    // trapezoid of |h'|^2 e^{beta x}; zero tail beyond the last node
    double integral = 0.0;
    double prev = d[0] * d[0] * std::exp(beta * x[0]);
    for (std::size_t i = 1; i < n; ++i) {
        const double cur = d[i] * d[i] * std::exp(beta * x[i]);
        integral += 0.5 * (prev + cur) * (x[i] - x[i - 1]);
        prev = cur;
    }
    return std::sqrt(h[0] * h[0] + integral);
}

double norm_span(const SpaceDescriptor& space, std::span<const double> coeffs) {
    if (static_cast<int>(coeffs.size()) != space.dim)
        throw StructuralError("coefficient count does not match space dimension");
    switch (space.kind) {
        case SpaceKind::Spectral:
            return std::sqrt(kernels::active().nrm2sq(coeffs.data(), coeffs.size()));
        case SpaceKind::WeightedGrid:
            return hbeta_norm_on_grid(space.grid, coeffs, space.beta);
        case SpaceKind::Product: {
            double sq = 0.0;
            std::size_t off = 0;
            for (const auto& f : space.factors) {
                const double nf = norm_span(*f, coeffs.subspan(off, f->dim));
                sq += nf * nf;
                off += f->dim;
            }
            return std::sqrt(sq);
        }
    }
    throw StructuralError("unknown space kind");
}

double norm(const HVector& v) {
    require_valid(v);
    return norm_span(*v.space, v.span());
}

} // namespace wzsim
