#include "wzsim/schemes.hpp"

#include <cmath>

#include "wzsim/errors.hpp"
#include "wzsim/kernels.hpp"

namespace wzsim {
namespace {

constexpr double kBlowUpLimit = 1e12;
constexpr double kInnerTol = 1e-10;
constexpr int kMaxSweeps = 8;

using Buf = std::vector<double>;

void check_inputs(const SPDEModel& model, const HVector& x0, const BrownianLattice& lat,
                  const SchemeConfig& cfg) {
    require_valid(x0);
    if (!same_space(*x0.space, *model.space))
        throw StructuralError("x0 does not live in the model space");
    if (cfg.m < 1 || lat.m_fine() % cfg.m != 0)
        throw ArgumentError("coarse step count must divide m_fine");
    if (cfg.monitoring != 0 && cfg.monitoring != lat.m_fine())
        throw ArgumentError("monitoring grid must be the fine lattice grid");
    if (static_cast<int>(model.vols.size()) != model.r ||
        static_cast<int>(model.vol_jacobians.size()) != model.r)
        throw StructuralError("model volatility table does not match r");
}

void check_state(const double* state, std::size_t n, double t, const BrownianLattice& lat) {
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(state[i]) || std::fabs(state[i]) > kBlowUpLimit)
            throw NumericError("state blow-up", t, lat.seed());
    }
}

Trajectory make_trajectory(const HVector& x0, const BrownianLattice& lat, int m,
                           SchemeTag tag) {
    Trajectory traj;
    traj.tag = tag;
    traj.m = m;
    const int n = lat.m_fine();
    traj.times.resize(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i)
        traj.times[static_cast<std::size_t>(i)] = static_cast<double>(i) * lat.horizon() / n;
    traj.states.reserve(static_cast<std::size_t>(n) + 1);
    traj.states.push_back(x0);
    return traj;
}

// Propagation by S_dt: one hadamard when the semigroup is diagonal, a generic
// apply otherwise.
struct Propagator {
    const Semigroup& sg;
    double dt;
    std::optional<std::vector<double>> factors;

    Propagator(const Semigroup& s, double step) : sg(s), dt(step), factors(s.step_factors(step)) {}

    void advance(Buf& v) const {
        if (factors) {
            kernels::active().hadamard(v.data(), factors->data(), v.size());
        } else {
            sg.apply_span(dt, {v.data(), v.size()}, {v.data(), v.size()});
        }
    }
};

void add_inplace(Buf& y, const Buf& x) {
    kernels::active().axpy(y.data(), 1.0, x.data(), y.size());
}

// Shared loop of the two frozen-coefficient schemes. `freeze_semigroup`
// selects the exponential-Euler variant (factor S_{t-[s]^-}).
Trajectory integrate_frozen(const SPDEModel& model, const HVector& x0,
                            const BrownianLattice& lat, const SchemeConfig& cfg,
                            bool freeze_semigroup, SchemeTag tag) {
    check_inputs(model, x0, lat, cfg);
    const int m = cfg.m;
    const int m_fine = lat.m_fine();
    const int block = m_fine / m;
    const double T = lat.horizon();
    const double df = T / m_fine;
    const std::size_t dim = static_cast<std::size_t>(model.space->dim);
    const auto& kern = kernels::active();

    Trajectory traj = make_trajectory(x0, lat, m, tag);
    const Propagator prop(model.semigroup, df);

    std::vector<std::span<const double>> dB(static_cast<std::size_t>(model.r));
    for (int j = 1; j <= model.r; ++j)
        dB[static_cast<std::size_t>(j - 1)] = lat.fine_increments(j);

    HVector cell_left = x0;
    Buf sg(dim), drift_conv(dim), stoch_conv(dim), tmp(dim);
    std::vector<Buf> vol_prop(static_cast<std::size_t>(model.r), Buf(dim));
    Buf drift_prop(dim);

    for (int k = 0; k < m; ++k) {
        const HVector bh = drift_hat(model, cell_left);
        if (freeze_semigroup) {
            drift_prop = bh.coeffs;
            for (int j = 0; j < model.r; ++j)
                vol_prop[static_cast<std::size_t>(j)] =
                    model.vols[static_cast<std::size_t>(j)](cell_left).coeffs;
        } else {
            // per-substep increments are cell constants
            drift_prop = model.semigroup.phi(df, bh).coeffs; // phi_df(b_hat)
            for (int j = 0; j < model.r; ++j) {
                const HVector sj = model.vols[static_cast<std::size_t>(j)](cell_left);
                vol_prop[static_cast<std::size_t>(j)] = model.semigroup.apply(df, sj).coeffs;
            }
        }

        sg = cell_left.coeffs;
        std::fill(drift_conv.begin(), drift_conv.end(), 0.0);
        std::fill(stoch_conv.begin(), stoch_conv.end(), 0.0);

        for (int i = 0; i < block; ++i) {
            const int fine_idx = k * block + i;
            if (prop.factors) {
                kern.hadamard(sg.data(), prop.factors->data(), dim);
            } else {
                // fresh shift from the cell-left state: one interpolation
                model.semigroup.apply_span(static_cast<double>(i + 1) * df,
                                           {cell_left.coeffs.data(), dim}, {sg.data(), dim});
            }
            prop.advance(drift_conv);
            prop.advance(stoch_conv);
            if (freeze_semigroup) {
                prop.advance(drift_prop);
                kern.scale(tmp.data(), df, drift_prop.data(), dim);
                add_inplace(drift_conv, tmp);
                for (int j = 0; j < model.r; ++j) {
                    auto& pj = vol_prop[static_cast<std::size_t>(j)];
                    prop.advance(pj);
                    kern.axpy(stoch_conv.data(),
                              dB[static_cast<std::size_t>(j)][static_cast<std::size_t>(fine_idx)],
                              pj.data(), dim);
                }
            } else {
                add_inplace(drift_conv, drift_prop);
                for (int j = 0; j < model.r; ++j) {
                    kern.axpy(stoch_conv.data(),
                              dB[static_cast<std::size_t>(j)][static_cast<std::size_t>(fine_idx)],
                              vol_prop[static_cast<std::size_t>(j)].data(), dim);
                }
            }

            HVector state = HVector::zero(model.space);
            kern.add3(state.coeffs.data(), sg.data(), drift_conv.data(), stoch_conv.data(), dim);
            check_state(state.coeffs.data(), dim, traj.times[static_cast<std::size_t>(fine_idx + 1)],
                        lat);
            traj.states.push_back(std::move(state));
        }
        cell_left = traj.states.back();
    }
    return traj;
}

} // namespace

const char* scheme_tag_name(SchemeTag tag) {
    switch (tag) {
        case SchemeTag::EulerMaruyama: return "em";
        case SchemeTag::ExponentialEuler: return "ee";
        case SchemeTag::WongZakai: return "wz";
        case SchemeTag::Reference: return "ref";
    }
    return "?";
}

Trajectory euler_maruyama(const SPDEModel& model, const HVector& x0,
                          const BrownianLattice& lat, const SchemeConfig& cfg) {
    return integrate_frozen(model, x0, lat, cfg, false, SchemeTag::EulerMaruyama);
}

Trajectory exponential_euler(const SPDEModel& model, const HVector& x0,
                             const BrownianLattice& lat, const SchemeConfig& cfg) {
    return integrate_frozen(model, x0, lat, cfg, true, SchemeTag::ExponentialEuler);
}

Trajectory wong_zakai(const SPDEModel& model, const HVector& x0,
                      const BrownianLattice& lat, const SchemeConfig& cfg) {
    check_inputs(model, x0, lat, cfg);
    const int m = cfg.m;
    const int m_fine = lat.m_fine();
    const int block = m_fine / m;
    const int inner = cfg.inner_steps == 0 ? block : cfg.inner_steps;
    if (inner < 1 || inner % block != 0)
        throw ArgumentError("inner_steps must be a positive multiple of m_fine / m");
    const int sub_per_mon = inner / block;
    const double T = lat.horizon();
    const double dm = T / m;
    const double h = dm / inner;
    const std::size_t dim = static_cast<std::size_t>(model.space->dim);
    const auto& kern = kernels::active();

    Trajectory traj = make_trajectory(x0, lat, m, SchemeTag::WongZakai);
    const Propagator prop(model.semigroup, h);

    HVector xi = x0;
    std::vector<double> slope(static_cast<std::size_t>(model.r));
    Buf base(dim);
    HVector cur = HVector::zero(model.space);

    // F(x) = b(x) + sum_j sigma_j(x) * Bdot_j, the cell-frozen polygonal slope
    auto eval_f = [&](const HVector& x) {
        HVector f = model.drift(x);
        for (int j = 0; j < model.r; ++j) {
            const HVector sj = model.vols[static_cast<std::size_t>(j)](x);
            kern.axpy(f.coeffs.data(), slope[static_cast<std::size_t>(j)], sj.coeffs.data(), dim);
        }
        return f;
    };

    for (int k = 0; k < m; ++k) {
        for (int j = 1; j <= model.r; ++j)
            slope[static_cast<std::size_t>(j - 1)] =
                (lat.value_at_node(j, (k + 1) * block) - lat.value_at_node(j, k * block)) / dm;

        for (int i = 0; i < inner; ++i) {
            const HVector f0 = eval_f(xi);
            base = xi.coeffs;
            prop.advance(base);

            // predictor: exponential Euler over the substep
            HVector incr = model.semigroup.phi(h, f0);
            cur.coeffs = base;
            add_inplace(cur.coeffs, incr.coeffs);

            // corrector sweeps on the implicit trapezoidal mild rule
            double delta = 0.0;
            for (int sweep = 1; sweep <= kMaxSweeps; ++sweep) {
                HVector favg = eval_f(cur);
                add_inplace(favg.coeffs, f0.coeffs);
                kern.scale(favg.coeffs.data(), 0.5, favg.coeffs.data(), dim);
                HVector next = model.semigroup.phi(h, favg);
                add_inplace(next.coeffs, base);
                delta = kern.max_abs_diff(next.coeffs.data(), cur.coeffs.data(), dim);
                cur.coeffs = next.coeffs;
                if (sweep >= 2 && delta <= kInnerTol) break;
            }
            if (delta > 1e-6 * std::max(1.0, norm(cur))) {
                const double t_bad = static_cast<double>(k) * dm + (i + 1) * h;
                throw NumericError("inner fixed point did not converge", t_bad, lat.seed());
            }
            xi.coeffs = cur.coeffs;

            if ((i + 1) % sub_per_mon == 0) {
                const int fine_idx = k * block + (i + 1) / sub_per_mon;
                check_state(xi.coeffs.data(), dim, traj.times[static_cast<std::size_t>(fine_idx)],
                            lat);
                traj.states.push_back(xi);
            }
        }
    }
    return traj;
}

Trajectory reference_solution(const SPDEModel& model, const HVector& x0,
                              const BrownianLattice& lat) {
    SchemeConfig cfg;
    cfg.m = lat.m_fine();
    Trajectory traj = integrate_frozen(model, x0, lat, cfg, false, SchemeTag::Reference);
    return traj;
}

} // namespace wzsim
