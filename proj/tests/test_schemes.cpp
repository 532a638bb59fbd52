#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "wzsim/builtin_models.hpp"
#include "wzsim/errors.hpp"
#include "wzsim/schemes.hpp"

using namespace wzsim;

namespace {

SPDEModel constant_drift_model(int dim) {
    // b(x) = w (state-independent), sigma = 0: both schemes integrate the
    // deterministic convolution exactly
    SPDEModel model = make_heat_model({dim, 1, 0.0}, 0.0);
    model.name = "heat-const-drift";
    const SpacePtr space = model.space;
    HVector w = HVector::zero(space);
    for (int k = 0; k < dim; ++k) w.coeffs[static_cast<std::size_t>(k)] = 0.1 / (k + 1);
    model.drift = [w](const HVector&) { return w; };
    return model;
}

double sup_diff(const Trajectory& a, const Trajectory& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.states.size(); ++i)
        worst = std::max(worst, norm(sub(a.states[i], b.states[i])));
    return worst;
}

} // namespace

TEST_CASE("pure semigroup flow when b = 0 and sigma = 0") {
    const SPDEModel model = make_heat_model({6, 1, 0.0}, 0.0);
    const HVector x0 = default_spectral_x0(model.space);
    const auto lat = BrownianLattice::zero(1, 1.0, 64);
    SchemeConfig cfg;
    cfg.m = 8;
    for (const Trajectory& traj : {euler_maruyama(model, x0, lat, cfg),
                                   exponential_euler(model, x0, lat, cfg),
                                   wong_zakai(model, x0, lat, cfg)}) {
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            const HVector flow = model.semigroup.apply(traj.times[i], x0);
            CHECK(norm(sub(traj.states[i], flow)) <= 1e-12);
        }
    }
}

TEST_CASE("A = 0 additive case telescopes exactly") {
    // dim-1 space with zero eigenvalue, constant sigma, b = 0:
    // Y(t) = x0 + sigma B(t) at every monitoring time
    SPDEModel model = make_geometric_model(0.0);
    const SpacePtr space = model.space;
    const double sigma = 0.7;
    model.vols[0] = [space, sigma](const HVector&) { return HVector{space, {sigma}}; };
    model.vol_jacobians[0] = [space](const HVector&, const HVector&) {
        return HVector::zero(space);
    };
    const BrownianLattice lat(1, 1.0, 128, 2024);
    const HVector x0{space, {1.0}};
    SchemeConfig cfg;
    cfg.m = 8;
    const Trajectory traj = euler_maruyama(model, x0, lat, cfg);
    for (int i = 0; i <= 128; ++i) {
        const double expected = 1.0 + sigma * lat.value_at_node(1, i);
        CHECK(traj.states[static_cast<std::size_t>(i)].coeffs[0] ==
              doctest::Approx(expected).epsilon(1e-13));
    }
}

TEST_CASE("terminal mean of the additive OU model") {
    const SPDEModel model = make_heat_model({2, 1, 0.3}, 0.0);
    const HVector x0 = default_spectral_x0(model.space);
    const double T = 1.0;
    const int paths = 10000, m_fine = 64;
    std::vector<double> mean(2, 0.0), sq(2, 0.0);
    SchemeConfig cfg;
    cfg.m = m_fine;
    for (int pth = 0; pth < paths; ++pth) {
        const BrownianLattice lat(1, T, m_fine, path_seed(4242, static_cast<std::uint64_t>(pth)));
        const Trajectory traj = euler_maruyama(model, x0, lat, cfg);
        for (int k = 0; k < 2; ++k) {
            const double v = traj.states.back().coeffs[static_cast<std::size_t>(k)];
            mean[static_cast<std::size_t>(k)] += v;
            sq[static_cast<std::size_t>(k)] += v * v;
        }
    }
    for (int k = 0; k < 2; ++k) {
        const double mk = mean[static_cast<std::size_t>(k)] / paths;
        const double var = sq[static_cast<std::size_t>(k)] / paths - mk * mk;
        const double se = std::sqrt(var / paths);
        const double lambda = model.space->eigenvalues[static_cast<std::size_t>(k)];
        const double expected = std::exp(lambda * T) * x0.coeffs[static_cast<std::size_t>(k)];
        CHECK(std::fabs(mk - expected) <= 3.0 * se);
    }
}

TEST_CASE("exponential Euler coincides with EM when A = 0") {
    SPDEModel model = make_geometric_model(0.4);
    const HVector x0{model.space, {1.0}};
    const BrownianLattice lat(1, 1.0, 64, 99);
    SchemeConfig cfg;
    cfg.m = 4;
    const Trajectory em = euler_maruyama(model, x0, lat, cfg);
    const Trajectory ee = exponential_euler(model, x0, lat, cfg);
    for (std::size_t i = 0; i < em.states.size(); ++i)
        CHECK(em.states[i].coeffs == ee.states[i].coeffs); // bit-for-bit
}

TEST_CASE("EM and EE converge together as m grows") {
    const SPDEModel model = make_heat_model({8, 1, 0.3}, 0.0);
    const HVector x0 = default_spectral_x0(model.space);
    double prev = 1e100;
    for (int m : {4, 16, 64}) {
        double acc = 0.0;
        for (int pth = 0; pth < 8; ++pth) {
            const BrownianLattice lat(1, 1.0, 256,
                                      path_seed(555, static_cast<std::uint64_t>(pth)));
            SchemeConfig cfg;
            cfg.m = m;
            acc += sup_diff(euler_maruyama(model, x0, lat, cfg),
                            exponential_euler(model, x0, lat, cfg));
        }
        CHECK(acc < prev);
        prev = acc;
    }
}

TEST_CASE("noise-free degeneracy of all three schemes") {
    const SPDEModel model = make_heat_model({8, 2, 0.3}, 0.0);
    const HVector x0 = default_spectral_x0(model.space);
    const auto lat = BrownianLattice::zero(2, 1.0, 256);
    SchemeConfig cfg;
    cfg.m = 4;
    cfg.inner_steps = 64;
    const Trajectory em = euler_maruyama(model, x0, lat, cfg);
    const Trajectory ee = exponential_euler(model, x0, lat, cfg);
    const Trajectory wz = wong_zakai(model, x0, lat, cfg);
    CHECK(sup_diff(em, ee) <= 1e-8);
    CHECK(sup_diff(em, wz) <= 1e-8);

    // nonzero constant drift: the per-cell convolution is exact in all schemes
    const SPDEModel cmodel = constant_drift_model(8);
    const Trajectory cem = euler_maruyama(cmodel, x0, lat, cfg);
    const Trajectory cwz = wong_zakai(cmodel, x0, lat, cfg);
    CHECK(sup_diff(cem, cwz) <= 1e-10);
}

TEST_CASE("wong-zakai geometric oracle") {
    const double sigma = 0.3, T = 1.0;
    const SPDEModel model = make_geometric_model(sigma);
    const HVector x0{model.space, {1.0}};
    const int m_fine = 1024, paths = 40;

    std::vector<double> err16, err64;
    for (int pth = 0; pth < paths; ++pth) {
        const BrownianLattice lat(1, T, m_fine,
                                  path_seed(31415, static_cast<std::uint64_t>(pth)));
        const double oracle = std::exp(sigma * lat.value_at_node(1, m_fine));
        for (int m : {16, 64}) {
            SchemeConfig cfg;
            cfg.m = m;
            cfg.inner_steps = m_fine / 16; // same substep count per cell for both m
            const Trajectory wz = wong_zakai(model, x0, lat, cfg);
            const double rel = std::fabs(wz.states.back().coeffs[0] - oracle) / oracle;
            (m == 16 ? err16 : err64).push_back(rel);
        }
    }
    std::sort(err16.begin(), err16.end());
    std::sort(err64.begin(), err64.end());
    const double med16 = err16[paths / 2];
    const double med64 = err64[paths / 2];
    CHECK(med64 < 0.05);
    CHECK(med64 < med16); // inner error shrinks with m at fixed resolution

    // negative control: integrating b_hat = sigma^2 x / 2 inside the WZ PDE
    // converges to the wrong limit x0 exp(sigma B + sigma^2 T / 2)
    SPDEModel wrong = model;
    wrong.drift = [&model](const HVector& x) { return drift_hat(model, x); };
    double control = 0.0;
    for (int pth = 0; pth < paths; ++pth) {
        const BrownianLattice lat(1, T, m_fine,
                                  path_seed(31415, static_cast<std::uint64_t>(pth)));
        const double oracle = std::exp(sigma * lat.value_at_node(1, m_fine));
        SchemeConfig cfg;
        cfg.m = 64;
        const Trajectory wz = wong_zakai(wrong, x0, lat, cfg);
        control += std::fabs(wz.states.back().coeffs[0] - oracle) / oracle;
    }
    control /= paths;
    CHECK(control > 3.0 * med64);
    CHECK(control == doctest::Approx(std::exp(0.5 * sigma * sigma * T) - 1.0).epsilon(0.05));
}

TEST_CASE("additive noise couples WZ to EM") {
    const SPDEModel model = make_heat_model({8, 1, 0.3}, 0.0);
    const HVector x0 = default_spectral_x0(model.space);
    double prev = 1e100;
    for (int m : {4, 16, 64}) {
        double acc = 0.0;
        for (int pth = 0; pth < 8; ++pth) {
            const BrownianLattice lat(1, 1.0, 256,
                                      path_seed(808, static_cast<std::uint64_t>(pth)));
            SchemeConfig cfg;
            cfg.m = m;
            acc += sup_diff(wong_zakai(model, x0, lat, cfg),
                            euler_maruyama(model, x0, lat, cfg));
        }
        CHECK(acc < prev);
        prev = acc;
    }
}

TEST_CASE("reference solution sanity") {
    const double sigma = 0.3;
    const SPDEModel model = make_geometric_model(sigma);
    const HVector x0{model.space, {1.0}};
    std::vector<double> rel;
    for (int pth = 0; pth < 30; ++pth) {
        const BrownianLattice lat(1, 1.0, 4096,
                                  path_seed(2718, static_cast<std::uint64_t>(pth)));
        const double oracle = std::exp(sigma * lat.value_at_node(1, 4096));
        const Trajectory ref = reference_solution(model, x0, lat);
        rel.push_back(std::fabs(ref.states.back().coeffs[0] - oracle) / oracle);
    }
    std::sort(rel.begin(), rel.end());
    CHECK(rel[rel.size() / 2] < 0.01); // median relative error below 1%
}

TEST_CASE("reference refinement is subdominant") {
    const SPDEModel model = make_nemytskii_heat_model({8, 1, 0.4});
    const HVector x0 = default_spectral_x0(model.space);
    double ref_gap = 0.0, scheme_err = 0.0;
    for (int pth = 0; pth < 10; ++pth) {
        const BrownianLattice lat(1, 1.0, 1024,
                                  path_seed(1618, static_cast<std::uint64_t>(pth)));
        const Trajectory fine = reference_solution(model, x0, lat);
        SchemeConfig half;
        half.m = 512;
        SchemeConfig coarse;
        coarse.m = 64;
        ref_gap += std::pow(sup_diff(euler_maruyama(model, x0, lat, half), fine), 4);
        scheme_err += std::pow(sup_diff(euler_maruyama(model, x0, lat, coarse), fine), 4);
    }
    CHECK(ref_gap < scheme_err);
}

TEST_CASE("trajectories are deterministic and cells are Markov") {
    const SPDEModel model = make_nemytskii_heat_model({8, 1, 0.4});
    const HVector x0 = default_spectral_x0(model.space);
    const BrownianLattice lat(1, 1.0, 64, 77);
    SchemeConfig cfg;
    cfg.m = 4;
    const Trajectory a = euler_maruyama(model, x0, lat, cfg);
    const Trajectory b = euler_maruyama(model, x0, lat, cfg);
    for (std::size_t i = 0; i < a.states.size(); ++i)
        CHECK(a.states[i].coeffs == b.states[i].coeffs);

    // restart from the midpoint cell boundary on the remaining increments:
    // the recursion reproduces the stored states bit-for-bit
    const int half_nodes = 32;
    std::vector<std::vector<double>> tail(1);
    const auto fine = lat.fine_increments(1);
    tail[0].assign(fine.begin() + half_nodes, fine.end());
    const auto tail_lat = BrownianLattice::from_increments(0.5, std::move(tail));
    SchemeConfig cfg2;
    cfg2.m = 2;
    const Trajectory restarted =
        euler_maruyama(model, a.states[half_nodes], tail_lat, cfg2);
    for (std::size_t i = 0; i < restarted.states.size(); ++i)
        CHECK(restarted.states[i].coeffs == a.states[half_nodes + i].coeffs);
}

TEST_CASE("blow-up aborts with a numeric error") {
    const SPDEModel model = make_geometric_model(40.0);
    const HVector x0{model.space, {1.0}};
    std::vector<std::vector<double>> inc(1, std::vector<double>(64, 1.0)); // B(T) = 64
    const auto lat = BrownianLattice::from_increments(1.0, std::move(inc));
    SchemeConfig cfg;
    cfg.m = 8;
    CHECK_THROWS_AS((void)euler_maruyama(model, x0, lat, cfg), NumericError);
}

TEST_CASE("graph-norm of WZ paths stays bounded in m") {
    // E[sup_t |xi_m|_{D(A)}^2] obeys a delta^{-(q+1)} envelope in general; on
    // a fixed spectral truncation |A| is bounded and the sup must stay
    // m-uniformly bounded -- a cheap guard against spurious stiffness in the
    // inner integrator.
    const SPDEModel model = make_nemytskii_heat_model({8, 1, 0.4});
    const HVector x0 = default_spectral_x0(model.space);
    double worst = 0.0;
    for (int m : {4, 16, 64}) {
        double acc = 0.0;
        for (int pth = 0; pth < 6; ++pth) {
            const BrownianLattice lat(1, 1.0, 256,
                                      path_seed(4711, static_cast<std::uint64_t>(pth)));
            SchemeConfig cfg;
            cfg.m = m;
            const Trajectory wz = wong_zakai(model, x0, lat, cfg);
            double sup = 0.0;
            for (const auto& s : wz.states) sup = std::max(sup, graph_norm(s, model.semigroup));
            acc += sup * sup;
        }
        worst = std::max(worst, acc / 6.0);
    }
    // |A x0| ~ 8 on this truncation; anything runaway would be orders larger
    CHECK(worst < 100.0);
}

TEST_CASE("config validation") {
    const SPDEModel model = make_geometric_model(0.3);
    const HVector x0{model.space, {1.0}};
    const BrownianLattice lat(1, 1.0, 64, 1);
    SchemeConfig cfg;
    cfg.m = 3; // not a divisor of 64
    CHECK_THROWS_AS((void)euler_maruyama(model, x0, lat, cfg), ArgumentError);
    cfg.m = 4;
    cfg.inner_steps = 24; // not a multiple of m_fine / m = 16
    CHECK_THROWS_AS((void)wong_zakai(model, x0, lat, cfg), ArgumentError);
}
