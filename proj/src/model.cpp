#include "wzsim/model.hpp"

#include <cmath>

#include "wzsim/errors.hpp"
#include "wzsim/noise.hpp"

namespace wzsim {
namespace {

// deterministic standard normals for probe vectors
double probe_normal(std::uint64_t& state) {
    state = splitmix64(state);
    const double u1 = 1.0 - static_cast<double>(state >> 11) * 0x1.0p-53;
    state = splitmix64(state);
    const double u2 = static_cast<double>(state >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

HVector default_probe(const SpacePtr& space, std::uint64_t index) {
    std::uint64_t state = splitmix64(0xABCDEF0123456789ULL ^ index);
    HVector v = HVector::zero(space);
    for (std::size_t k = 0; k < v.coeffs.size(); ++k)
        v.coeffs[k] = probe_normal(state) / (1.0 + static_cast<double>(k));
    return v;
}

} // namespace

HVector SPDEModel::probe(std::uint64_t index) const {
    if (probe_sampler) return probe_sampler(index);
    return default_probe(space, index);
}

HVector stratonovich_correction(const SPDEModel& model, const HVector& x) {
    require_valid(x);
    if (!same_space(*x.space, *model.space)) throw StructuralError("model/vector space mismatch");
    HVector acc = HVector::zero(model.space);
    for (int j = 0; j < model.r; ++j) {
        const HVector sj = model.vols[static_cast<std::size_t>(j)](x);
        const HVector dj = model.vol_jacobians[static_cast<std::size_t>(j)](x, sj);
        acc = add(acc, dj);
    }
    return acc;
}

HVector drift_hat(const SPDEModel& model, const HVector& x) {
    return add(model.drift(x), scale(0.5, stratonovich_correction(model, x)));
}

bool ValidationReport::pass() const {
    for (const auto& p : probes)
        if (!p.pass) return false;
    return true;
}

ValidationReport validate_model(const SPDEModel& model) {
    ValidationReport report;
    report.model_name = model.name;
    constexpr int kProbes = 16;
    constexpr double fd_step = 1e-5;

    try {
        // Jacobian action vs central finite differences of sigma_j.
        double worst_fd = 0.0;
        for (int i = 0; i < kProbes; ++i) {
            const HVector x = model.probe(static_cast<std::uint64_t>(i));
            const HVector h = model.probe(static_cast<std::uint64_t>(1000 + i));
            const double hn = norm(h);
            if (hn == 0.0) continue;
            const HVector dir = scale(1.0 / hn, h);
            for (int j = 0; j < model.r; ++j) {
                const auto& sigma = model.vols[static_cast<std::size_t>(j)];
                const HVector fplus = sigma(add(x, scale(fd_step, dir)));
                const HVector fminus = sigma(sub(x, scale(fd_step, dir)));
                const HVector fd = scale(0.5 / fd_step, sub(fplus, fminus));
                const HVector an = model.vol_jacobians[static_cast<std::size_t>(j)](x, dir);
                const double scale_ref = std::max(norm(an), 1e-12);
                worst_fd = std::max(worst_fd, norm(sub(fd, an)) / scale_ref);
            }
        }
        report.probes.push_back({"jacobian_vs_fd", worst_fd < 1e-5, worst_fd, 1e-5, ""});

        // Linearity of the Jacobian action in the direction.
        double worst_lin = 0.0;
        for (int i = 0; i < kProbes; ++i) {
            const HVector x = model.probe(static_cast<std::uint64_t>(2000 + i));
            const HVector h1 = model.probe(static_cast<std::uint64_t>(3000 + i));
            const HVector h2 = model.probe(static_cast<std::uint64_t>(4000 + i));
            const double alpha = 0.7306041844 + 0.01 * i;
            for (int j = 0; j < model.r; ++j) {
                const auto& dj = model.vol_jacobians[static_cast<std::size_t>(j)];
                const HVector lhs = dj(x, add(scale(alpha, h1), h2));
                const HVector rhs = add(scale(alpha, dj(x, h1)), dj(x, h2));
                const double ref = std::max(norm(rhs), 1e-12);
                worst_lin = std::max(worst_lin, norm(sub(lhs, rhs)) / ref);
            }
        }
        report.probes.push_back({"jacobian_linearity", worst_lin < 1e-10, worst_lin, 1e-10, ""});

        // Coefficient maps must be pure: repeated calls agree bit-for-bit.
        bool deterministic = true;
        {
            const HVector x = model.probe(5000);
            const HVector b1 = model.drift(x), b2 = model.drift(x);
            deterministic = deterministic && (b1.coeffs == b2.coeffs);
            for (int j = 0; j < model.r; ++j) {
                const auto& sigma = model.vols[static_cast<std::size_t>(j)];
                const HVector s1 = sigma(x), s2 = sigma(x);
                deterministic = deterministic && (s1.coeffs == s2.coeffs);
            }
        }
        report.probes.push_back({"repeat_call_determinism", deterministic,
                                 deterministic ? 0.0 : 1.0, 0.0, ""});

        // Sampled Lipschitz ratios of the vols (reported; bounded when declared).
        double worst_sigma_lip = 0.0;
        for (int i = 0; i < kProbes; ++i) {
            const HVector x = model.probe(static_cast<std::uint64_t>(6000 + i));
            const HVector y = model.probe(static_cast<std::uint64_t>(7000 + i));
            const double dxy = norm(sub(x, y));
            if (dxy < 1e-12) continue;
            for (int j = 0; j < model.r; ++j) {
                const auto& sigma = model.vols[static_cast<std::size_t>(j)];
                worst_sigma_lip =
                    std::max(worst_sigma_lip, norm(sub(sigma(x), sigma(y))) / dxy);
            }
        }
        {
            const bool ok = !model.bounds.declared ||
                            worst_sigma_lip <= 1.1 * model.bounds.sigma_bound;
            report.probes.push_back({"sigma_lipschitz_ratio", ok, worst_sigma_lip,
                                     model.bounds.declared ? 1.1 * model.bounds.sigma_bound : 0.0,
                                     model.bounds.declared ? "" : "reported only"});
        }

        // Stratonovich correction: |rho| <= r C^2 and sampled Lipschitz ratio
        // <= 2 r C^2 (10% slack) for declared bounds.
        double worst_rho = 0.0, worst_rho_lip = 0.0;
        for (int i = 0; i < kProbes; ++i) {
            const HVector x = model.probe(static_cast<std::uint64_t>(8000 + i));
            const HVector y = model.probe(static_cast<std::uint64_t>(9000 + i));
            const HVector rx = stratonovich_correction(model, x);
            worst_rho = std::max(worst_rho, norm(rx));
            const double dxy = norm(sub(x, y));
            if (dxy >= 1e-12) {
                const HVector ry = stratonovich_correction(model, y);
                worst_rho_lip = std::max(worst_rho_lip, norm(sub(rx, ry)) / dxy);
            }
        }
        if (model.bounds.declared) {
            const double c2 = model.bounds.sigma_bound * model.bounds.sigma_bound;
            report.probes.push_back({"rho_bound", worst_rho <= model.r * c2 * 1.000001,
                                     worst_rho, model.r * c2, ""});
            report.probes.push_back({"rho_lipschitz", worst_rho_lip <= 2.0 * model.r * c2 * 1.1,
                                     worst_rho_lip, 2.2 * model.r * c2, ""});
        } else {
            report.probes.push_back({"rho_bound", true, worst_rho, 0.0, "reported only"});
            report.probes.push_back({"rho_lipschitz", true, worst_rho_lip, 0.0, "reported only"});
        }

        // drift_hat is exactly b + rho/2 (bit-equal recomputation).
        {
            const HVector x = model.probe(10000);
            const HVector direct =
                add(model.drift(x), scale(0.5, stratonovich_correction(model, x)));
            const bool same = drift_hat(model, x).coeffs == direct.coeffs;
            report.probes.push_back({"drift_hat_consistency", same, same ? 0.0 : 1.0, 0.0, ""});
        }
    } catch (const std::exception& e) {
        report.probes.push_back({"probe_exception", false, 0.0, 0.0, e.what()});
    }
    return report;
}

} // namespace wzsim
