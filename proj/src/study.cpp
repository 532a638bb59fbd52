#include "wzsim/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include "wzsim/errors.hpp"
#include "wzsim/version.hpp"

namespace wzsim {
namespace {

constexpr double kDegenerateFloor = 1e-8; // deterministic inner tolerance

void validate_spec(const StudySpec& spec) {
    if (!(spec.p > 1.0)) throw ArgumentError("study requires p > 1 (rate p-1 vanishes at p = 1)");
    if (spec.ms.empty()) throw ArgumentError("study requires at least one m value");
    if (spec.paths < 1) throw ArgumentError("study requires at least one path");
    if (spec.workers < 1) throw ArgumentError("worker count must be positive");
    int prev = 0;
    for (int m : spec.ms) {
        if (m <= prev) throw ArgumentError("m list must be strictly increasing");
        if (spec.m_fine % m != 0) throw ArgumentError("every m must divide m_fine");
        prev = m;
    }
    if (spec.ms.back() > spec.m_fine / 4)
        throw ArgumentError("max(m) must be <= m_fine / 4 (reference separation)");
}

} // namespace

const char* study_pair_name(StudyPair pair) {
    switch (pair) {
        case StudyPair::WzVsRef: return "wz-vs-ref";
        case StudyPair::EmVsRef: return "em-vs-ref";
        case StudyPair::WzVsEm: return "wz-vs-em";
    }
    return "?";
}

double pairwise_sum(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double acc = 0.0;
        for (double v : values) acc += v;
        return acc;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(values.subspan(0, half)) + pairwise_sum(values.subspan(half));
}

double sup_error_moment(const Trajectory& a, const Trajectory& b, const SPDEModel& model,
                        double p) {
    if (a.times != b.times) throw StructuralError("monitoring grids differ");
    if (a.states.size() != b.states.size())
        throw StructuralError("trajectory lengths differ");
    double sup = 0.0;
    std::vector<double> diff(static_cast<std::size_t>(model.space->dim));
    for (std::size_t i = 0; i < a.states.size(); ++i) {
        require_same_space(a.states[i], b.states[i]);
        for (std::size_t c = 0; c < diff.size(); ++c)
            diff[c] = a.states[i].coeffs[c] - b.states[i].coeffs[c];
        sup = std::max(sup, norm_span(*model.space, diff));
    }
    return std::pow(sup, 2.0 * p);
}

RateFit fit_rate(const std::vector<ConvergenceRow>& rows) {
    if (rows.size() < 3) throw ArgumentError("rate fit requires at least three points");
    std::vector<double> x, y, w;
    bool equal_weights = false;
    for (const auto& r : rows) {
        if (!(r.estimate > 0.0)) throw ArgumentError("rate fit requires positive estimates");
        if (!(r.stderr_ > 0.0)) equal_weights = true;
    }
    for (const auto& r : rows) {
        x.push_back(std::log(static_cast<double>(r.m)));
        y.push_back(std::log(r.estimate));
        if (equal_weights) {
            w.push_back(1.0);
        } else {
            const double rel = r.stderr_ / r.estimate;
            w.push_back(1.0 / (rel * rel));
        }
    }
    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        swx += w[i] * x[i];
        swy += w[i] * y[i];
        swxx += w[i] * x[i] * x[i];
        swxy += w[i] * x[i] * y[i];
    }
    const double denom = sw * swxx - swx * swx;
    if (denom == 0.0) throw ArgumentError("rate fit is singular");
    RateFit fit;
    fit.slope = (sw * swxy - swx * swy) / denom;
    fit.intercept = (swy - fit.slope * swx) / sw;
    for (std::size_t i = 0; i < x.size(); ++i)
        fit.max_residual =
            std::max(fit.max_residual, std::fabs(y[i] - fit.intercept - fit.slope * x[i]));
    return fit;
}

ConvergenceReport run_study(const StudySpec& spec) {
    validate_spec(spec);
    const auto t0 = std::chrono::steady_clock::now();

    const SPDEModel model = spec.make_model();
    require_valid(spec.x0);
    if (!same_space(*spec.x0.space, *model.space))
        throw StructuralError("study x0 does not live in the model space");

    const std::size_t n_m = spec.ms.size();
    // per-path moment slots, indexed [m][path]; filled in path order
    std::vector<std::vector<double>> moments(n_m,
                                             std::vector<double>(static_cast<std::size_t>(spec.paths)));

    const bool need_ref = spec.pair != StudyPair::WzVsEm;

    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto run_path = [&](int path) {
        const std::uint64_t seed = path_seed(spec.base_seed, static_cast<std::uint64_t>(path));
        const BrownianLattice lat(model.r, spec.T, spec.m_fine, seed);
        Trajectory ref;
        if (need_ref) ref = reference_solution(model, spec.x0, lat);
        for (std::size_t im = 0; im < n_m; ++im) {
            SchemeConfig cfg;
            cfg.m = spec.ms[im];
            cfg.inner_steps = spec.inner_steps;
            double moment = 0.0;
            switch (spec.pair) {
                case StudyPair::WzVsRef:
                    moment = sup_error_moment(wong_zakai(model, spec.x0, lat, cfg), ref, model,
                                              spec.p);
                    break;
                case StudyPair::EmVsRef:
                    moment = sup_error_moment(euler_maruyama(model, spec.x0, lat, cfg), ref,
                                              model, spec.p);
                    break;
                case StudyPair::WzVsEm: {
                    const Trajectory wz = wong_zakai(model, spec.x0, lat, cfg);
                    const Trajectory em = euler_maruyama(model, spec.x0, lat, cfg);
                    moment = sup_error_moment(wz, em, model, spec.p);
                    break;
                }
            }
            moments[im][static_cast<std::size_t>(path)] = moment;
        }
    };

    auto worker = [&](int worker_id) {
        try {
            for (int path = worker_id; path < spec.paths; path += spec.workers) {
                {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (failure) return;
                }
                run_path(path);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    };

    if (spec.workers == 1) {
        worker(0);
    } else {
        std::vector<std::thread> threads;
        for (int w = 0; w < spec.workers; ++w) threads.emplace_back(worker, w);
        for (auto& t : threads) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    ConvergenceReport report;
    report.pair = study_pair_name(spec.pair);
    report.model_name = spec.model_name;
    report.p = spec.p;
    report.T = spec.T;
    report.m_fine = spec.m_fine;
    report.base_seed = spec.base_seed;
    report.version = kVersion;

    const double inv_paths = 1.0 / static_cast<double>(spec.paths);
    for (std::size_t im = 0; im < n_m; ++im) {
        ConvergenceRow row;
        row.m = spec.ms[im];
        row.delta_m = spec.T / row.m;
        row.paths = spec.paths;
        row.estimate = pairwise_sum(moments[im]) * inv_paths;
        if (spec.paths > 1) {
            std::vector<double> sq(moments[im].size());
            for (std::size_t i = 0; i < sq.size(); ++i) {
                const double d = moments[im][i] - row.estimate;
                sq[i] = d * d;
            }
            const double var = pairwise_sum(sq) / static_cast<double>(spec.paths - 1);
            row.stderr_ = std::sqrt(var * inv_paths);
        }
        report.rows.push_back(row);
    }

    double max_estimate = 0.0;
    for (const auto& r : report.rows) max_estimate = std::max(max_estimate, r.estimate);
    report.degenerate = max_estimate <= std::pow(kDegenerateFloor, 2.0 * spec.p);
    if (!report.degenerate && report.rows.size() >= 3) report.fit = fit_rate(report.rows);

    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

} // namespace wzsim
