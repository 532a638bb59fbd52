#pragma once

// Coupled Monte Carlo convergence studies: for each path one lattice drives
// the reference and every coarse resolution, so pathwise sup errors are
// meaningful. Accumulation is order-independent (per-path slots summed
// pairwise), which makes reports bit-identical for any worker count.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wzsim/model.hpp"
#include "wzsim/schemes.hpp"

namespace wzsim {

enum class StudyPair { WzVsRef, EmVsRef, WzVsEm };

const char* study_pair_name(StudyPair pair);

struct StudySpec {
    std::string model_name;                      // metadata echo
    std::function<SPDEModel()> make_model;       // factory; models are immutable
    HVector x0;
    double T = 1.0;
    double p = 2.0;                              // moment half-order, > 1
    std::vector<int> ms;                         // increasing divisors of m_fine
    int m_fine = 1024;
    int paths = 100;
    std::uint64_t base_seed = 0;
    StudyPair pair = StudyPair::WzVsRef;
    int inner_steps = 0;                         // WZ inner substeps; 0 = m_fine / m
    int workers = 1;
};

struct ConvergenceRow {
    int m = 0;
    double delta_m = 0.0;
    double estimate = 0.0; // mean of (sup_t |A - B|)^{2p}
    double stderr_ = 0.0;  // sample std / sqrt(paths)
    int paths = 0;
};

struct RateFit {
    double slope = 0.0;     // of log estimate vs log m
    double intercept = 0.0; // log estimate at m = 1
    double max_residual = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    RateFit fit;
    bool degenerate = false; // all estimates at the deterministic noise floor
    std::string pair;
    std::string model_name;
    double p = 0.0;
    double T = 0.0;
    int m_fine = 0;
    std::uint64_t base_seed = 0;
    std::string version;
    double wall_time_s = 0.0; // metadata only; not part of numeric identity
};

// One path's contribution: (max over shared monitoring times of the state
// space norm of A - B)^{2p}.
double sup_error_moment(const Trajectory& a, const Trajectory& b, const SPDEModel& model,
                        double p);

// Weighted least squares of log(estimate) on log(m); weights 1/(relative
// stderr)^2, equal weights when any stderr vanishes. Requires >= 3 points and
// positive estimates.
RateFit fit_rate(const std::vector<ConvergenceRow>& rows);

ConvergenceReport run_study(const StudySpec& spec);

// Deterministic, order-independent sum (recursive pairwise).
double pairwise_sum(std::span<const double> values);

} // namespace wzsim
