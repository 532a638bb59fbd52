#include "wzsim/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "wzsim/builtin_models.hpp"
#include "wzsim/errors.hpp"
#include "wzsim/hjmm.hpp"
#include "wzsim/noise.hpp"
#include "wzsim/version.hpp"

namespace wzsim {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string out_path(const OutputBlock& out, const std::string& suffix) {
    fs::create_directories(out.dir);
    return (fs::path(out.dir) / (out.prefix + suffix)).string();
}

Trajectory run_scheme(const std::string& name, const SPDEModel& model, const HVector& x0,
                      const BrownianLattice& lat, const SchemeConfig& cfg) {
    if (name == "wz") return wong_zakai(model, x0, lat, cfg);
    if (name == "em") return euler_maruyama(model, x0, lat, cfg);
    if (name == "ee") return exponential_euler(model, x0, lat, cfg);
    if (name == "ref") return reference_solution(model, x0, lat);
    throw ConfigError("unknown scheme '" + name + "'");
}

} // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const std::string& model_name, std::uint64_t seed) {
    os << "# wzsim trajectory\n";
    os << "# scheme=" << scheme_tag_name(traj.tag) << " m=" << traj.m << " seed=" << seed
       << " model=" << model_name << "\n";
    os << "time";
    const int dim = traj.states.empty() ? 0 : traj.states.front().dim();
    for (int c = 0; c < dim; ++c) os << ",coeff_" << c;
    os << "\n";
    os.precision(17);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        os << traj.times[i];
        for (double v : traj.states[i].coeffs) os << ',' << v;
        os << "\n";
    }
}

json report_to_json(const ConvergenceReport& report) {
    json rows = json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"m", r.m},
                        {"delta_m", r.delta_m},
                        {"estimate", r.estimate},
                        {"stderr", r.stderr_},
                        {"paths", r.paths}});
    }
    json doc = {
        {"model", report.model_name},
        {"pair", report.pair},
        {"p", report.p},
        {"T", report.T},
        {"m_fine", report.m_fine},
        {"base_seed", report.base_seed},
        {"rows", rows},
        {"degenerate", report.degenerate},
        {"version", report.version},
        {"wall_time_s", report.wall_time_s},
    };
    if (!report.degenerate) {
        doc["fit"] = {{"slope", report.fit.slope},
                      {"intercept", report.fit.intercept},
                      {"max_residual", report.fit.max_residual}};
    }
    return doc;
}

void write_report_csv(std::ostream& os, const ConvergenceReport& report) {
    os << "m,delta_m,estimate,stderr,paths\n";
    os.precision(17);
    for (const auto& r : report.rows)
        os << r.m << ',' << r.delta_m << ',' << r.estimate << ',' << r.stderr_ << ','
           << r.paths << "\n";
}

CommandResult cmd_simulate(const ExperimentConfig& cfg, int workers) {
    (void)workers; // simulate runs a single lattice
    BuiltModel built = build_model(cfg);
    const BrownianLattice lat =
        cfg.monte_carlo.zero_noise
            ? BrownianLattice::zero(built.model.r, cfg.scheme.T, cfg.scheme.m_fine)
            : BrownianLattice(built.model.r, cfg.scheme.T, cfg.scheme.m_fine,
                              cfg.monte_carlo.base_seed);
    SchemeConfig scfg;
    scfg.m = cfg.scheme.ms.front();
    scfg.inner_steps = cfg.scheme.inner_steps;

    CommandResult result;
    for (const auto& name : cfg.scheme.schemes) {
        const Trajectory traj = run_scheme(name, built.model, built.x0, lat, scfg);
        const std::string path = out_path(cfg.output, "_" + name + ".csv");
        std::ofstream os(path);
        if (!os) throw ConfigError("cannot write '" + path + "'");
        write_trajectory_csv(os, traj, built.model.name, cfg.monte_carlo.base_seed);
        result.files_written.push_back(path);

        if (cfg.output.bond_prices && built.model.name == "hjmm") {
            hjmm::ForwardCurve terminal;
            double v = 0.0;
            hjmm::unpack_state(built.model, traj.states.back(), terminal, v);
            const std::string bpath = out_path(cfg.output, "_" + name + "_bonds.csv");
            std::ofstream bos(bpath);
            if (!bos) throw ConfigError("cannot write '" + bpath + "'");
            hjmm::bond_prices_csv(terminal, bos);
            result.files_written.push_back(bpath);
        }
    }
    return result;
}

StudySpec study_spec_from_config(const ExperimentConfig& cfg, int workers) {
    if (cfg.monte_carlo.zero_noise)
        throw ConfigError("zero_noise is only supported by simulate");
    StudySpec spec;
    spec.model_name = cfg.model.name;
    spec.make_model = [cfg]() { return build_model(cfg).model; };
    spec.x0 = build_model(cfg).x0;
    spec.T = cfg.scheme.T;
    spec.p = cfg.scheme.p;
    spec.ms = cfg.scheme.ms;
    spec.m_fine = cfg.scheme.m_fine;
    spec.paths = cfg.monte_carlo.paths;
    spec.base_seed = cfg.monte_carlo.base_seed;
    spec.pair = cfg.scheme.pair.value_or(StudyPair::WzVsRef);
    spec.inner_steps = cfg.scheme.inner_steps;
    spec.workers = workers;
    return spec;
}

CommandResult cmd_converge(const ExperimentConfig& cfg, int workers) {
    ConvergenceReport report;
    if (cfg.synthetic) {
        // self-test mode: injected power-law errors, no simulation
        report.model_name = "synthetic";
        report.pair = "synthetic";
        report.p = cfg.scheme.p;
        report.T = cfg.scheme.T;
        report.m_fine = cfg.scheme.m_fine;
        report.base_seed = cfg.monte_carlo.base_seed;
        report.version = kVersion;
        for (int m : cfg.scheme.ms) {
            ConvergenceRow row;
            row.m = m;
            row.delta_m = cfg.scheme.T / m;
            row.estimate = cfg.synthetic->coefficient *
                           std::pow(static_cast<double>(m), cfg.synthetic->exponent);
            row.stderr_ = 0.0;
            row.paths = 0;
            report.rows.push_back(row);
        }
        report.fit = fit_rate(report.rows);
    } else {
        try {
            report = run_study(study_spec_from_config(cfg, workers));
        } catch (const ArgumentError& e) {
            throw ConfigError(e.what());
        }
    }

    for (const auto& r : report.rows)
        std::cout << "m=" << r.m << " delta_m=" << r.delta_m << " estimate=" << r.estimate
                  << " stderr=" << r.stderr_ << "\n";
    if (report.degenerate)
        std::cout << "slope: degenerate (estimates at the deterministic floor)\n";
    else
        std::cout << "fitted slope = " << report.fit.slope << "\n";

    CommandResult result;
    {
        const std::string path = out_path(cfg.output, "_report.json");
        std::ofstream os(path);
        if (!os) throw ConfigError("cannot write '" + path + "'");
        os << report_to_json(report).dump(2) << "\n";
        result.files_written.push_back(path);
    }
    {
        const std::string path = out_path(cfg.output, "_per_m.csv");
        std::ofstream os(path);
        if (!os) throw ConfigError("cannot write '" + path + "'");
        write_report_csv(os, report);
        result.files_written.push_back(path);
    }
    return result;
}

namespace {

json validate_one_model(const SPDEModel& model) {
    json probes = json::array();
    const ValidationReport vr = validate_model(model);
    for (const auto& p : vr.probes) {
        probes.push_back({{"name", p.name},
                          {"pass", p.pass},
                          {"measured", p.measured},
                          {"limit", p.limit},
                          {"note", p.note}});
    }

    // semigroup law on sampled (t1, t2, v)
    double worst_law = 0.0;
    const bool diagonal = model.semigroup.step_factors(0.1).has_value();
    const double law_tol = diagonal ? 1e-10 : 2e-2; // interpolation tolerance for grid shifts
    for (int i = 0; i < 6; ++i) {
        const HVector v = model.probe(static_cast<std::uint64_t>(20000 + i));
        const double t1 = 0.05 + 0.11 * i, t2 = 0.21 + 0.07 * i;
        const HVector two_step = model.semigroup.apply(t1, model.semigroup.apply(t2, v));
        const HVector one_step = model.semigroup.apply(t1 + t2, v);
        worst_law = std::max(worst_law, norm(sub(two_step, one_step)) / (1.0 + norm(v)));
    }
    const bool law_ok = worst_law <= law_tol;

    bool contractive_ok = true;
    bool contractive_applicable = false;
    if (model.space->kind == SpaceKind::Spectral) {
        bool nonpositive = true;
        for (double l : model.space->eigenvalues) nonpositive = nonpositive && l <= 0.0;
        if (nonpositive) {
            contractive_applicable = true;
            for (int i = 0; i < 6 && contractive_ok; ++i) {
                const HVector v = model.probe(static_cast<std::uint64_t>(30000 + i));
                contractive_ok =
                    norm(model.semigroup.apply(0.3 + 0.2 * i, v)) <= norm(v) * (1.0 + 1e-12);
            }
        }
    }

    return json{{"name", model.name},
                {"pass", vr.pass() && law_ok && (!contractive_applicable || contractive_ok)},
                {"probes", probes},
                {"semigroup_law",
                 {{"pass", law_ok}, {"worst", worst_law}, {"limit", law_tol}}},
                {"contraction",
                 {{"applicable", contractive_applicable}, {"pass", contractive_ok}}}};
}

json moment_suite() {
    // Gaussian even-moment identities: E|N(0,1)|^{2q} = 1, 3, 15 for q = 1,2,3
    const double e1 = gaussian_even_moment(1.0, 1.0);
    const double e2 = gaussian_even_moment(2.0, 1.0);
    const double e3 = gaussian_even_moment(3.0, 1.0);
    const bool exact_ok = std::fabs(e1 - 1.0) <= 1e-12 && std::fabs(e2 - 3.0) <= 1e-12 &&
                          std::fabs(e3 - 15.0) <= 1e-12;

    // increment moment check: MC mean of dB^2 over cells vs delta, 3 SE
    const int m = 64, seeds = 400;
    const double T = 1.0, delta = T / m;
    double acc = 0.0, acc2 = 0.0;
    int n = 0;
    for (int s = 0; s < seeds; ++s) {
        const BrownianLattice lat(1, T, m, path_seed(777, static_cast<std::uint64_t>(s)));
        for (double dB : lat.coarsen(1, m)) {
            acc += dB * dB;
            acc2 += dB * dB * dB * dB;
            ++n;
        }
    }
    const double mean = acc / n;
    const double var = acc2 / n - mean * mean;
    const double se = std::sqrt(var / n);
    const double z = std::fabs(mean - delta) / se;

    return json{{"gaussian_exact",
                 {{"pass", exact_ok}, {"values", {e1, e2, e3}}, {"expected", {1.0, 3.0, 15.0}}}},
                {"increment_moment",
                 {{"pass", z <= 3.0}, {"z", z}, {"mean", mean}, {"expected", delta}}}};
}

} // namespace

CommandResult cmd_validate(const ExperimentConfig& cfg) {
    std::vector<SPDEModel> models;
    if (cfg.model.name == "all") {
        models.push_back(make_heat_model({}, 0.0));
        models.push_back(make_cable_model({}, 1.0, 2.0));
        models.push_back(make_geometric_model(0.3));
        models.push_back(make_nemytskii_heat_model({}));
        models.push_back(hjmm::build_hjmm_model({}));
    } else {
        models.push_back(build_model(cfg).model);
    }

    json model_reports = json::array();
    bool all_pass = true;
    for (const auto& model : models) {
        json r = validate_one_model(model);
        all_pass = all_pass && r["pass"].get<bool>();
        model_reports.push_back(std::move(r));
    }
    json moments = moment_suite();
    all_pass = all_pass && moments["gaussian_exact"]["pass"].get<bool>() &&
               moments["increment_moment"]["pass"].get<bool>();

    const json doc = {{"version", kVersion},
                      {"pass", all_pass},
                      {"models", model_reports},
                      {"moment_suite", moments}};

    CommandResult result;
    const std::string path = out_path(cfg.output, "_validate.json");
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write '" + path + "'");
    os << doc.dump(2) << "\n";
    result.files_written.push_back(path);
    std::cout << (all_pass ? "validate: pass" : "validate: FAIL") << "\n";
    result.exit_code = all_pass ? 0 : 1;
    return result;
}

} // namespace wzsim
