#include "wzsim/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include "wzsim/builtin_models.hpp"
#include "wzsim/errors.hpp"
#include "wzsim/hjmm.hpp"

namespace wzsim {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.count(key))
            throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

double get_num(const json& obj, const std::string& key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw ConfigError("'" + key + "' must be a number");
    return obj[key].get<double>();
}

int get_int(const json& obj, const std::string& key, int fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
    return obj[key].get<int>();
}

std::vector<double> get_num_list(const json& obj, const std::string& key,
                                 std::vector<double> fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_array()) throw ConfigError("'" + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : obj[key]) {
        if (!v.is_number()) throw ConfigError("'" + key + "' must be an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

StudyPair parse_pair(const std::string& s) {
    if (s == "wz-vs-ref") return StudyPair::WzVsRef;
    if (s == "em-vs-ref") return StudyPair::EmVsRef;
    if (s == "wz-vs-em") return StudyPair::WzVsEm;
    throw ConfigError("unknown pair '" + s + "' (expected wz-vs-ref, em-vs-ref or wz-vs-em)");
}

void validate_model_block(const ModelConfig& mc, Command cmd) {
    const json& p = mc.params;
    if (mc.name == "heat") {
        reject_unknown(p, {"name", "dim", "mass", "channels", "vol_scale"}, "model");
    } else if (mc.name == "cable") {
        reject_unknown(p, {"name", "dim", "lambda", "tau", "channels", "vol_scale"}, "model");
    } else if (mc.name == "geometric") {
        reject_unknown(p, {"name", "sigma"}, "model");
    } else if (mc.name == "nemytskii") {
        reject_unknown(p, {"name", "dim", "channels", "vol_scale"}, "model");
    } else if (mc.name == "hjmm") {
        reject_unknown(p,
                       {"name", "beta", "beta_prime", "a", "c", "nu", "kappa", "theta",
                        "grid", "initial_curve_csv", "v0"},
                       "model");
    } else if (mc.name == "broken-jacobian") {
        reject_unknown(p, {"name"}, "model");
    } else if (mc.name == "all") {
        if (cmd != Command::Validate)
            throw ConfigError("model 'all' is only valid for the validate command");
        reject_unknown(p, {"name"}, "model");
    } else {
        throw ConfigError("unknown model '" + mc.name + "'");
    }
}

} // namespace

namespace {

ExperimentConfig parse_config_impl(const json& doc, Command cmd) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(doc, {"model", "scheme", "monte_carlo", "output", "x0", "synthetic"},
                   "config");

    ExperimentConfig cfg;

    if (!doc.contains("model") || !doc["model"].is_object() || !doc["model"].contains("name"))
        throw ConfigError("config requires a model block with a name");
    cfg.model.name = doc["model"]["name"].get<std::string>();
    cfg.model.params = doc["model"];
    validate_model_block(cfg.model, cmd);

    if (doc.contains("x0")) {
        reject_unknown(doc["x0"], {"coeffs", "v0"}, "x0");
        cfg.model.params["__x0"] = doc["x0"]; // consumed by build_model
    }

    const bool needs_scheme = cmd != Command::Validate;
    if (doc.contains("scheme"))
        reject_unknown(doc["scheme"], {"T", "m", "m_fine", "inner_steps", "p", "schemes", "pair"},
                       "scheme");
    if (needs_scheme) {
        if (!doc.contains("scheme") || !doc["scheme"].is_object())
            throw ConfigError("config requires a scheme block");
        const json& s = doc["scheme"];
        cfg.scheme.T = get_num(s, "T", 1.0);
        if (!(cfg.scheme.T > 0.0)) throw ConfigError("scheme.T must be positive");
        cfg.scheme.m_fine = get_int(s, "m_fine", 1024);
        cfg.scheme.inner_steps = get_int(s, "inner_steps", 0);
        cfg.scheme.p = get_num(s, "p", 2.0);
        if (!s.contains("m")) throw ConfigError("scheme.m is required");
        if (s["m"].is_array()) {
            for (const auto& v : s["m"]) cfg.scheme.ms.push_back(v.get<int>());
        } else {
            cfg.scheme.ms.push_back(s["m"].get<int>());
        }
        for (int m : cfg.scheme.ms)
            if (m < 1 || cfg.scheme.m_fine % m != 0)
                throw ConfigError("every scheme.m must be a positive divisor of m_fine");

        if (cmd == Command::Simulate) {
            if (cfg.scheme.ms.size() != 1)
                throw ConfigError("simulate requires a single scheme.m");
            if (!s.contains("schemes")) throw ConfigError("simulate requires scheme.schemes");
            for (const auto& v : s["schemes"]) {
                const std::string name = v.get<std::string>();
                if (name != "wz" && name != "em" && name != "ee" && name != "ref")
                    throw ConfigError("unknown scheme '" + name + "'");
                cfg.scheme.schemes.push_back(name);
            }
        }
        if (cmd == Command::Converge) {
            if (!(cfg.scheme.p > 1.0))
                throw ConfigError(
                    "converge requires p > 1: the predicted rate p-1 vanishes at p = 1 and is "
                    "untestable");
            if (!doc.contains("synthetic")) {
                if (cfg.scheme.ms.size() < 3)
                    throw ConfigError("converge requires at least three m values");
                if (!s.contains("pair")) throw ConfigError("converge requires scheme.pair");
                cfg.scheme.pair = parse_pair(s["pair"].get<std::string>());
            }
        }
    }

    if (doc.contains("monte_carlo")) {
        const json& mc = doc["monte_carlo"];
        reject_unknown(mc, {"paths", "base_seed", "zero_noise"}, "monte_carlo");
        cfg.monte_carlo.paths = get_int(mc, "paths", 100);
        if (mc.contains("base_seed"))
            cfg.monte_carlo.base_seed = mc["base_seed"].get<std::uint64_t>();
        if (mc.contains("zero_noise")) cfg.monte_carlo.zero_noise = mc["zero_noise"].get<bool>();
    }
    if (const char* env_seed = std::getenv("SPDE_SEED")) {
        cfg.monte_carlo.base_seed = std::strtoull(env_seed, nullptr, 10);
    }

    if (doc.contains("output")) {
        const json& o = doc["output"];
        reject_unknown(o, {"dir", "prefix", "bond_prices"}, "output");
        if (o.contains("dir")) cfg.output.dir = o["dir"].get<std::string>();
        if (o.contains("prefix")) cfg.output.prefix = o["prefix"].get<std::string>();
        if (o.contains("bond_prices")) cfg.output.bond_prices = o["bond_prices"].get<bool>();
    }

    if (doc.contains("synthetic")) {
        if (cmd != Command::Converge)
            throw ConfigError("synthetic block is only valid for converge");
        const json& syn = doc["synthetic"];
        reject_unknown(syn, {"coefficient", "exponent"}, "synthetic");
        SyntheticBlock sb;
        sb.coefficient = get_num(syn, "coefficient", 1.0);
        sb.exponent = get_num(syn, "exponent", -1.0);
        if (!(sb.coefficient > 0.0)) throw ConfigError("synthetic.coefficient must be positive");
        cfg.synthetic = sb;
    }

    return cfg;
}

} // namespace

ExperimentConfig parse_config(const json& doc, Command cmd) {
    try {
        return parse_config_impl(doc, cmd);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config value has the wrong type: ") + e.what());
    }
}

ExperimentConfig parse_config_file(const std::string& path, Command cmd) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc, cmd);
}

namespace {

BuiltModel build_model_impl(const ExperimentConfig& cfg) {
    const json& p = cfg.model.params;
    const json x0j = p.contains("__x0") ? p["__x0"] : json::object();

    auto explicit_x0 = [&x0j](const SpacePtr& space) -> std::optional<HVector> {
        if (!x0j.contains("coeffs")) return std::nullopt;
        std::vector<double> coeffs;
        for (const auto& v : x0j["coeffs"]) coeffs.push_back(v.get<double>());
        if (static_cast<int>(coeffs.size()) != space->dim)
            throw ConfigError("x0.coeffs length does not match the model dimension");
        return HVector{space, std::move(coeffs)};
    };

    BuiltModel out;
    if (cfg.model.name == "heat" || cfg.model.name == "cable" || cfg.model.name == "nemytskii") {
        if (cfg.model.name == "nemytskii") {
            NemytskiiParams np;
            np.dim = get_int(p, "dim", np.dim);
            np.channels = get_int(p, "channels", np.channels);
            np.vol_scale = get_num(p, "vol_scale", np.vol_scale);
            out.model = make_nemytskii_heat_model(np);
        } else {
            AdditiveSpectralParams ap;
            ap.dim = get_int(p, "dim", ap.dim);
            ap.channels = get_int(p, "channels", ap.channels);
            ap.vol_scale = get_num(p, "vol_scale", ap.vol_scale);
            if (cfg.model.name == "heat") {
                out.model = make_heat_model(ap, get_num(p, "mass", 0.0));
            } else {
                out.model = make_cable_model(ap, get_num(p, "lambda", 1.0),
                                             get_num(p, "tau", 1.0));
            }
        }
        auto x = explicit_x0(out.model.space);
        out.x0 = x ? *x : default_spectral_x0(out.model.space);
    } else if (cfg.model.name == "geometric") {
        out.model = make_geometric_model(get_num(p, "sigma", 0.3));
        auto x = explicit_x0(out.model.space);
        out.x0 = x ? *x : HVector{out.model.space, {1.0}};
    } else if (cfg.model.name == "broken-jacobian") {
        out.model = make_broken_jacobian_model();
        out.x0 = default_spectral_x0(out.model.space);
    } else if (cfg.model.name == "hjmm") {
        hjmm::HJMMParams hp;
        hp.beta = get_num(p, "beta", hp.beta);
        hp.beta_prime = get_num(p, "beta_prime", hp.beta_prime);
        hp.a = get_num_list(p, "a", hp.a);
        hp.c = get_num_list(p, "c", hp.c);
        hp.nu = get_num_list(p, "nu", hp.nu);
        hp.kappa = get_num(p, "kappa", hp.kappa);
        hp.theta = get_num(p, "theta", hp.theta);
        hp.grid = get_num_list(p, "grid", {});
        try {
            out.model = hjmm::build_hjmm_model(hp);
        } catch (const ArgumentError& e) {
            throw ConfigError(std::string("hjmm parameters invalid: ") + e.what());
        }
        if (x0j.contains("coeffs"))
            throw ConfigError("hjmm x0 is set via model.initial_curve_csv and x0.v0");
        hjmm::ForwardCurve r0;
        if (p.contains("initial_curve_csv")) {
            std::ifstream in(p["initial_curve_csv"].get<std::string>());
            if (!in) throw ConfigError("cannot open initial_curve_csv");
            r0 = hjmm::load_curve_csv(in, hp.beta);
            if (r0.maturities != out.model.space->factors[0]->grid)
                throw ConfigError("initial curve maturities do not match the model grid");
        } else {
            r0 = hjmm::default_initial_curve(hp);
        }
        const double v0 = x0j.contains("v0") ? x0j["v0"].get<double>() : 0.0;
        out.x0 = hjmm::pack_state(out.model, r0, v0);
    } else {
        throw ConfigError("cannot build model '" + cfg.model.name + "'");
    }
    return out;
}

} // namespace

BuiltModel build_model(const ExperimentConfig& cfg) {
    try {
        return build_model_impl(cfg);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config value has the wrong type: ") + e.what());
    }
}

} // namespace wzsim
