#include "uscqed/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace uscqed::cli {

namespace {

using nlohmann::json;

// Typed access to a flat JSON object that remembers which keys were read.
class Reader {
public:
    Reader(const json& j, std::set<std::string> allowed) : j_(j), allowed_(std::move(allowed)) {
        if (!j.is_object()) throw ConfigError("config must be a JSON object");
        for (const auto& [key, value] : j.items()) {
            if (!allowed_.count(key)) throw ConfigError("unknown config key '" + key + "'");
        }
    }

    bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    double number(const std::string& key, double fallback) const {
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError("'" + key + "' must be finite");
        return x;
    }

    std::optional<double> optional_number(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        return number(key, 0.0);
    }

    int integer(const std::string& key, int fallback) const {
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
        return v.get<int>();
    }

    std::optional<int> optional_integer(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        return integer(key, 0);
    }

    bool boolean(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_boolean()) throw ConfigError("'" + key + "' must be true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback) const {
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_string()) throw ConfigError("'" + key + "' must be a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const {
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_array()) throw ConfigError("'" + key + "' must be a list of numbers");
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number() || !std::isfinite(x.get<double>())) {
                throw ConfigError("'" + key + "' must contain only finite numbers");
            }
            out.push_back(x.get<double>());
        }
        return out;
    }

    template <std::size_t N>
    std::array<double, N> triple(const std::string& key, std::array<double, N> fallback) const {
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (v.is_number()) {
            fallback.fill(number(key, 0.0));
            return fallback;
        }
        const auto list = numbers(key, {});
        if (list.size() != N) throw ConfigError("'" + key + "' must have " + std::to_string(N) + " entries");
        std::copy(list.begin(), list.end(), fallback.begin());
        return fallback;
    }

    std::array<int, kNumModes> cutoffs(const std::string& key, std::array<int, kNumModes> fallback) const {
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_array() || v.size() != kNumModes) throw ConfigError("'" + key + "' must be a list of 3 integers");
        for (std::size_t i = 0; i < kNumModes; ++i) {
            if (!v[i].is_number_integer()) throw ConfigError("'" + key + "' must be a list of 3 integers");
            fallback[i] = v[i].get<int>();
        }
        return fallback;
    }

private:
    const json& j_;
    std::set<std::string> allowed_;
};

const std::set<std::string> kProtocolKeys{
    "target",        "g",        "theta",   "omega_b",       "omega_c",     "gamma",
    "kappa",         "cutoffs",  "excitation_cap", "t_on",   "delta_omega_q", "ramp_rate",
    "hold_time",     "omega_q_resonance", "crossing_half_window", "t_tail", "t_end",
    "dt",            "ramp_dt",  "output_step", "energy_margin", "dressing", "verify_step"};

// Converts library precondition failures into config errors.
template <typename F>
auto checked(F&& f) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
}

void fill_protocol(const Reader& r, ProtocolConfig& c) {
    c.target = checked([&] { return parse_target(r.string("target", to_string(c.target))); });
    if (c.target == Target::GHZ && !r.has("theta")) c.theta = 0.0;
    c.g = r.number("g", c.g);
    c.theta = r.number("theta", c.theta);
    c.omega[1] = r.number("omega_b", c.omega[1]);
    c.omega[2] = r.number("omega_c", c.omega[2]);
    c.gamma = r.number("gamma", c.gamma);
    if (r.has("kappa")) c.kappa = r.triple<kNumModes>("kappa", {0.0, 0.0, 0.0});
    c.cutoffs = r.cutoffs("cutoffs", c.cutoffs);
    c.excitation_cap = r.optional_integer("excitation_cap");
    c.t_on = r.number("t_on", c.t_on);
    c.delta_omega_q = r.number("delta_omega_q", c.delta_omega_q);
    c.ramp_rate = r.number("ramp_rate", c.ramp_rate);
    c.hold_time = r.optional_number("hold_time");
    c.omega_q_resonance = r.optional_number("omega_q_resonance");
    c.crossing_half_window = r.number("crossing_half_window", c.crossing_half_window);
    c.t_tail = r.number("t_tail", c.t_tail);
    c.t_end = r.optional_number("t_end");
    c.dt = r.number("dt", c.dt);
    c.ramp_dt = r.number("ramp_dt", c.ramp_dt);
    c.output_step = r.number("output_step", c.output_step);
    c.energy_margin = r.number("energy_margin", c.energy_margin);
    c.dressing = checked([&] { return parse_dressing_policy(r.string("dressing", to_string(c.dressing))); });
    c.verify_step = r.boolean("verify_step", c.verify_step);
    for (int n : c.cutoffs) {
        if (n < 0) throw ConfigError("cutoffs must be >= 0");
    }
    if (c.excitation_cap && *c.excitation_cap < 0) throw ConfigError("excitation_cap must be >= 0");
    checked([&] {
        c.validate();
        return 0;
    });
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

SpectrumJob parse_spectrum(const json& j) {
    const Reader r(j, {"g", "theta", "omega_b", "omega_c", "cutoffs", "excitation_cap", "omega_q_min", "omega_q_max",
                       "omega_q_points", "levels", "gap_target"});
    SpectrumJob job;
    job.params.theta = 0.5235987755982988;
    job.params.g = r.triple<kNumModes>("g", job.params.g);
    job.params.theta = r.number("theta", job.params.theta);
    job.params.omega[1] = r.number("omega_b", job.params.omega[1]);
    job.params.omega[2] = r.number("omega_c", job.params.omega[2]);
    job.cutoffs = r.cutoffs("cutoffs", job.cutoffs);
    job.excitation_cap = r.optional_integer("excitation_cap");
    job.omega_q_min = r.number("omega_q_min", job.omega_q_min);
    job.omega_q_max = r.number("omega_q_max", job.omega_q_max);
    job.omega_q_points = r.integer("omega_q_points", job.omega_q_points);
    job.levels = r.integer("levels", job.levels);
    job.gap_target = checked([&] { return parse_target(r.string("gap_target", to_string(job.gap_target))); });

    if (job.omega_q_points < 1) throw ConfigError("omega_q_points must be >= 1");
    if (!(job.omega_q_min > 0.0)) throw ConfigError("omega_q_min must be > 0");
    if (job.omega_q_points > 1 && !(job.omega_q_max > job.omega_q_min)) {
        throw ConfigError("omega_q_max must exceed omega_q_min");
    }
    if (job.levels < 1) throw ConfigError("levels must be >= 1");
    checked([&] {
        job.params.with_omega_q(job.omega_q_min).validate();
        const HilbertSpace space = build_space(job.cutoffs, job.excitation_cap);
        if (job.levels > space.dimension()) throw ConfigError("levels exceeds the Hilbert-space dimension");
        const auto spec = target_spec(job.gap_target);
        if (!space.contains(spec.photonic)) throw ConfigError("cutoffs exclude the gap_target photon state");
        return 0;
    });
    return job;
}

GeffJob parse_geff(const json& j) {
    const Reader r(j, {"process", "g_values", "theta", "omega_b", "omega_c", "cutoffs", "excitation_cap",
                       "half_window"});
    GeffJob job;
    job.process = checked([&] { return parse_target(r.string("process", to_string(job.process))); });
    if (job.process == Target::GHZ) job.theta = 0.0;
    job.g_values = r.numbers("g_values", job.g_values);
    job.theta = r.number("theta", job.theta);
    job.omega[1] = r.number("omega_b", job.omega[1]);
    job.omega[2] = r.number("omega_c", job.omega[2]);
    job.cutoffs = r.cutoffs("cutoffs", job.cutoffs);
    job.excitation_cap = r.optional_integer("excitation_cap");
    job.half_window = r.number("half_window", job.half_window);

    if (job.g_values.empty()) throw ConfigError("g_values must not be empty");
    for (double g : job.g_values) {
        if (!(g > 0.0)) throw ConfigError("g_values must be > 0");
    }
    if (job.process == Target::GHZ && job.theta != 0.0) throw ConfigError("the GHZ process requires theta = 0");
    if (!(job.half_window > 0.0)) throw ConfigError("half_window must be > 0");
    checked([&] {
        SystemParams p;
        p.omega = job.omega;
        p.theta = job.theta;
        p.validate();
        const HilbertSpace space = build_space(job.cutoffs, job.excitation_cap);
        if (!space.contains(target_spec(job.process).photonic)) {
            throw ConfigError("cutoffs exclude the target photon state");
        }
        return 0;
    });
    return job;
}

ProtocolConfig parse_protocol(const json& j) {
    const Reader r(j, kProtocolKeys);
    ProtocolConfig c;
    fill_protocol(r, c);
    return c;
}

SweepJob parse_sweep(const json& j) {
    auto keys = kProtocolKeys;
    keys.erase("gamma");
    keys.erase("kappa");
    keys.insert("gammas");
    const Reader r(j, keys);
    SweepJob job;
    job.gammas = r.numbers("gammas", job.gammas);
    if (job.gammas.empty()) throw ConfigError("gammas must not be empty");
    for (double g : job.gammas) {
        if (!(g >= 0.0)) throw ConfigError("gammas must be >= 0");
    }
    fill_protocol(r, job.protocol);
    return job;
}

json describe(const SpectrumJob& job) {
    json j;
    j["g"] = job.params.g;
    j["theta"] = job.params.theta;
    j["omega_b"] = job.params.omega[1];
    j["omega_c"] = job.params.omega[2];
    j["cutoffs"] = job.cutoffs;
    j["excitation_cap"] = job.excitation_cap ? json(*job.excitation_cap) : json(nullptr);
    j["omega_q_min"] = job.omega_q_min;
    j["omega_q_max"] = job.omega_q_max;
    j["omega_q_points"] = job.omega_q_points;
    j["levels"] = job.levels;
    j["gap_target"] = to_string(job.gap_target);
    return j;
}

json describe(const GeffJob& job) {
    json j;
    j["process"] = to_string(job.process);
    j["g_values"] = job.g_values;
    j["theta"] = job.theta;
    j["omega_b"] = job.omega[1];
    j["omega_c"] = job.omega[2];
    j["cutoffs"] = job.cutoffs;
    j["excitation_cap"] = job.excitation_cap ? json(*job.excitation_cap) : json(nullptr);
    j["half_window"] = job.half_window;
    return j;
}

json describe(const ProtocolConfig& c) {
    json j;
    j["target"] = to_string(c.target);
    j["g"] = c.g;
    j["theta"] = c.theta;
    j["omega_b"] = c.omega[1];
    j["omega_c"] = c.omega[2];
    j["gamma"] = c.gamma;
    j["kappa"] = c.resolved_kappa();
    j["cutoffs"] = c.cutoffs;
    j["excitation_cap"] = c.excitation_cap ? json(*c.excitation_cap) : json(nullptr);
    j["t_on"] = c.t_on;
    j["delta_omega_q"] = c.delta_omega_q;
    j["ramp_rate"] = c.ramp_rate;
    j["hold_time"] = optional_json(c.hold_time);
    j["omega_q_resonance"] = optional_json(c.omega_q_resonance);
    j["crossing_half_window"] = c.crossing_half_window;
    j["t_tail"] = c.t_tail;
    j["t_end"] = optional_json(c.t_end);
    j["dt"] = c.dt;
    j["ramp_dt"] = c.ramp_dt;
    j["output_step"] = c.output_step;
    j["energy_margin"] = c.energy_margin;
    j["dressing"] = to_string(c.dressing);
    j["verify_step"] = c.verify_step;
    return j;
}

json describe(const SweepJob& job) {
    json j = describe(job.protocol);
    j.erase("gamma");
    j.erase("kappa");
    j["gammas"] = job.gammas;
    return j;
}

}  // namespace uscqed::cli
