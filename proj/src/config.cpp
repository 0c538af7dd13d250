#include "spc/config.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace spc {

using nlohmann::json;

namespace {

// Collects every problem in the file before failing.
class Reader {
public:
    std::vector<std::string> issues;

    void keys(const json& obj, const std::string& where, const std::set<std::string>& allowed)
    {
        if (!obj.is_object()) {
            issues.push_back(where + ": expected an object");
            return;
        }
        for (auto it = obj.begin(); it != obj.end(); ++it)
            if (!allowed.count(it.key())) issues.push_back(where + "." + it.key() + ": unknown key");
    }

    void number(const json& obj, const std::string& where, const char* key, double& out, bool required = false)
    {
        if (!obj.is_object() || !obj.contains(key)) {
            if (required) issues.push_back(where + "." + key + ": required");
            return;
        }
        const json& v = obj.at(key);
        if (!v.is_number()) issues.push_back(where + "." + key + ": expected a number");
        else out = v.get<double>();
    }

    void integer(const json& obj, const std::string& where, const char* key, int& out, bool required = false)
    {
        if (!obj.is_object() || !obj.contains(key)) {
            if (required) issues.push_back(where + "." + key + ": required");
            return;
        }
        const json& v = obj.at(key);
        if (!v.is_number_integer()) issues.push_back(where + "." + key + ": expected an integer");
        else out = v.get<int>();
    }

    void boolean(const json& obj, const std::string& where, const char* key, bool& out)
    {
        if (!obj.is_object() || !obj.contains(key)) return;
        const json& v = obj.at(key);
        if (!v.is_boolean()) issues.push_back(where + "." + key + ": expected true or false");
        else out = v.get<bool>();
    }

    void string(const json& obj, const std::string& where, const char* key, std::string& out)
    {
        if (!obj.is_object() || !obj.contains(key)) return;
        const json& v = obj.at(key);
        if (!v.is_string()) issues.push_back(where + "." + key + ": expected a string");
        else out = v.get<std::string>();
    }

    void list(const json& obj, const std::string& where, const char* key, std::vector<double>& out, bool required,
              bool positive)
    {
        if (!obj.is_object() || !obj.contains(key)) {
            if (required) issues.push_back(where + "." + key + ": required");
            return;
        }
        const json& v = obj.at(key);
        if (!v.is_array()) {
            issues.push_back(where + "." + key + ": expected a list of numbers");
            return;
        }
        out.clear();
        for (const auto& x : v) {
            if (!x.is_number()) {
                issues.push_back(where + "." + key + ": expected a list of numbers");
                return;
            }
            double d = x.get<double>();
            if (positive && !(d > 0.0)) issues.push_back(where + "." + key + ": values must be positive");
            out.push_back(d);
        }
    }

    void check(bool ok, const std::string& msg)
    {
        if (!ok) issues.push_back(msg);
    }
};

void read_propagate(Reader& r, const json& s, const std::string& w, PropagateOptions& p)
{
    r.number(s, w, "step_factor", p.step_factor);
    r.number(s, w, "stop_below", p.stop_below);
    r.integer(s, w, "record_every", p.record_every);
    r.check(p.step_factor > 0.0 && p.step_factor < 0.5, w + ".step_factor: must lie in (0, 0.5)");
    r.check(p.record_every >= 1, w + ".record_every: must be >= 1");
}

void read_schedule(Reader& r, const json& s, const std::string& w, Schedule& sch)
{
    std::string kind = schedule_name(sch.kind);
    r.string(s, w, "schedule", kind);
    try {
        sch.kind = parse_schedule_kind(kind);
    } catch (const Error& e) {
        r.issues.push_back(w + ".schedule: " + e.what());
    }
    r.number(s, w, "epsilon", sch.epsilon, true);
    r.number(s, w, "s_start", sch.s_start);
    r.number(s, w, "s_end", sch.s_end);
    r.number(s, w, "slope", sch.slope);
    r.number(s, w, "sigma_max", sch.sigma_max);
    r.number(s, w, "sigma_const", sch.sigma_const);
    r.check(sch.epsilon > 0.0, w + ".epsilon: must be positive");
    r.check(sch.s_end > sch.s_start, w + ".s_end: must exceed s_start");
}

const std::set<std::string> propagate_keys{"step_factor", "stop_below", "record_every"};
const std::set<std::string> schedule_keys{"schedule", "epsilon", "s_start", "s_end", "slope", "sigma_max", "sigma_const"};

std::set<std::string> join(std::set<std::string> a, const std::set<std::string>& b)
{
    a.insert(b.begin(), b.end());
    return a;
}

} // namespace

std::string config_hash(const json& j)
{
    const std::string s = j.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RunConfig parse_config(const json& j)
{
    Reader r;
    RunConfig c;
    c.raw = j;
    c.hash = config_hash(j);
    r.keys(j, "config", {"model", "grid", "critical", "track", "resonance", "fit", "evolve", "static_decay",
                         "short_time", "scaling", "spectrum_compare"});
    if (!j.is_object()) throw Error(ErrorKind::configuration, "config: top level must be a JSON object");

    // model
    if (!j.contains("model")) r.issues.push_back("config.model: required");
    const json m = j.value("model", json::object());
    r.keys(m, "model", {"shape", "radius", "lambda_c", "lambda_slope", "sign", "channel"});
    std::string shape = "well";
    r.string(m, "model", "shape", shape);
    try {
        c.model.shape = parse_shape(shape);
    } catch (const Error& e) {
        r.issues.push_back(std::string("model.shape: ") + e.what());
    }
    r.number(m, "model", "radius", c.model.radius);
    r.number(m, "model", "lambda_slope", c.model.lambda_slope);
    r.integer(m, "model", "sign", c.model.sign);
    r.integer(m, "model", "channel", c.model.channel);
    if (m.is_object() && m.contains("lambda_c")) {
        const json& l = m.at("lambda_c");
        if (l.is_string() && l.get<std::string>() == "auto") c.lambda_auto = true;
        else if (l.is_number()) c.model.lambda_c = l.get<double>();
        else r.issues.push_back("model.lambda_c: expected a number or \"auto\"");
    } else {
        c.lambda_auto = true;
    }
    r.check(c.model.radius > 0.0, "model.radius: must be positive");
    r.check(c.model.lambda_slope > 0.0, "model.lambda_slope: must be positive");
    r.check(c.model.sign == 1 || c.model.sign == -1, "model.sign: must be +1 or -1");
    r.check(c.model.channel != 0, "model.channel: must be nonzero");

    // grid
    if (!j.contains("grid")) r.issues.push_back("config.grid: required");
    const json g = j.value("grid", json::object());
    r.keys(g, "grid", {"r_max", "n"});
    double r_max = 0.0;
    int n = 0;
    r.number(g, "grid", "r_max", r_max, true);
    r.integer(g, "grid", "n", n, true);
    r.check(r_max > 0.0, "grid.r_max: must be positive");
    r.check(n >= 16, "grid.n: must be at least 16");

    if (j.contains("critical")) {
        const json& s = j.at("critical");
        r.keys(s, "critical", {"lambda_lo", "lambda_hi", "edge_offsets"});
        r.number(s, "critical", "lambda_lo", c.critical.lambda_lo);
        r.number(s, "critical", "lambda_hi", c.critical.lambda_hi);
        r.list(s, "critical", "edge_offsets", c.critical.edge_offsets, false, true);
        r.check(c.critical.lambda_hi > c.critical.lambda_lo, "critical.lambda_hi: must exceed lambda_lo");
        r.check(c.critical.edge_offsets.size() >= 2, "critical.edge_offsets: need at least two offsets");
    }
    if (j.contains("track")) {
        const json& s = j.at("track");
        TrackSection t;
        r.keys(s, "track", {"sigmas"});
        r.list(s, "track", "sigmas", t.sigmas, true, false);
        c.track = t;
    }
    if (j.contains("resonance")) {
        const json& s = j.at("resonance");
        ResonanceSection t;
        r.keys(s, "resonance", {"sigmas", "k_points", "refine"});
        r.list(s, "resonance", "sigmas", t.sigmas, true, true);
        r.integer(s, "resonance", "k_points", t.k_points);
        r.integer(s, "resonance", "refine", t.refine);
        r.check(t.k_points >= 5, "resonance.k_points: must be at least 5");
        r.check(t.refine >= 0, "resonance.refine: must be >= 0");
        c.resonance = t;
    }
    if (j.contains("fit")) {
        const json& s = j.at("fit");
        FitSection t;
        r.keys(s, "fit", {"sigmas", "pin", "window", "max_residual", "k_points"});
        r.list(s, "fit", "sigmas", t.sigmas, true, true);
        std::string pin = "C0";
        r.string(s, "fit", "pin", pin);
        if (pin == "C0") t.pin = FitPin::c0;
        else if (pin == "prefactor") t.pin = FitPin::prefactor;
        else r.issues.push_back("fit.pin: expected \"C0\" or \"prefactor\"");
        r.number(s, "fit", "window", t.window);
        r.number(s, "fit", "max_residual", t.max_residual);
        r.integer(s, "fit", "k_points", t.k_points);
        r.check(t.sigmas.size() >= 4, "fit.sigmas: need at least four values");
        r.check(t.window > 0.0, "fit.window: must be positive");
        c.fit = t;
    }
    if (j.contains("evolve")) {
        const json& s = j.at("evolve");
        EvolveSection t;
        r.keys(s, "evolve", join(join(schedule_keys, propagate_keys), {"initial", "spectrum"}));
        read_schedule(r, s, "evolve", t.schedule);
        read_propagate(r, s, "evolve", t.propagate);
        r.string(s, "evolve", "initial", t.initial);
        r.check(t.initial == "critical" || t.initial == "bound", "evolve.initial: expected \"critical\" or \"bound\"");
        r.boolean(s, "evolve", "spectrum", t.spectrum);
        c.evolve = t;
    }
    if (j.contains("static_decay")) {
        const json& s = j.at("static_decay");
        StaticDecaySection t;
        r.keys(s, "static_decay", join(propagate_keys, {"sigmas", "epsilons"}));
        r.list(s, "static_decay", "sigmas", t.sigmas, true, true);
        r.list(s, "static_decay", "epsilons", t.epsilons, false, true);
        read_propagate(r, s, "static_decay", t.propagate);
        c.static_decay = t;
    }
    if (j.contains("short_time")) {
        const json& s = j.at("short_time");
        ShortTimeSection t;
        r.keys(s, "short_time", join(propagate_keys, {"a_values", "S_values", "a_fixed", "S_fixed", "epsilon", "max_p"}));
        r.list(s, "short_time", "a_values", t.sweep.a_values, true, true);
        r.list(s, "short_time", "S_values", t.sweep.S_values, true, true);
        r.number(s, "short_time", "a_fixed", t.sweep.a_fixed);
        r.number(s, "short_time", "S_fixed", t.sweep.S_fixed);
        r.number(s, "short_time", "epsilon", t.sweep.epsilon);
        r.number(s, "short_time", "max_p", t.sweep.max_p);
        read_propagate(r, s, "short_time", t.propagate);
        r.check(t.sweep.epsilon > 0.0 && t.sweep.S_fixed > 0.0 && t.sweep.a_fixed >= 0.0,
                "short_time: epsilon and S_fixed must be positive, a_fixed non-negative");
        c.short_time = t;
    }
    if (j.contains("scaling")) {
        const json& s = j.at("scaling");
        ScalingSection t;
        r.keys(s, "scaling", join(propagate_keys, {"epsilons", "lead", "s_cap", "slope", "refine_check",
                                                   "static_sigmas", "static_epsilons"}));
        r.list(s, "scaling", "epsilons", t.epsilons, true, true);
        r.number(s, "scaling", "lead", t.options.lead);
        r.number(s, "scaling", "s_cap", t.options.s_cap);
        r.number(s, "scaling", "slope", t.options.slope);
        r.boolean(s, "scaling", "refine_check", t.options.refine_check);
        r.list(s, "scaling", "static_sigmas", t.static_sigmas, false, true);
        r.list(s, "scaling", "static_epsilons", t.static_epsilons, false, true);
        read_propagate(r, s, "scaling", t.options.propagate);
        r.check(t.static_sigmas.empty() == t.static_epsilons.empty(),
                "scaling.static_sigmas and scaling.static_epsilons must be given together");
        c.scaling = t;
    }
    if (j.contains("spectrum_compare")) {
        const json& s = j.at("spectrum_compare");
        SpectrumSection t;
        r.keys(s, "spectrum_compare", join(propagate_keys, {"sigma", "fit_sigmas", "static_duration", "tent"}));
        r.number(s, "spectrum_compare", "sigma", t.sigma);
        r.list(s, "spectrum_compare", "fit_sigmas", t.fit_sigmas, true, true);
        r.number(s, "spectrum_compare", "static_duration", t.static_duration);
        read_propagate(r, s, "spectrum_compare", t.propagate);
        t.tent.kind = ScheduleKind::tent;
        if (!s.contains("tent")) {
            r.issues.push_back("spectrum_compare.tent: required");
        } else {
            const json& ts = s.at("tent");
            r.keys(ts, "spectrum_compare.tent", schedule_keys);
            read_schedule(r, ts, "spectrum_compare.tent", t.tent);
        }
        r.check(t.sigma > 0.0, "spectrum_compare.sigma: must be positive");
        r.check(t.fit_sigmas.size() >= 4, "spectrum_compare.fit_sigmas: need at least four values");
        c.spectrum_compare = t;
    }

    if (!r.issues.empty()) {
        std::ostringstream os;
        os << "invalid configuration (" << r.issues.size() << " problem" << (r.issues.size() > 1 ? "s" : "") << "):";
        for (const auto& i : r.issues) os << "\n  - " << i;
        throw Error(ErrorKind::configuration, os.str());
    }
    c.grid = build_grid(r_max, n);
    return c;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::configuration, "cannot read config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::configuration, "config file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

} // namespace spc
