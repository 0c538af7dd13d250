// spclab: command-line front end.  Every subcommand reads one JSON config,
// writes CSV/JSON artifacts into --out and prints a one-line summary.

#include <cstdio>
#include <iostream>
#include <map>
#include <thread>

#include <CLI11.hpp>

#include "spc/artifacts.hpp"
#include "spc/config.hpp"

using namespace spc;
using nlohmann::json;
using artifacts::format_number;
using artifacts::Row;

namespace {

struct Context {
    RunConfig cfg;
    artifacts::OutputDir out;
    int jobs = 1;
    bool verbose = false;
    json lambda_meta;

    void log(const std::string& s) const
    {
        if (verbose) std::cerr << "[spclab] " << s << '\n';
    }
};

std::string num(double x) { return format_number(x); }

json model_json(const PotentialModel& m)
{
    return {{"shape", shape_name(m.shape)}, {"radius", m.radius},   {"lambda_c", m.lambda_c},
            {"lambda_slope", m.lambda_slope}, {"sign", m.sign}, {"channel", m.channel}};
}

json grid_json(const RadialGrid& g) { return {{"r_max", g.r_max}, {"n", g.n}, {"h", g.h}}; }

json schedule_json(const Schedule& s)
{
    return {{"kind", schedule_name(s.kind)}, {"s_start", s.s_start},     {"s_end", s.s_end},
            {"epsilon", s.epsilon},          {"slope", s.slope},         {"sigma_max", s.sigma_max},
            {"sigma_const", s.sigma_const}};
}

// lambda_c from the config, or from the critical search when "auto".
PotentialModel resolve_model(Context& ctx)
{
    PotentialModel m = ctx.cfg.model;
    if (ctx.cfg.lambda_auto) {
        ctx.log("searching critical coupling");
        CriticalCoupling cc = find_critical_coupling(m, ctx.cfg.grid, ctx.cfg.critical);
        m.lambda_c = cc.lambda_c;
        ctx.lambda_meta = {{"source", "auto"}, {"lambda_c", cc.lambda_c}, {"uncertainty", cc.uncertainty},
                           {"branch", cc.branch}, {"edge_solutions", cc.lambdas}};
    } else {
        ctx.lambda_meta = {{"source", "config"}, {"lambda_c", m.lambda_c}};
    }
    return m;
}

template <class T>
const T& need(const std::optional<T>& s, const char* name)
{
    if (!s) throw Error(ErrorKind::configuration, std::string("config section '") + name + "' is required by this command");
    return *s;
}

std::string cmd_critical(Context& ctx)
{
    PotentialModel m = resolve_model(ctx);
    CriticalData cd = critical_data(m, ctx.cfg.grid);
    ctx.out.json("critical.json", {{"lambda_c", cd.lambda_c},
                                   {"C0", cd.C0},
                                   {"identity_residual", cd.identity_residual},
                                   {"energy", cd.energy},
                                   {"lambda_search", ctx.lambda_meta},
                                   {"model", model_json(m)},
                                   {"grid", grid_json(ctx.cfg.grid)}});
    std::vector<Row> rows;
    for (int i = 0; i < ctx.cfg.grid.n; ++i)
        rows.push_back({num(cd.Phi.r1(i)), num(cd.Phi.u1[i].real()), num(cd.Phi.r2(i)), num(cd.Phi.u2[i].real())});
    ctx.out.csv("phi.csv", {"r1", "u1", "r2", "u2"}, rows);
    return "critical: lambda_c=" + num(cd.lambda_c) + " C0=" + num(cd.C0) +
           " identity_residual=" + num(cd.identity_residual);
}

std::string cmd_track(Context& ctx)
{
    const auto& sec = need(ctx.cfg.track, "track");
    PotentialModel m = resolve_model(ctx);
    BoundStateTrack t = track_eigenvalue(m, ctx.cfg.grid, sec.sigmas);
    std::vector<Row> rows;
    for (const auto& s : t.samples)
        rows.push_back({num(s.sigma), num(s.energy), num(s.kappa), num(s.identity_residual)});
    ctx.out.csv("track.csv", {"sigma", "energy", "kappa", "identity_residual"}, rows);
    ctx.out.json("track.json", {{"sigma_c", t.sigma_c},
                                {"dE_dsigma", t.dE_dsigma},
                                {"complete", t.complete},
                                {"diagnostic", t.diagnostic},
                                {"lambda_search", ctx.lambda_meta}});
    return "track: " + std::to_string(t.samples.size()) + " samples" + (t.complete ? "" : " (partial: " + t.diagnostic + ")");
}

std::vector<ResonanceProfile> scan_all(Context& ctx, const PotentialModel& m, const CriticalData& cd,
                                       const std::vector<double>& sigmas, int k_points, int refine)
{
    std::vector<ResonanceProfile> ps(sigmas.size());
    parallel_for(static_cast<int>(sigmas.size()), ctx.jobs, [&](int i) {
        ps[i] = scan_resonance(m, ctx.cfg.grid, sigmas[i], default_k_window(sigmas[i], k_points), cd, refine);
    });
    return ps;
}

void write_profiles(Context& ctx, const std::vector<ResonanceProfile>& ps)
{
    std::vector<Row> rows;
    for (const auto& p : ps)
        for (size_t i = 0; i < p.k.size(); ++i) rows.push_back({num(p.sigma), num(p.k[i]), num(p.phi_out_sq[i])});
    ctx.out.csv("profile.csv", {"sigma", "k", "phi_out_sq"}, rows);
}

json profile_json(const ResonanceProfile& p)
{
    return {{"sigma", p.sigma},         {"k_peak", p.k_peak},       {"delta_width", p.delta_width},
            {"peak_value", p.peak_value}, {"k_half_lo", p.k_half_lo}, {"k_half_hi", p.k_half_hi},
            {"local_maxima", p.local_maxima}};
}

json constants_json(const ResonanceConstants& c)
{
    return {{"C", c.C},
            {"C0", c.C0},
            {"absC2", c.absC2},
            {"absC3", c.absC3},
            {"fit_residual", c.fit_residual},
            {"kpeak_slope", c.kpeak_slope},
            {"kpeak_r2", c.kpeak_r2},
            {"width_ratio", c.width_ratio},
            {"width_spread", c.width_spread},
            {"points", c.points}};
}

std::string cmd_resonance(Context& ctx)
{
    const auto& sec = need(ctx.cfg.resonance, "resonance");
    PotentialModel m = resolve_model(ctx);
    CriticalData cd = critical_data(m, ctx.cfg.grid);
    auto ps = scan_all(ctx, m, cd, sec.sigmas, sec.k_points, sec.refine);
    write_profiles(ctx, ps);
    json arr = json::array();
    for (const auto& p : ps) arr.push_back(profile_json(p));
    ctx.out.json("resonance.json", {{"profiles", arr}, {"lambda_search", ctx.lambda_meta}});
    return "resonance: " + std::to_string(ps.size()) + " profiles, k_peak(" + num(ps.front().sigma) +
           ")=" + num(ps.front().k_peak);
}

ResonanceConstants fit_section(Context& ctx, const PotentialModel& m, const CriticalData& cd, const FitSection& sec,
                               std::vector<ResonanceProfile>* keep = nullptr)
{
    auto ps = scan_all(ctx, m, cd, sec.sigmas, sec.k_points, 41);
    FitOptions fo;
    fo.pin = sec.pin;
    fo.pinned_value = sec.pin == FitPin::c0 ? cd.C0 : predicted_prefactor(cd, m);
    fo.window = sec.window;
    fo.max_residual = sec.max_residual;
    if (keep) *keep = ps;
    return fit_constants(ps, fo);
}

std::string cmd_fit(Context& ctx)
{
    const auto& sec = need(ctx.cfg.fit, "fit");
    PotentialModel m = resolve_model(ctx);
    CriticalData cd = critical_data(m, ctx.cfg.grid);
    std::vector<ResonanceProfile> ps;
    ResonanceConstants c = fit_section(ctx, m, cd, sec, &ps);
    write_profiles(ctx, ps);
    json j = constants_json(c);
    j["pin"] = sec.pin == FitPin::c0 ? "C0" : "prefactor";
    j["C0_from_derivative"] = cd.C0;
    j["sigmas"] = sec.sigmas;
    j["lambda_search"] = ctx.lambda_meta;
    ctx.out.json("constants.json", j);
    return "fit: C0=" + num(c.C0) + " |C2|=" + num(c.absC2) + " |C3|=" + num(c.absC3) +
           " fit_residual=" + num(c.fit_residual);
}

std::vector<Row> survival_rows(const std::vector<double>& t, const std::vector<double>& v)
{
    std::vector<Row> rows;
    for (size_t i = 0; i < t.size(); ++i) rows.push_back({num(t[i]), num(v[i])});
    return rows;
}

std::vector<Row> spectrum_rows(const std::vector<SpectrumPoint>& sp)
{
    std::vector<Row> rows;
    for (const auto& p : sp) rows.push_back({num(p.k), num(p.weight)});
    return rows;
}

std::string cmd_evolve(Context& ctx)
{
    const auto& sec = need(ctx.cfg.evolve, "evolve");
    PotentialModel m = resolve_model(ctx);
    CriticalData cd = critical_data(m, ctx.cfg.grid);
    RadialSpinor psi0 = cd.Phi;
    if (sec.initial == "bound") psi0 = bound_state_at(m, ctx.cfg.grid, sec.schedule.sigma(sec.schedule.s_start)).wavefunction;
    ctx.log("propagating");
    EvolutionResult r = propagate(m, ctx.cfg.grid, sec.schedule, psi0, cd.Phi, sec.propagate);
    ctx.out.csv("evolution.csv", {"s", "survival"}, survival_rows(r.times, r.survival));
    json meta = {{"epsilon", sec.schedule.epsilon},
                 {"schedule", schedule_json(sec.schedule)},
                 {"grid", grid_json(ctx.cfg.grid)},
                 {"model", model_json(m)},
                 {"norm_drift", r.norm_drift},
                 {"steps", r.steps},
                 {"ds", r.ds},
                 {"s_final", r.s_final},
                 {"initial", sec.initial}};
    std::string sd = "none";
    try {
        double s = decay_time(r);
        meta["s_d"] = s;
        sd = num(s);
    } catch (const Error&) {
        meta["s_d"] = nullptr;
    }
    if (sec.spectrum) {
        auto [lo, hi] = sec.schedule.sigma_range();
        double sref = std::max({std::abs(lo), std::abs(hi), 1e-3});
        OutgoingSpectrum sp = outgoing_spectrum(r.final_state, m, ctx.cfg.grid, r.sigma_final, default_k_window(sref));
        ctx.out.csv("spectrum.csv", {"k", "weight"}, spectrum_rows(sp.points));
        meta["continuum_weight"] = sp.continuum_weight;
        meta["bound_weight"] = sp.bound_weight;
        meta["remainder"] = sp.remainder;
    }
    ctx.out.json("run.json", meta);
    return "evolve: steps=" + std::to_string(r.steps) + " s_d=" + sd + " norm_drift=" + num(r.norm_drift);
}

std::string cmd_static_decay(Context& ctx)
{
    const auto& sec = need(ctx.cfg.static_decay, "static_decay");
    PotentialModel m = resolve_model(ctx);
    CriticalData cd = critical_data(m, ctx.cfg.grid);
    std::vector<std::pair<double, double>> cases;
    for (double s : sec.sigmas)
        for (double e : sec.epsilons) cases.emplace_back(s, e);
    std::sort(cases.begin(), cases.end());
    std::vector<StaticDecay> res(cases.size());
    parallel_for(static_cast<int>(cases.size()), ctx.jobs, [&](int i) {
        res[i] = static_decay_check(m, ctx.cfg.grid, cases[i].first, cases[i].second, cd, sec.propagate);
    });
    std::vector<Row> rows;
    json arr = json::array();
    double rmin = 1e300, rmax = 0;
    for (const auto& d : res) {
        double ratio = d.s_d_measured / d.s_d_formula;
        rmin = std::min(rmin, ratio);
        rmax = std::max(rmax, ratio);
        rows.push_back({num(d.sigma), num(d.epsilon), num(d.s_d_measured), num(d.s_d_formula), num(ratio),
                        num(d.k_peak), num(d.delta_width)});
        arr.push_back({{"sigma", d.sigma}, {"epsilon", d.epsilon}, {"s_d_measured", d.s_d_measured},
                       {"s_d_formula", d.s_d_formula}, {"ratio", ratio}, {"norm_drift", d.norm_drift}});
    }
    ctx.out.csv("static_decay.csv",
                {"sigma", "epsilon", "s_d_measured", "s_d_formula", "ratio", "k_peak", "delta_width"}, rows);
    ctx.out.json("static_decay.json", {{"runs", arr}, {"ratio_min", rmin}, {"ratio_max", rmax}});
    return "static-decay: " + std::to_string(res.size()) + " runs, measured/formula in [" + num(rmin) + ", " +
           num(rmax) + "]";
}

json fit_json(const ScalingFit& f)
{
    return {{"slope", f.slope}, {"stderr", f.stderr_slope}, {"r_squared", f.r_squared}, {"intercept", f.intercept}};
}

std::string cmd_short_time(Context& ctx)
{
    const auto& sec = need(ctx.cfg.short_time, "short_time");
    PotentialModel m = resolve_model(ctx);
    CriticalData cd = critical_data(m, ctx.cfg.grid);
    ShortTimeSweep sw = sec.sweep;
    sw.jobs = ctx.jobs;
    ShortTimeStudy st = short_time_study(m, ctx.cfg.grid, cd, sw, sec.propagate);
    std::vector<Row> rows;
    auto add = [&](const char* tag, const std::vector<ShortTimeResult>& rs) {
        for (const auto& r : rs)
            rows.push_back({tag, num(r.cfg.a), num(r.cfg.S), num(r.cfg.epsilon), num(r.p_measured),
                            num(r.p_estimate), r.perturbative ? "true" : "false"});
    };
    add("a", st.a_runs);
    add("S", st.S_runs);
    ctx.out.csv("short_time.csv", {"sweep", "a", "S", "epsilon", "p_measured", "p_estimate", "perturbative"}, rows);
    ctx.out.json("short_time.json", {{"a", fit_json(st.fit_a)},
                                     {"S", fit_json(st.fit_S)},
                                     {"control_p", st.control_p},
                                     {"excluded_runs", st.excluded},
                                     {"warnings", st.warnings}});
    for (const auto& w : st.warnings) std::cerr << "warning: " << w << '\n';
    return "short-time: slope_a=" + num(st.fit_a.slope) + " slope_S=" + num(st.fit_S.slope) +
           " control_p=" + num(st.control_p);
}

std::string cmd_scaling(Context& ctx)
{
    const auto& sec = need(ctx.cfg.scaling, "scaling");
    if (sec.epsilons.size() < 3) throw Error(ErrorKind::study, "fewer than 3 valid points (" +
                                                                std::to_string(sec.epsilons.size()) + " epsilon values given)");
    PotentialModel m = resolve_model(ctx);
    CriticalData cd = critical_data(m, ctx.cfg.grid);
    ScalingOptions opt = sec.options;
    opt.jobs = ctx.jobs;
    ctx.log("running " + std::to_string(sec.epsilons.size()) + " time-dependent runs");
    ScalingStudy st = scaling_study(m, ctx.cfg.grid, cd, sec.epsilons, opt);
    std::vector<Row> rows;
    json runs = json::array();
    for (size_t i = 0; i < st.runs.size(); ++i) {
        const auto& r = st.runs[i];
        std::string name = "runs/run_" + std::to_string(i) + ".csv";
        ctx.out.csv(name, {"s", "survival"}, survival_rows(r.times, r.survival));
        rows.push_back({num(r.epsilon), num(r.s_d), num(r.s_d_refined), r.valid ? "true" : "false"});
        runs.push_back({{"epsilon", r.epsilon}, {"s_d", r.s_d}, {"s_d_refined", r.s_d_refined},
                        {"valid", r.valid}, {"note", r.note}, {"norm_drift", r.norm_drift}, {"file", name}});
    }
    ctx.out.csv("scaling.csv", {"epsilon", "s_d", "s_d_refined", "valid"}, rows);
    json j = fit_json(st.fit);
    j["excluded_runs"] = st.excluded;
    j["warnings"] = st.warnings;
    j["runs"] = runs;
    std::string extra;
    if (!sec.static_sigmas.empty()) {
        ctx.log("static decay table");
        DecayTable t = static_decay_table(m, ctx.cfg.grid, cd, sec.static_sigmas, ctx.jobs, opt.propagate);
        StaticScalingStudy ss = static_scaling_study(t, sec.static_epsilons);
        std::vector<Row> trows;
        for (size_t i = 0; i < t.sigma.size(); ++i) trows.push_back({num(t.sigma[i]), num(t.t_d[i]), num(t.formula[i]), num(t.norm_drift[i])});
        ctx.out.csv("decay_table.csv", {"sigma", "t_d", "formula", "norm_drift"}, trows);
        json sj = fit_json(ss.fit);
        sj["excluded_runs"] = 0;
        sj["epsilon"] = ss.epsilon;
        sj["s_d"] = ss.s_d;
        ctx.out.json("static_scaling.json", sj);
        extra = " static_slope=" + num(ss.fit.slope);
    }
    ctx.out.json("scaling.json", j);
    for (const auto& w : st.warnings) std::cerr << "warning: " << w << '\n';
    return "scaling: slope=" + num(st.fit.slope) + " +- " + num(st.fit.stderr_slope) + " (" +
           std::to_string(st.excluded) + " excluded)" + extra;
}

std::string cmd_spectrum_compare(Context& ctx)
{
    const auto& sec = need(ctx.cfg.spectrum_compare, "spectrum_compare");
    PotentialModel m = resolve_model(ctx);
    const RadialGrid& g = ctx.cfg.grid;
    CriticalData cd = critical_data(m, g);
    FitSection fs;
    fs.sigmas = sec.fit_sigmas;
    fs.max_residual = 1.0;
    ResonanceConstants c = fit_section(ctx, m, cd, fs);
    ResonanceProfile prof = scan_resonance(m, g, sec.sigma, default_k_window(sec.sigma), cd, 0);
    std::vector<double> kg = comparison_k_grid(prof);

    Schedule st;
    st.kind = ScheduleKind::constant;
    st.sigma_const = sec.sigma;
    st.epsilon = 1.0;
    st.s_start = 0.0;
    st.s_end = sec.static_duration;
    std::vector<EvolutionResult> runs(2);
    parallel_for(2, ctx.jobs, [&](int i) {
        runs[i] = propagate(m, g, i == 0 ? st : sec.tent, cd.Phi, cd.Phi, sec.propagate);
    });
    json j;
    j["constants"] = constants_json(c);
    j["profile"] = profile_json(prof);
    std::string summary = "spectrum-compare:";
    const char* names[2] = {"static", "tent"};
    for (int i = 0; i < 2; ++i) {
        OutgoingSpectrum sp = outgoing_spectrum(runs[i].final_state, m, g, runs[i].sigma_final, kg);
        SpectrumComparison cmp = spectrum_comparison(sp.points, c, prof);
        ctx.out.csv(std::string("spectrum_") + names[i] + ".csv", {"k", "weight"}, spectrum_rows(sp.points));
        j[names[i]] = {{"distance", cmp.distance},
                       {"peak_run", cmp.peak_run},
                       {"peak_ref", cmp.peak_ref},
                       {"label", cmp.label},
                       {"continuum_weight", sp.continuum_weight},
                       {"bound_weight", sp.bound_weight},
                       {"remainder", sp.remainder},
                       {"norm_drift", runs[i].norm_drift}};
        summary += std::string(" ") + names[i] + "=" + cmp.label + " (L1 " + num(cmp.distance) + ")";
    }
    ctx.out.json("comparison.json", j);
    return summary;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Supercritical-potential resonance lab"};
    app.require_subcommand(1);
    std::string config_path, out_dir = "out";
    int jobs = std::max(1u, std::thread::hardware_concurrency());
    bool verbose = false;
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--jobs", jobs, "worker threads for independent runs")->check(CLI::PositiveNumber);
    app.add_flag("--verbose", verbose, "progress messages on stderr");
    app.fallthrough();

    using Fn = std::string (*)(Context&);
    const std::map<std::string, std::pair<Fn, const char*>> commands{
        {"critical", {cmd_critical, "critical coupling, Phi, C0 and the identity residual"}},
        {"track", {cmd_track, "gap eigenvalue across a list of sigma"}},
        {"resonance", {cmd_resonance, "outgoing-transform profiles"}},
        {"fit", {cmd_fit, "fit the resonance constants over a sigma decade"}},
        {"evolve", {cmd_evolve, "single time-dependent run"}},
        {"static-decay", {cmd_static_decay, "frozen-operator decay time vs formula"}},
        {"short-time", {cmd_short_time, "short overcriticality probability sweeps"}},
        {"scaling", {cmd_scaling, "decay-time scaling in epsilon"}},
        {"spectrum-compare", {cmd_spectrum_compare, "static vs tent outgoing spectra"}},
    };
    for (const auto& [name, c] : commands) app.add_subcommand(name, c.second);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    std::string which = app.get_subcommands().front()->get_name();
    try {
        RunConfig cfg = load_config(config_path);
        Context ctx{cfg, artifacts::OutputDir(out_dir, cfg.hash), jobs, verbose, {}};
        std::string summary = commands.at(which).first(ctx);
        ctx.out.finish(which);
        std::cout << summary << '\n';
        return 0;
    } catch (const Error& e) {
        std::cerr << "spclab " << which << ": " << kind_name(e.kind()) << ": " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "spclab " << which << ": numerical failure: " << e.what() << '\n';
        return 3;
    }
}
