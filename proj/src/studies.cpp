#include "spc/studies.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace spc {

void parallel_for(int n, int jobs, const std::function<void(int)>& fn)
{
    if (jobs < 1) throw Error(ErrorKind::configuration, "jobs must be >= 1");
    const int workers = std::min(jobs, n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(mu);
                    if (!first) first = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (first) std::rethrow_exception(first);
}

ScalingFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size()) throw Error(ErrorKind::usage, "loglog_fit: size mismatch");
    if (x.size() < 3) throw Error(ErrorKind::study, "fewer than 3 valid points for a scaling fit");
    const int n = static_cast<int>(x.size());
    double sx = 0, sy = 0;
    std::vector<double> lx(n), ly(n);
    ScalingFit f;
    for (int i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw Error(ErrorKind::usage, "loglog_fit: data must be positive");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
        sx += lx[i];
        sy += ly[i];
        f.points.emplace_back(x[i], y[i]);
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx == 0.0) throw Error(ErrorKind::study, "loglog_fit: x values coincide");
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double sse = 0;
    for (int i = 0; i < n; ++i) sse += std::pow(ly[i] - f.intercept - f.slope * lx[i], 2);
    f.stderr_slope = n > 2 ? std::sqrt(sse / (n - 2) / sxx) : 0.0;
    f.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    return f;
}

double fixed_point_sd(const ResonanceConstants& c, double epsilon)
{
    const double v = 4.0 * epsilon * (2.0 * c.absC2 / c.absC3) * std::pow(c.absC2 / c.C0, 1.5);
    return std::pow(v, 0.4);
}

DecayTable static_decay_table(const PotentialModel& model, const RadialGrid& g, const CriticalData& crit,
                              std::vector<double> sigmas, int jobs, const PropagateOptions& opt)
{
    std::sort(sigmas.begin(), sigmas.end());
    DecayTable t;
    t.sigma = sigmas;
    t.t_d.assign(sigmas.size(), 0.0);
    t.formula.assign(sigmas.size(), 0.0);
    t.norm_drift.assign(sigmas.size(), 0.0);
    parallel_for(static_cast<int>(sigmas.size()), jobs, [&](int i) {
        StaticDecay d = static_decay_check(model, g, sigmas[i], 1.0, crit, opt);
        t.t_d[i] = d.s_d_measured;
        t.formula[i] = d.s_d_formula;
        t.norm_drift[i] = d.norm_drift;
    });
    return t;
}

double self_consistent_sd(const DecayTable& t, double epsilon)
{
    const int n = static_cast<int>(t.sigma.size());
    if (n < 2) throw Error(ErrorKind::study, "decay table needs at least two entries");
    auto f = [&](int i) { return std::log(t.sigma[i]) - std::log(epsilon * t.t_d[i]); };
    for (int i = 0; i + 1 < n; ++i) {
        double a = f(i), b = f(i + 1);
        if (a <= 0.0 && b >= 0.0) {
            double u = a == b ? 0.0 : -a / (b - a);
            return std::exp((1.0 - u) * std::log(t.sigma[i]) + u * std::log(t.sigma[i + 1]));
        }
    }
    throw Error(ErrorKind::study, "self-consistent sigma for eps=" + std::to_string(epsilon) +
                                      " lies outside the decay table");
}

StaticScalingStudy static_scaling_study(const DecayTable& table, std::vector<double> epsilons)
{
    std::sort(epsilons.begin(), epsilons.end());
    StaticScalingStudy st;
    st.table = table;
    st.epsilon = epsilons;
    for (double e : epsilons) st.s_d.push_back(self_consistent_sd(table, e));
    st.fit = loglog_fit(st.epsilon, st.s_d);
    return st;
}

ScalingStudy scaling_study(const PotentialModel& model, const RadialGrid& g, const CriticalData& crit,
                           std::vector<double> epsilons, const ScalingOptions& opt)
{
    std::sort(epsilons.begin(), epsilons.end());
    for (double e : epsilons)
        if (!(e > 0.0)) throw Error(ErrorKind::configuration, "scaling: epsilon values must be positive");
    if (epsilons.size() < 3)
        throw Error(ErrorKind::study, "fewer than 3 valid points (" + std::to_string(epsilons.size()) + " epsilon values given)");
    ScalingStudy st;
    st.runs.resize(epsilons.size());
    parallel_for(static_cast<int>(epsilons.size()), opt.jobs, [&](int i) {
        ScalingRun& run = st.runs[i];
        run.epsilon = epsilons[i];
        Schedule sch;
        sch.kind = ScheduleKind::linear;
        sch.slope = opt.slope;
        sch.epsilon = epsilons[i];
        sch.s_start = -opt.lead * epsilons[i];
        sch.s_end = opt.s_cap;
        PropagateOptions po = opt.propagate;
        po.stop_below = 0.45;
        try {
            EvolutionResult r = propagate(model, g, sch, crit.Phi, crit.Phi, po);
            run.norm_drift = r.norm_drift;
            run.times = r.times;
            run.survival = r.survival;
            run.s_d = decay_time(r);
            run.valid = true;
            if (opt.refine_check) {
                po.step_factor *= 0.5;
                EvolutionResult r2 = propagate(model, g, sch, crit.Phi, crit.Phi, po);
                run.s_d_refined = decay_time(r2);
                run.norm_drift = std::max(run.norm_drift, r2.norm_drift);
                if (std::abs(run.s_d_refined / run.s_d - 1.0) > 0.05) {
                    run.valid = false;
                    run.note = "s_d moved by more than 5% under step halving";
                }
            }
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::numerical) throw;
            run.valid = false;
            run.note = e.what();
        }
    });
    std::vector<double> x, y;
    for (const auto& r : st.runs) {
        if (r.valid) {
            x.push_back(r.epsilon);
            y.push_back(r.s_d);
        } else {
            ++st.excluded;
            st.warnings.push_back("eps=" + std::to_string(r.epsilon) + " excluded: " + r.note);
        }
    }
    if (x.size() < 3)
        throw Error(ErrorKind::study, "fewer than 3 valid points (" + std::to_string(x.size()) + " of " +
                                          std::to_string(epsilons.size()) + ")");
    st.fit = loglog_fit(x, y);
    return st;
}

ShortTimeStudy short_time_study(const PotentialModel& model, const RadialGrid& g, const CriticalData& crit,
                                const ShortTimeSweep& sw, const PropagateOptions& opt)
{
    ShortTimeStudy st;
    std::vector<double> as = sw.a_values, Ss = sw.S_values;
    std::sort(as.begin(), as.end());
    std::sort(Ss.begin(), Ss.end());
    const int na = static_cast<int>(as.size()), nS = static_cast<int>(Ss.size());
    st.a_runs.resize(na);
    st.S_runs.resize(nS);
    ShortTimeResult control;
    parallel_for(na + nS + 1, sw.jobs, [&](int i) {
        ShortTimeConfig c{sw.a_fixed, sw.S_fixed, sw.epsilon};
        if (i < na) c.a = as[i];
        else if (i < na + nS) c.S = Ss[i - na];
        else c.a = 0.0;
        ShortTimeResult r = short_time_probability(model, g, c, crit, opt);
        if (i < na) st.a_runs[i] = r;
        else if (i < na + nS) st.S_runs[i - na] = r;
        else control = r;
    });
    st.control_p = control.p_measured;
    auto collect = [&](const std::vector<ShortTimeResult>& runs, bool by_a) {
        std::vector<double> x, y;
        for (const auto& r : runs) {
            if (r.p_measured < sw.max_p && r.p_measured > 0.0) {
                x.push_back(by_a ? r.cfg.a : r.cfg.S);
                y.push_back(r.p_measured);
            } else {
                ++st.excluded;
                st.warnings.push_back(std::string(by_a ? "a=" : "S=") + std::to_string(by_a ? r.cfg.a : r.cfg.S) +
                                      " excluded: p=" + std::to_string(r.p_measured) + " outside perturbative guard");
            }
        }
        return loglog_fit(x, y);
    };
    st.fit_a = collect(st.a_runs, true);
    st.fit_S = collect(st.S_runs, false);
    return st;
}

std::vector<SpectrumPoint> profile_density(const ResonanceConstants& c, double sigma, const std::vector<double>& k)
{
    std::vector<SpectrumPoint> out;
    for (double q : k) out.push_back({q, q * q * resonance_shape(c.C, c.C0, c.absC2, c.absC3, sigma, q)});
    return out;
}

std::vector<double> comparison_k_grid(const ResonanceProfile& p, int dense)
{
    std::vector<double> k = default_k_window(p.sigma);
    const double a = p.k_peak - 3.0 * p.delta_width, b = p.k_peak + 3.0 * p.delta_width;
    for (int i = 0; i < dense; ++i) k.push_back(a + (b - a) * i / (dense - 1));
    std::sort(k.begin(), k.end());
    k.erase(std::unique(k.begin(), k.end()), k.end());
    return k;
}

SpectrumComparison spectrum_comparison(const std::vector<SpectrumPoint>& run, const ResonanceConstants& c,
                                       const ResonanceProfile& profile)
{
    SpectrumComparison out;
    if (run.empty()) throw Error(ErrorKind::usage, "spectrum_comparison: empty spectrum");
    const double a = profile.k_peak - 3.0 * profile.delta_width, b = profile.k_peak + 3.0 * profile.delta_width;
    std::vector<double> k, u, v;
    for (const auto& p : run) {
        if (p.k >= a && p.k <= b) {
            k.push_back(p.k);
            u.push_back(p.weight);
            v.push_back(p.k * p.k * resonance_shape(c.C, c.C0, c.absC2, c.absC3, profile.sigma, p.k));
        }
    }
    if (k.size() < 3) throw Error(ErrorKind::usage, "spectrum_comparison: fewer than 3 points near the peak");
    auto integral = [&](const std::vector<double>& f) {
        double s = 0;
        for (size_t i = 1; i < k.size(); ++i) s += 0.5 * (f[i] + f[i - 1]) * (k[i] - k[i - 1]);
        return s;
    };
    const double A = integral(u), B = integral(v);
    if (!(A > 0.0) || !(B > 0.0)) throw Error(ErrorKind::numerical, "spectrum_comparison: vanishing weight");
    std::vector<double> d(k.size());
    for (size_t i = 0; i < k.size(); ++i) d[i] = std::abs(u[i] / A - v[i] / B);
    out.distance = integral(d);
    out.peak_run = std::max_element(run.begin(), run.end(), [](auto& x, auto& y) { return x.weight < y.weight; })->k;
    out.peak_ref = profile.k_peak;
    out.label = out.distance < 0.3 ? "resonance-like" : "washed-out";
    return out;
}

} // namespace spc
