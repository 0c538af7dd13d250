#include "spc/evolution.hpp"

#include <algorithm>
#include <cmath>

#include "spc/tridiag.hpp"

namespace spc {

double Schedule::sigma(double s) const
{
    switch (kind) {
    case ScheduleKind::linear: return slope * s;
    case ScheduleKind::tent: return sigma_max - slope * std::abs(s);
    case ScheduleKind::constant: return sigma_const;
    }
    return 0.0;
}

std::pair<double, double> Schedule::sigma_range() const
{
    double a = sigma(s_start), b = sigma(s_end);
    double lo = std::min(a, b), hi = std::max(a, b);
    if (kind == ScheduleKind::tent && s_start < 0.0 && s_end > 0.0) hi = std::max(hi, sigma_max);
    return {lo, hi};
}

ScheduleKind parse_schedule_kind(const std::string& s)
{
    if (s == "linear") return ScheduleKind::linear;
    if (s == "tent") return ScheduleKind::tent;
    if (s == "constant") return ScheduleKind::constant;
    throw Error(ErrorKind::configuration, "unknown schedule '" + s + "' (expected linear, tent or constant)");
}

std::string schedule_name(ScheduleKind k)
{
    switch (k) {
    case ScheduleKind::linear: return "linear";
    case ScheduleKind::tent: return "tent";
    case ScheduleKind::constant: return "constant";
    }
    return "?";
}

double operator_norm_bound(const DiscreteOperator& op)
{
    auto [lo, hi] = tridiag::gershgorin(op.diag, op.off);
    return std::max(std::abs(lo), std::abs(hi));
}

namespace {

// Factors of I + i theta D (real symmetric tridiagonal D), eliminated from the
// wall inwards so that a change confined to the first rows only needs those
// rows refactored.  The Hermitian part is the identity, so elimination without
// pivoting is stable.
struct Cayley {
    Eigen::VectorXcd off;      // i theta e
    Eigen::VectorXcd q;        // multipliers
    Eigen::VectorXcd inv_den;
    cplx it;

    void factor(const Eigen::VectorXd& d, const Eigen::VectorXd& e, double theta)
    {
        const int N = static_cast<int>(d.size());
        it = cplx(0.0, theta);
        off = it * e.cast<cplx>();
        q.resize(N - 1);
        inv_den.resize(N);
        inv_den[N - 1] = 1.0 / (1.0 + it * d[N - 1]);
        refactor(d, Eigen::VectorXd::Zero(N), 0.0, N - 2);
    }

    // rows 0..last take the diagonal d + c w
    void refactor(const Eigen::VectorXd& d, const Eigen::VectorXd& w, double c, int last)
    {
        for (int i = last; i >= 0; --i) {
            q[i] = off[i] * inv_den[i + 1];
            inv_den[i] = 1.0 / (1.0 + it * (d[i] + c * w[i]) - off[i] * q[i]);
        }
    }

    // x <- 2 (I + i theta D)^{-1} x - x, the implicit-midpoint step.
    void step(Eigen::VectorXcd& x, Eigen::VectorXcd& y) const
    {
        const int N = static_cast<int>(x.size());
        y[N - 1] = x[N - 1] * inv_den[N - 1];
        for (int i = N - 2; i >= 0; --i) y[i] = (x[i] - off[i] * y[i + 1]) * inv_den[i];
        for (int i = 1; i < N; ++i) y[i] -= q[i - 1] * y[i - 1];
        x = 2.0 * y - x;
    }
};

double vnorm2(const Eigen::VectorXcd& x, double h) { return x.squaredNorm() * h; }

} // namespace

EvolutionResult propagate(const PotentialModel& model, const RadialGrid& g, const Schedule& sch,
                          const RadialSpinor& psi0, const RadialSpinor& Phi, const PropagateOptions& opt)
{
    if (!(sch.epsilon > 0.0)) throw Error(ErrorKind::configuration, "schedule: epsilon must be positive");
    if (!(sch.s_end > sch.s_start)) throw Error(ErrorKind::configuration, "schedule: s_end must exceed s_start");
    if (!(opt.step_factor > 0.0) || opt.step_factor >= 0.5)
        throw Error(ErrorKind::configuration, "step factor (ds/eps)*||D|| must lie in (0, 0.5)");
    if (opt.record_every < 1) throw Error(ErrorKind::configuration, "record_every must be >= 1");

    const DiscreteOperator op0 = assemble_operator(g, model, 0.0);
    const Eigen::VectorXd w = shape_weights(op0);
    const double dsig = model.sign * model.lambda_slope;
    auto [slo, shi] = sch.sigma_range();
    const double norm_D = std::max(operator_norm_bound(assemble_operator(g, model, slo)),
                                   operator_norm_bound(assemble_operator(g, model, shi)));

    const double span = sch.s_end - sch.s_start;
    const long nsteps = static_cast<long>(std::ceil(span * norm_D / (opt.step_factor * sch.epsilon)));
    const double ds = span / nsteps;
    const double theta = 0.5 * ds / sch.epsilon;

    Eigen::VectorXcd x = op0.to_vector(psi0);
    const Eigen::VectorXcd phi = op0.to_vector(Phi);
    const double h = g.h;
    const double n0 = vnorm2(x, h);
    if (std::abs(n0 - 1.0) > 1e-8) throw Error(ErrorKind::usage, "propagate: initial state must have unit norm");

    EvolutionResult res;
    res.ds = ds;
    double drift = 0.0;
    auto record = [&](double s) {
        res.times.push_back(s);
        res.survival.push_back(std::abs(phi.dot(x)) * h);
        drift = std::max(drift, std::abs(vnorm2(x, h) - n0));
    };
    record(sch.s_start);

    Cayley cay;
    Eigen::VectorXcd y(x.size());
    const bool frozen = sch.kind == ScheduleKind::constant;
    cay.factor(op0.diag + dsig * sch.sigma(sch.s_start) * w, op0.off, theta);
    int last = static_cast<int>(w.size()) - 2;   // rows touched by sigma
    while (last >= 0 && w[last + 1] == 0.0) --last;
    last = std::min(last + 1, static_cast<int>(w.size()) - 2);

    double s = sch.s_start;
    long k = 0;
    for (; k < nsteps; ++k) {
        if (!frozen) {
            const double sm = sch.s_start + (k + 0.5) * ds;
            cay.refactor(op0.diag, w, dsig * sch.sigma(sm), last);
        }
        cay.step(x, y);
        s = sch.s_start + (k + 1) * ds;
        if ((k + 1) % opt.record_every == 0 || k + 1 == nsteps) {
            record(s);
            if (opt.stop_below >= 0.0 && s >= 0.0 && res.survival.back() < opt.stop_below) {
                ++k;
                break;
            }
        }
    }
    if (res.times.back() != s) record(s);
    res.steps = k;
    res.s_final = s;
    res.sigma_final = sch.sigma(s);
    res.norm_drift = drift;
    res.final_state = op0.to_spinor(x, NormKind::unit);
    if (drift > 1e-8) throw Error(ErrorKind::numerical, "propagate: norm drift " + std::to_string(drift) + " exceeds 1e-8");
    if (!opt.spectrum_k.empty()) {
        auto sp = outgoing_spectrum(res.final_state, model, g, res.sigma_final, opt.spectrum_k);
        res.spectrum = sp.points;
    }
    return res;
}

double decay_time(const std::vector<double>& t, const std::vector<double>& v)
{
    if (t.size() != v.size()) throw Error(ErrorKind::usage, "decay_time: size mismatch");
    for (size_t i = 1; i < t.size(); ++i) {
        if (t[i] < 0.0) continue;
        if (v[i] <= 0.5 && v[i - 1] > 0.5) {
            if (t[i - 1] < 0.0) return t[i];   // crossing straddles s = 0
            return t[i - 1] + (v[i - 1] - 0.5) / (v[i - 1] - v[i]) * (t[i] - t[i - 1]);
        }
    }
    throw Error(ErrorKind::numerical, "no survival crossing of 1/2: undercritical or run too short");
}

double decay_time(const EvolutionResult& r) { return decay_time(r.times, r.survival); }

StaticDecay static_decay_check(const PotentialModel& model, const RadialGrid& g, double sigma, double epsilon,
                               const CriticalData& crit, const PropagateOptions& opt)
{
    if (!(sigma > 0.0)) throw Error(ErrorKind::configuration, "static decay needs sigma > 0");
    StaticDecay out;
    out.sigma = sigma;
    out.epsilon = epsilon;
    ResonanceProfile p = scan_resonance(model, g, sigma, default_k_window(sigma), crit, 0);
    out.k_peak = p.k_peak;
    out.delta_width = p.delta_width;
    out.s_d_formula = 4.0 * epsilon / (p.k_peak * p.delta_width);

    Schedule sch;
    sch.kind = ScheduleKind::constant;
    sch.sigma_const = sigma;
    sch.epsilon = epsilon;
    sch.s_start = 0.0;
    sch.s_end = 10.0 * out.s_d_formula;
    PropagateOptions o = opt;
    if (o.stop_below < 0.0) o.stop_below = 0.45;
    EvolutionResult r = propagate(model, g, sch, crit.Phi, crit.Phi, o);
    out.norm_drift = r.norm_drift;
    out.s_d_measured = decay_time(r);
    return out;
}

ShortTimeResult short_time_probability(const PotentialModel& model, const RadialGrid& g, const ShortTimeConfig& cfg,
                                       const CriticalData& crit, const PropagateOptions& opt)
{
    if (cfg.a < 0.0 || !(cfg.S > 0.0) || !(cfg.epsilon > 0.0))
        throw Error(ErrorKind::configuration, "short-time run needs a >= 0, S > 0, epsilon > 0");
    ShortTimeResult out;
    out.cfg = cfg;
    Schedule sch;
    sch.kind = ScheduleKind::constant;
    sch.sigma_const = cfg.a / model.lambda_slope;
    sch.epsilon = cfg.epsilon;
    sch.s_start = 0.0;
    sch.s_end = cfg.S;
    PropagateOptions o = opt;
    o.stop_below = -1.0;
    EvolutionResult r = propagate(model, g, sch, crit.Phi, crit.Phi, o);
    out.norm_drift = r.norm_drift;

    const DiscreteOperator op0 = assemble_operator(g, model, 0.0);
    const double h = g.h;
    const Eigen::VectorXcd phi = op0.to_vector(crit.Phi);
    auto perp = [&](Eigen::VectorXcd v) {
        cplx c = phi.dot(v) * h;
        v -= c * phi;
        return vnorm2(v, h);
    };
    out.p_measured = perp(op0.to_vector(r.final_state));
    Eigen::VectorXcd v = (model.sign * cfg.a) * shape_weights(op0).cast<cplx>().cwiseProduct(phi);
    out.p_estimate = std::pow(cfg.S / cfg.epsilon, 2) * perp(v);
    out.perturbative = out.p_measured <= 0.1;
    return out;
}

OutgoingSpectrum outgoing_spectrum(const RadialSpinor& psi, const PotentialModel& model, const RadialGrid& g,
                                   double sigma, const std::vector<double>& k_grid)
{
    OutgoingSpectrum out;
    for (double k : k_grid) {
        ContinuumSolution c = continuum_wave(model, g, sigma, k);
        out.points.push_back({k, std::norm(inner_product(c.wave, psi))});
    }
    for (size_t i = 1; i < out.points.size(); ++i)
        out.continuum_weight += 0.5 * (out.points[i].weight + out.points[i - 1].weight) *
                                (out.points[i].k - out.points[i - 1].k);
    DiscreteOperator op = assemble_operator(g, model, sigma);
    const Eigen::VectorXcd x = op.to_vector(psi);
    for (double E : tridiag::eigenvalues_in(op.diag, op.off, -1.0, 1.0)) {
        Eigen::VectorXd v = tridiag::eigenvector(op.diag, op.off, E);
        v /= std::sqrt(v.squaredNorm() * g.h);
        out.bound_weight += std::norm(v.cast<cplx>().dot(x) * g.h);
    }
    out.remainder = 1.0 - out.continuum_weight - out.bound_weight;
    return out;
}

AdiabaticControl adiabatic_control(const PotentialModel& model, const RadialGrid& g, const Schedule& sch,
                                   const PropagateOptions& opt)
{
    auto [lo, hi] = sch.sigma_range();
    if (!(hi < 0.0)) throw Error(ErrorKind::configuration, "adiabatic control needs a schedule that stays subcritical");
    BoundState b0 = bound_state_at(model, g, sch.sigma(sch.s_start));
    BoundState b1 = bound_state_at(model, g, sch.sigma(sch.s_end));
    PropagateOptions o = opt;
    o.stop_below = -1.0;
    EvolutionResult r = propagate(model, g, sch, b0.wavefunction, b1.wavefunction, o);
    AdiabaticControl out;
    out.epsilon = sch.epsilon;
    out.loss = 1.0 - std::pow(r.survival.back(), 2);
    out.norm_drift = r.norm_drift;
    return out;
}

} // namespace spc
