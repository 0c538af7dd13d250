#include "spc/statics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "spc/shooting.hpp"
#include "spc/tridiag.hpp"

namespace spc {

namespace {

using detail::shoot_in;
using detail::shoot_out;

double match_radius(const DiscreteOperator& op)
{
    double R = op.model.support();
    if (!(R > 0.0) || !std::isfinite(R) || R >= op.grid.r_max) R = 0.5 * op.grid.r_max;
    return R;
}

int oriented_sign(const PotentialModel& m) { return m.sign >= 0 ? 1 : -1; }

DiscreteOperator at_coupling(const PotentialModel& tmpl, const RadialGrid& g, double lam)
{
    PotentialModel m = tmpl;
    m.lambda_c = lam;
    return assemble_operator(g, m, 0.0);
}

// ordered eigenvalue of sign * H (the diving state moves up in this frame)
double oriented_eigenvalue(const DiscreteOperator& op, int k)
{
    const double o = oriented_sign(op.model);
    Eigen::VectorXd d = o * op.diag, e = o * op.off;
    return tridiag::eigenvalue(d, e, k);
}

int oriented_count(const DiscreteOperator& op, double x)
{
    const double o = oriented_sign(op.model);
    Eigen::VectorXd d = o * op.diag, e = o * op.off;
    return tridiag::count_below(d, e, x);
}

template <class F>
double bracket_root(F f, double a, double b, double fa, double fb, int bits = 50)
{
    boost::uintmax_t it = 200;
    auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb,
                                               boost::math::tools::eps_tolerance<double>(bits), it);
    return 0.5 * (r.first + r.second);
}

void fix_sign(Eigen::VectorXd& v)
{
    // integer-point entries sit at odd indices; make the largest one positive
    int best = 1;
    for (int i = 1; i < v.size(); i += 2)
        if (std::abs(v[i]) > std::abs(v[best])) best = i;
    if (v[best] < 0) v = -v;
}

double sph_i(int l, double x) { return std::sqrt(std::numbers::pi / (2 * x)) * boost::math::cyl_bessel_i(l + 0.5, x); }
double sph_k(int l, double x) { return std::sqrt(std::numbers::pi / (2 * x)) * boost::math::cyl_bessel_k(l + 0.5, x); }

} // namespace

double matching_function(const DiscreteOperator& op, double E)
{
    const int N = op.dim();
    int m = std::clamp(op.index_near(match_radius(op)), 1, N - 3);
    std::vector<double> x, y;
    shoot_out(op, E, m + 1, x, false);
    shoot_in(op, E, m, y, false);
    double w = x[m] * y[m + 1] - x[m + 1] * y[m];
    return w / (std::hypot(x[m], x[m + 1]) * std::hypot(y[m], y[m + 1]));
}

BoundState solve_bound_state(const DiscreteOperator& op, double e_lo, double e_hi)
{
    if (!(e_lo < e_hi) || e_lo < -1.0 || e_hi > 1.0)
        throw Error(ErrorKind::usage, "bound-state bracket must satisfy -1 <= E_lo < E_hi <= 1");
    auto f = [&](double E) { return matching_function(op, E); };
    double flo = f(e_lo), fhi = f(e_hi);
    int count = tridiag::count_below(op.diag, op.off, e_hi) - tridiag::count_below(op.diag, op.off, e_lo);
    if (count == 0)
        throw Error(ErrorKind::no_bound_state, "no bound state in bracket");
    if (count > 1)
        throw Error(ErrorKind::model, "more than one eigenvalue in bracket (" + std::to_string(count) +
                                          "); the model admits several gap states");
    if (flo * fhi > 0)
        throw Error(ErrorKind::numerical, "matching function has no sign change around the eigenvalue");

    double E = bracket_root(f, e_lo, e_hi, flo, fhi, 52);

    // assemble the eigenvector from both shots
    const int N = op.dim();
    int m = std::clamp(op.index_near(match_radius(op)), 1, N - 3);
    std::vector<double> x, y;
    shoot_out(op, E, m + 1, x, true);
    shoot_in(op, E, m, y, true);
    double t = (x[m] * y[m] + x[m + 1] * y[m + 1]) / (y[m] * y[m] + y[m + 1] * y[m + 1]);
    Eigen::VectorXd v(N);
    for (int i = 0; i <= m; ++i) v[i] = x[i];
    for (int i = m + 1; i < N; ++i) v[i] = t * y[i];
    v /= std::sqrt(v.squaredNorm() * op.grid.h);
    fix_sign(v);

    BoundState bs;
    bs.energy = E;
    bs.sigma = op.sigma;
    bs.kappa = std::sqrt(std::max(0.0, 1.0 - E * E));
    bs.wavefunction = op.to_spinor(v, NormKind::unit);
    return bs;
}

std::vector<double> dense_spectrum_oracle(const DiscreteOperator& op)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.dense(), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::numerical, "dense eigensolver failed");
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(ev.begin(), ev.end());
    return ev;
}

std::vector<double> gap_eigenvalues(const DiscreteOperator& op, double a, double b)
{
    return tridiag::eigenvalues_in(op.diag, op.off, a, b);
}

double tail_exponent(const BoundState& bs, double r_from, double r_to)
{
    const RadialSpinor& s = bs.wavefunction;
    const int l = std::abs(s.channel);
    const Eigen::VectorXcd& w = s.channel > 0 ? s.u1 : s.u2;   // integer-point component
    std::vector<double> r, lw;
    for (int i = 0; i + 1 < s.grid.n; ++i) {
        double ri = s.grid.r(i + 1);
        if (ri > r_from && ri < r_to && std::abs(w[i]) > 0.0) {
            r.push_back(ri);
            lw.push_back(std::log(std::abs(w[i])));
        }
    }
    if (r.size() < 3) throw Error(ErrorKind::resolution, "tail fit: too few points in window");
    auto cost = [&](double q) {
        double mean = 0.0;
        std::vector<double> diff(r.size());
        for (size_t i = 0; i < r.size(); ++i) {
            diff[i] = lw[i] - std::log(r[i] * sph_k(l, q * r[i]));
            mean += diff[i];
        }
        mean /= r.size();
        double c = 0.0;
        for (double dd : diff) c += (dd - mean) * (dd - mean);
        return c;
    };
    auto res = boost::math::tools::brent_find_minima(cost, 1e-4, std::min(20.0, 600.0 / r_to), 40);
    return res.first;
}

namespace analytic {

namespace {

int l_upper(int kappa) { return kappa > 0 ? kappa : -kappa - 1; }

// interior regular solution at r, scaled so it is continuous in p^2 = W^2 - 1;
// returns g and (W+1) f
std::pair<double, double> interior(double E, double depth, double r, int kappa)
{
    const double W = E - depth;
    const double p2 = W * W - 1.0;
    const int lg = l_upper(kappa);
    const int lf = kappa > 0 ? kappa - 1 : -kappa;
    double g, fh;
    if (p2 > 0) {
        double p = std::sqrt(p2);
        g = r * boost::math::sph_bessel(lg, p * r) / std::pow(p, lg);
        double jf = r * boost::math::sph_bessel(lf, p * r) / std::pow(p, lf);
        fh = kappa > 0 ? jf : -p2 * jf;
    } else if (p2 < 0) {
        double q = std::sqrt(-p2);
        g = r * sph_i(lg, q * r) / std::pow(q, lg);
        double jf = r * sph_i(lf, q * r) / std::pow(q, lf);
        fh = kappa > 0 ? jf : q * q * jf;
    } else {
        // p = 0: leading power of the series
        auto dfact = [](int l) { double v = 1; for (int k = 2 * l + 1; k > 1; k -= 2) v *= k; return v; };
        g = std::pow(r, lg + 1) / dfact(lg);
        double jf = std::pow(r, lf + 1) / dfact(lf);
        fh = kappa > 0 ? jf : 0.0;
    }
    return {g, fh};
}

} // namespace

double well_matching(double E, double depth, double radius, int kappa)
{
    const double W = E - depth;
    const double q0 = std::sqrt(std::max(1e-300, 1.0 - E * E));
    const int lg = l_upper(kappa);
    auto [g_in, fh_in] = interior(E, depth, radius, kappa);
    // exterior decaying solution; the common factor e^{-q0 R} is dropped
    const double x = q0 * radius;
    const double scale = std::exp(x);
    double G_out = radius * sph_k(lg, x) * scale;
    double Fh_out = kappa > 0 ? -q0 * radius * sph_k(lg - 1, x) * scale
                              : -q0 * radius * sph_k(lg + 1, x) * scale;
    // g_in F_out - f_in G_out, multiplied by (W+1)(E+1)
    return (W + 1.0) * g_in * Fh_out - (E + 1.0) * fh_in * G_out;
}

double well_energy(double depth, double radius, int kappa, double e_lo, double e_hi)
{
    auto f = [&](double E) { return well_matching(E, depth, radius, kappa); };
    double fa = f(e_lo), fb = f(e_hi);
    if (fa * fb > 0) throw Error(ErrorKind::no_bound_state, "analytic well: no sign change in bracket");
    return bracket_root(f, e_lo, e_hi, fa, fb, 52);
}

double well_threshold_coupling(double radius, int kappa, double lam_lo, double lam_hi)
{
    // exterior E = 1 solutions: (r^-kappa, 0) for kappa > 0, (2 r^(kappa+1)/(1+2 kappa), r^kappa) otherwise
    auto f = [&](double lam) {
        auto [g_in, fh_in] = interior(1.0, lam, radius, kappa);
        const double W = 1.0 - lam;
        double G_ext, F_ext;
        if (kappa > 0) {
            G_ext = std::pow(radius, -kappa);
            F_ext = 0.0;
        } else {
            G_ext = 2.0 * std::pow(radius, kappa + 1) / (1.0 + 2.0 * kappa);
            F_ext = std::pow(radius, kappa);
        }
        return (W + 1.0) * g_in * F_ext - fh_in * G_ext;
    };
    double fa = f(lam_lo), fb = f(lam_hi);
    if (fa * fb > 0) throw Error(ErrorKind::model, "analytic threshold: no sign change in coupling range");
    return bracket_root(f, lam_lo, lam_hi, fa, fb, 52);
}

} // namespace analytic

CriticalCoupling find_critical_coupling(const PotentialModel& tmpl, const RadialGrid& g,
                                        const CriticalSearch& search)
{
    if (search.edge_offsets.size() != 3)
        throw Error(ErrorKind::configuration, "critical search needs three edge offsets");
    if (!(search.lambda_hi > search.lambda_lo))
        throw Error(ErrorKind::configuration, "critical search: empty coupling range");

    const double dmax = *std::max_element(search.edge_offsets.begin(), search.edge_offsets.end());
    DiscreteOperator lo = at_coupling(tmpl, g, search.lambda_lo);
    // the highest state below the edge is the first to reach it as the coupling grows
    int branch = oriented_count(lo, 1.0 - dmax) - 1;
    if (branch < 0) throw Error(ErrorKind::model, "no state below the continuum edge at lambda_lo");

    CriticalCoupling out;
    out.branch = branch;
    for (double delta : search.edge_offsets) {
        auto f = [&](double lam) { return oriented_eigenvalue(at_coupling(tmpl, g, lam), branch) - (1.0 - delta); };
        double fa = f(search.lambda_lo), fb = f(search.lambda_hi);
        if (fb < 0)
            throw Error(ErrorKind::model, "no diving bound state reaches the edge in the coupling search range");
        if (fa >= 0)
            throw Error(ErrorKind::model, "state already at the edge at lambda_lo; lower the search range");
        out.lambdas.push_back(bracket_root(f, search.lambda_lo, search.lambda_hi, fa, fb, 48));
    }
    // quadratic through the three points, evaluated at zero offset
    const auto& x = search.edge_offsets;
    const auto& y = out.lambdas;
    double q = 0.0;
    for (int i = 0; i < 3; ++i) {
        double li = 1.0;
        for (int j = 0; j < 3; ++j)
            if (j != i) li *= (0.0 - x[j]) / (x[i] - x[j]);
        q += y[i] * li;
    }
    double lin = y[2] - x[2] * (y[1] - y[2]) / (x[1] - x[2]);
    out.lambda_c = q;
    out.uncertainty = std::abs(q - lin);
    return out;
}

double critical_identity_residual(const RadialSpinor& phi, const PotentialModel& model, double sigma)
{
    const int o = oriented_sign(model);
    const int kap = o * model.channel;   // channel in the frame where the state rises to +1
    const int n = phi.grid.n;
    const double h = phi.grid.h;
    const double lam = model.lambda(sigma);
    const Eigen::VectorXcd& w = phi.channel > 0 ? phi.u1 : phi.u2;   // integer points
    const Eigen::VectorXcd& v = phi.channel > 0 ? phi.u2 : phi.u1;   // half points

    double num, den;
    if (kap > 0) {
        // coefficient of the exterior solution that grows like r^kappa at E = 1:
        //   lim r^-k v(r) + int V w r^-k dr  (zero for the threshold state)
        double boundary = v[0].real() / std::pow(0.5 * h, kap);
        double integral = 0.0, absint = 0.0;
        for (int i = 1; i < n; ++i) {
            double V = lam * model.shape_average((i - 0.5) * h, (i + 0.5) * h);
            double t = V * w[i - 1].real() * std::pow(i * h, -kap) * h;
            integral += t;
            absint += std::abs(t);
        }
        num = std::abs(boundary + integral);
        den = std::abs(boundary) + absint;
    } else {
        // upper-component moment int V u_upper r dr
        double integral = 0.0, absint = 0.0;
        for (int j = 0; j < n; ++j) {
            double r = (j + 0.5) * h;
            double V = lam * model.shape_average(j * h, (j + 1) * h);
            double t = V * v[j].real() * r * h;
            integral += t;
            absint += std::abs(t);
        }
        num = std::abs(integral);
        den = absint;
    }
    if (den == 0.0) throw Error(ErrorKind::usage, "identity residual undefined for a vanishing potential");
    return num / den;
}

double overcritical_weight(const RadialSpinor& phi, const PotentialModel& model, double sigma)
{
    const int n = phi.grid.n;
    const double h = phi.grid.h;
    const double dl = std::abs(model.lambda(sigma) - model.lambda(0.0));
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
        double wh = model.shape_average(j * h, (j + 1) * h);
        double wi = model.shape_average((j + 0.5) * h, (j + 1.5) * h);
        const cplx& a = phi.channel > 0 ? phi.u2[j] : phi.u1[j];
        const cplx& b = phi.channel > 0 ? phi.u1[j] : phi.u2[j];
        s += (wh * std::norm(a) + wi * std::norm(b)) * h;
    }
    return dl * s;
}

double c0_from_derivative(const RadialSpinor& phi, const PotentialModel& model)
{
    PotentialModel unit = model;
    unit.lambda_c = 0.0;
    unit.lambda_slope = 1.0;
    double c0 = model.lambda_slope * overcritical_weight(phi, unit, 1.0);
    if (!(c0 > 0.0))
        throw Error(ErrorKind::model, "C0 is not positive: check sign and lambda_slope of the schedule");
    return c0;
}

CriticalData critical_data(const PotentialModel& model, const RadialGrid& g, int branch)
{
    DiscreteOperator op = assemble_operator(g, model, 0.0);
    if (branch < 0) branch = oriented_count(op, 0.95);
    const double o = oriented_sign(model);
    Eigen::VectorXd d = o * op.diag, e = o * op.off;
    double Eo = tridiag::eigenvalue(d, e, branch);
    Eigen::VectorXd v = tridiag::eigenvector(d, e, Eo);
    v /= std::sqrt(v.squaredNorm() * g.h);
    fix_sign(v);

    CriticalData cd;
    cd.energy = o * Eo;
    cd.lambda_c = model.lambda_c;
    cd.Phi = op.to_spinor(v, NormKind::unit);
    cd.identity_residual = critical_identity_residual(cd.Phi, model, 0.0);
    cd.C0 = c0_from_derivative(cd.Phi, model);
    return cd;
}

BoundState bound_state_at(const PotentialModel& model, const RadialGrid& g, double sigma)
{
    // the diving state is the gap state nearest the edge it moves towards;
    // bracket it away from any other gap state (e.g. box states near the far edge)
    DiscreteOperator op = assemble_operator(g, model, sigma);
    std::vector<double> ev = gap_eigenvalues(op, -1.0, 1.0);
    if (ev.empty()) throw Error(ErrorKind::no_bound_state, "no bound state in the gap");
    if (model.sign > 0) {
        double lo = ev.size() > 1 ? 0.5 * (ev[ev.size() - 2] + ev.back()) : -1.0;
        return solve_bound_state(op, lo, 1.0);
    }
    double hi = ev.size() > 1 ? 0.5 * (ev[0] + ev[1]) : 1.0;
    return solve_bound_state(op, -1.0, hi);
}

double coupling_for_energy(const PotentialModel& tmpl, const RadialGrid& g, double E_target, int branch,
                           double lam_lo, double lam_hi)
{
    const double o = oriented_sign(tmpl);
    auto f = [&](double lam) { return oriented_eigenvalue(at_coupling(tmpl, g, lam), branch) - o * E_target; };
    double fa = f(lam_lo), fb = f(lam_hi);
    if (fa * fb > 0) throw Error(ErrorKind::model, "target energy not reached in coupling range");
    return bracket_root(f, lam_lo, lam_hi, fa, fb, 50);
}

BoundStateTrack track_eigenvalue(const PotentialModel& model, const RadialGrid& g,
                                 const std::vector<double>& sigmas)
{
    if (sigmas.empty()) throw Error(ErrorKind::usage, "track: empty sigma list");
    BoundStateTrack tr;
    RadialSpinor last;
    for (double s : sigmas) {
        try {
            BoundState bs = bound_state_at(model, g, s);
            double res = critical_identity_residual(bs.wavefunction, model, s);
            tr.samples.push_back({s, bs.energy, bs.kappa, res});
            last = bs.wavefunction;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::no_bound_state) throw;
            tr.complete = false;
            tr.diagnostic = "bound state lost at sigma=" + std::to_string(s) + ": " + e.what();
            break;
        }
    }
    if (tr.samples.empty()) return tr;
    // Hellmann-Feynman slope at the last sample
    tr.dE_dsigma = model.sign * c0_from_derivative(last, model);
    const auto& b = tr.samples.back();
    double edge = model.sign >= 0 ? 1.0 : -1.0;
    tr.sigma_c = b.sigma + (edge - b.energy) / tr.dE_dsigma;
    return tr;
}

} // namespace spc
