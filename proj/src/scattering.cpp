#include "spc/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "spc/shooting.hpp"

namespace spc {

namespace {

int orient(const PotentialModel& m) { return m.sign >= 0 ? 1 : -1; }

double riccati_j(int l, double x) { return x * boost::math::sph_bessel(l, x); }
double riccati_y(int l, double x) { return x * boost::math::sph_neumann(l, x); }

// Site position and free continuum reference value for vector index idx.
// In the rising frame the large component G has l = kap (kap>0) or -kap-1,
// the small one F = +-(k/(E+1)) times the neighbouring order.
struct Reference {
    int kap;
    double k, E, h;

    double r(int idx) const { return idx % 2 ? 0.5 * (idx + 1) * h : (0.5 * idx + 0.5) * h; }
    bool integer_site(int idx) const { return idx % 2 == 1; }
    bool large_here(int idx) const { return integer_site(idx) == (kap > 0); }

    double value(int idx, bool regular) const
    {
        auto f = regular ? riccati_j : riccati_y;
        const double x = k * r(idx);
        const int lg = kap > 0 ? kap : -kap - 1;
        if (large_here(idx)) return f(lg, x);
        if (kap > 0) return k / (E + 1.0) * f(lg - 1, x);
        return -k / (E + 1.0) * f(lg + 1, x);
    }
};

template <class F>
double bracket_root(F f, double a, double b, double fa, double fb)
{
    boost::uintmax_t it = 200;
    auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(44), it);
    return 0.5 * (r.first + r.second);
}

} // namespace

double delta_k_amplitude(double k)
{
    const double E = std::sqrt(1.0 + k * k);
    return std::sqrt((E + 1.0) / (std::numbers::pi * E));
}

ContinuumSolution continuum_wave(const PotentialModel& model, const RadialGrid& g, double sigma, double k)
{
    if (!(k > 0.0)) throw Error(ErrorKind::usage, "continuum_wave: k must be positive");
    if (k * g.r_max < 4.0 * std::numbers::pi)
        throw Error(ErrorKind::resolution, "continuum_wave: k*r_max < 4 pi at k=" + std::to_string(k) +
                                               "; increase r_max to at least " +
                                               std::to_string(4.0 * std::numbers::pi / k));
    double R = model.support();
    if (!std::isfinite(R)) throw Error(ErrorKind::model, "continuum_wave needs a potential of compact support");

    const int o = orient(model);
    const double Ek = std::sqrt(1.0 + k * k);
    const double E = o * Ek;
    DiscreteOperator op = assemble_operator(g, model, sigma);
    PotentialModel free = model;
    free.shape = Shape::none;
    DiscreteOperator op0 = assemble_operator(g, free, sigma);
    const int N = op.dim();

    // matching window outside the support
    double ra = R + 1.0, rb = std::min(R + 6.0, g.r_max - 1.0);
    int ia = std::max(2 * static_cast<int>(std::ceil(ra / g.h)) - 2, 0);
    int ib = std::min(2 * static_cast<int>(std::floor(rb / g.h)) - 1, N - 1);
    if (ib - ia < 4) throw Error(ErrorKind::resolution, "continuum_wave: matching window has too few sites");

    std::vector<double> x, reg, irr;
    detail::shoot_out(op, E, N - 1, x, true);
    detail::shoot_out(op0, E, N - 1, reg, true);

    Reference ref{o * model.channel, k, Ek, g.h};
    // scale the discrete free regular solution to the continuum one
    double num = 0, den = 0;
    for (int i = ia; i <= ib; ++i) {
        num += ref.value(i, true) * reg[i];
        den += reg[i] * reg[i];
    }
    const double s = num / den;
    // discrete free irregular solution seeded with continuum values
    irr.assign(N, 0.0);
    irr[ia] = ref.value(ia, false);
    irr[ia + 1] = ref.value(ia + 1, false);
    detail::continue_out(op0, E, ia, irr, ib);

    Eigen::MatrixXd A(ib - ia + 1, 2);
    Eigen::VectorXd b(ib - ia + 1);
    for (int i = ia; i <= ib; ++i) {
        A(i - ia, 0) = s * reg[i];
        A(i - ia, 1) = irr[i];
        b[i - ia] = x[i];
    }
    Eigen::Vector2d ab = A.colPivHouseholderQr().solve(b);
    const double alpha = ab[0], beta = ab[1];
    const double amp = std::hypot(alpha, beta);

    Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(x.data(), N) * (delta_k_amplitude(k) / amp);
    ContinuumSolution c;
    c.k = k;
    c.sigma = sigma;
    c.E = E;
    c.phase_shift = std::atan2(-beta, alpha);
    c.wave = op.to_spinor(v, NormKind::delta_k);
    return c;
}

double envelope(const ContinuumSolution& c, double a, double b)
{
    const RadialSpinor& w = c.wave;
    const double Ek = std::abs(c.E);
    // large and small component arrays in the rising frame
    const int kap = (c.E > 0 ? 1 : -1) * w.channel;
    const Eigen::VectorXcd& ints = w.channel > 0 ? w.u1 : w.u2;
    const Eigen::VectorXcd& halfs = w.channel > 0 ? w.u2 : w.u1;
    const Eigen::VectorXcd& G = kap > 0 ? ints : halfs;
    const Eigen::VectorXcd& F = kap > 0 ? halfs : ints;
    const bool G_on_int = kap > 0;
    double sg = 0, sf = 0;
    int ng = 0, nf = 0;
    for (int i = 0; i + 1 < w.grid.n; ++i) {
        double ri = w.grid.r(i + 1), rh = w.grid.r_half(i);
        double rG = G_on_int ? ri : rh, rF = G_on_int ? rh : ri;
        if (rG > a && rG < b) { sg += std::norm(G[i]); ++ng; }
        if (rF > a && rF < b) { sf += std::norm(F[i]); ++nf; }
    }
    if (ng == 0 || nf == 0) throw Error(ErrorKind::usage, "envelope: empty window");
    const double t = (Ek + 1.0) / c.k;
    return std::sqrt(sg / ng + t * t * sf / nf);
}

cplx outgoing_transform(const RadialSpinor& Phi, const ContinuumSolution& wave)
{
    return inner_product(wave.wave, Phi) / wave.k;
}

std::vector<double> default_k_window(double sigma, int points)
{
    if (!(sigma > 0.0)) throw Error(ErrorKind::configuration, "k window needs sigma > 0");
    std::vector<double> k(points);
    const double a = std::log(0.2 * std::sqrt(sigma)), b = std::log(5.0 * std::sqrt(sigma));
    for (int i = 0; i < points; ++i) k[i] = std::exp(a + (b - a) * i / (points - 1));
    return k;
}

ResonanceProfile scan_resonance(const PotentialModel& model, const RadialGrid& g, double sigma,
                                const std::vector<double>& k_grid, const CriticalData& crit, int refine)
{
    if (!(sigma > 0.0)) throw Error(ErrorKind::configuration, "scan_resonance: sigma must be positive (overcritical)");
    if (!std::is_sorted(k_grid.begin(), k_grid.end())) throw Error(ErrorKind::usage, "scan_resonance: k grid must be increasing");
    if (k_grid.size() < 5) throw Error(ErrorKind::usage, "scan_resonance: k grid too small");
    auto value = [&](double k) { return std::norm(outgoing_transform(crit.Phi, continuum_wave(model, g, sigma, k))); };

    ResonanceProfile p;
    p.sigma = sigma;
    p.k = k_grid;
    p.phi_out_sq.resize(k_grid.size());
    for (size_t i = 0; i < k_grid.size(); ++i) p.phi_out_sq[i] = value(k_grid[i]);

    const auto& y = p.phi_out_sq;
    const int M = static_cast<int>(y.size());
    int best = -1;
    for (int i = 1; i + 1 < M; ++i) {
        if (y[i] > y[i - 1] && y[i] >= y[i + 1]) {
            ++p.local_maxima;
            if (best < 0 || y[i] > y[best]) best = i;
        }
    }
    if (best < 0) throw Error(ErrorKind::window, "scan_resonance: no interior maximum in the k window");

    // Brent on the exact profile between the neighbours of the best sample
    auto neg = [&](double k) { return -value(k); };
    auto mx = boost::math::tools::brent_find_minima(neg, k_grid[best - 1], k_grid[best + 1], 40);
    p.k_peak = mx.first;
    p.peak_value = -mx.second;

    const double half = 0.5 * p.peak_value;
    auto f = [&](double k) { return value(k) - half; };
    int lo = static_cast<int>(std::lower_bound(k_grid.begin(), k_grid.end(), p.k_peak) - k_grid.begin()) - 1;
    int hi = lo + 1;
    while (lo > 0 && y[lo] >= half) --lo;
    while (hi + 1 < M && y[hi] >= half) ++hi;
    if (lo < 0 || hi >= M || y[lo] >= half || y[hi] >= half)
        throw Error(ErrorKind::window, "scan_resonance: half maximum not bracketed by the k window");
    p.k_half_lo = bracket_root(f, k_grid[lo], p.k_peak, y[lo] - half, half);
    p.k_half_hi = bracket_root(f, p.k_peak, k_grid[hi], half, y[hi] - half);
    p.delta_width = 0.5 * (p.k_half_hi - p.k_half_lo);

    // dense samples across the line so narrow peaks are resolved for fitting
    if (refine > 1) {
        const double a = std::max(p.k_peak - 3.0 * p.delta_width, 0.5 * p.k_peak);
        const double b = p.k_peak + 3.0 * p.delta_width;
        std::vector<std::pair<double, double>> all;
        for (int i = 0; i < M; ++i) all.emplace_back(k_grid[i], y[i]);
        for (int i = 0; i < refine; ++i) {
            double k = a + (b - a) * i / (refine - 1);
            all.emplace_back(k, value(k));
        }
        std::sort(all.begin(), all.end());
        p.k.clear();
        p.phi_out_sq.clear();
        for (auto& [k, v] : all) {
            p.k.push_back(k);
            p.phi_out_sq.push_back(v);
        }
    }
    return p;
}

double resonance_shape(double C, double C0, double absC2, double absC3, double sigma, double k)
{
    const double k2 = k * k;
    const double a = C0 * sigma - absC2 * k2;
    return C * k2 / (a * a + absC3 * absC3 * k2 * k2 * k2);
}

namespace {

struct FitPoint {
    double sigma, k, y;
};

struct LineFunctor {
    using Scalar = double;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;

    const std::vector<FitPoint>* pts;
    FitPin pin;
    double pinned;

    int inputs() const { return 3; }
    int values() const { return static_cast<int>(pts->size()); }

    void unpack(const Eigen::VectorXd& p, double& C, double& C0, double& c2, double& c3) const
    {
        if (pin == FitPin::c0) { C = std::exp(p[0]); C0 = pinned; }
        else { C = pinned; C0 = std::exp(p[0]); }
        c2 = std::exp(p[1]);
        c3 = std::exp(p[2]);
    }

    int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& f) const
    {
        double C, C0, c2, c3;
        unpack(p, C, C0, c2, c3);
        for (size_t i = 0; i < pts->size(); ++i) {
            const auto& q = (*pts)[i];
            f[i] = resonance_shape(C, C0, c2, c3, q.sigma, q.k) / q.y - 1.0;
        }
        return 0;
    }
};

} // namespace

ResonanceConstants fit_constants(const std::vector<ResonanceProfile>& profiles, const FitOptions& opt)
{
    if (profiles.size() < 4) throw Error(ErrorKind::usage, "fit_constants needs at least four profiles");
    if (!(opt.pinned_value > 0.0)) throw Error(ErrorKind::configuration, "fit_constants: pinned value must be positive");
    double smin = 1e300, smax = 0;
    for (const auto& p : profiles) {
        smin = std::min(smin, p.sigma);
        smax = std::max(smax, p.sigma);
    }
    if (smax < 9.999 * smin) throw Error(ErrorKind::usage, "fit_constants: profiles must span a decade in sigma");

    std::vector<FitPoint> pts;
    double g0 = 0, g2 = 0, g3 = 0;
    for (const auto& p : profiles) {
        for (size_t i = 0; i < p.k.size(); ++i)
            if (std::abs(p.k[i] - p.k_peak) <= opt.window * p.delta_width && p.phi_out_sq[i] > 0)
                pts.push_back({p.sigma, p.k[i], p.phi_out_sq[i]});
        // starting values from peak position, width and height
        const double kp2 = p.k_peak * p.k_peak;
        if (opt.pin == FitPin::c0) {
            double c2 = opt.pinned_value * p.sigma / kp2;
            double c3 = 2.0 * c2 * p.delta_width / kp2;
            g0 += std::log(p.peak_value * c3 * c3 * kp2 * kp2);
            g2 += std::log(c2);
            g3 += std::log(c3);
        } else {
            double C0 = kp2 * std::sqrt(opt.pinned_value / p.peak_value) / (2.0 * p.sigma * p.delta_width);
            double c2 = C0 * p.sigma / kp2;
            g0 += std::log(C0);
            g2 += std::log(c2);
            g3 += std::log(2.0 * c2 * p.delta_width / kp2);
        }
    }
    if (pts.size() < 6) throw Error(ErrorKind::window, "fit_constants: too few samples near the peaks");
    const double np = static_cast<double>(profiles.size());
    Eigen::VectorXd x(3);
    x << g0 / np, g2 / np, g3 / np;

    LineFunctor fun{&pts, opt.pin, opt.pinned_value};
    Eigen::NumericalDiff<LineFunctor> nd(fun);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<LineFunctor>> lm(nd);
    lm.parameters.xtol = 1e-12;
    lm.parameters.ftol = 1e-14;
    lm.parameters.maxfev = 4000;
    lm.minimize(x);

    ResonanceConstants rc;
    fun.unpack(x, rc.C, rc.C0, rc.absC2, rc.absC3);
    Eigen::VectorXd r(pts.size());
    fun(x, r);
    rc.fit_residual = std::sqrt(r.squaredNorm() / r.size());
    rc.points = static_cast<int>(pts.size());

    // peak and width laws from the measured profiles
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    double wmin = 1e300, wmax = 0, wsum = 0;
    for (const auto& p : profiles) {
        double xx = p.sigma, yy = p.k_peak * p.k_peak;
        sx += xx; sy += yy; sxx += xx * xx; sxy += xx * yy; syy += yy * yy;
        double w = p.delta_width / yy;
        wmin = std::min(wmin, w);
        wmax = std::max(wmax, w);
        wsum += w;
    }
    const double cxx = sxx - sx * sx / np, cxy = sxy - sx * sy / np, cyy = syy - sy * sy / np;
    rc.kpeak_slope = cxy / cxx;
    rc.kpeak_r2 = cxy * cxy / (cxx * cyy);
    rc.width_ratio = wsum / np;
    rc.width_spread = wmax / wmin - 1.0;

    if (rc.fit_residual > opt.max_residual)
        throw Error(ErrorKind::fit_quality, "resonance fit residual " + std::to_string(rc.fit_residual) +
                                                " exceeds " + std::to_string(opt.max_residual) + " (" +
                                                std::to_string(pts.size()) + " samples)");
    return rc;
}

double predicted_prefactor(const CriticalData& crit, const PotentialModel& model)
{
    const int kap = orient(model) * model.channel;
    if (kap != 1)
        throw Error(ErrorKind::model, "prefactor prediction is implemented for the p-wave rising channel only");
    const RadialSpinor& phi = crit.Phi;
    const double h = phi.grid.h;
    const Eigen::VectorXcd& G = phi.channel > 0 ? phi.u1 : phi.u2;   // integer points
    const Eigen::VectorXcd& F = phi.channel > 0 ? phi.u2 : phi.u1;   // half points
    double s = 0.0;
    for (int i = 0; i < phi.grid.n; ++i) {
        double ri = phi.grid.r(i + 1), rh = phi.grid.r_half(i);
        double Vi = model.lambda_c * model.shape_average(ri - 0.5 * h, ri + 0.5 * h);
        double Vh = model.lambda_c * model.shape_average(rh - 0.5 * h, rh + 0.5 * h);
        s += (Vi * G[i].real() * ri * ri / 3.0 + Vh * F[i].real() * rh / 2.0) * h;
    }
    return 2.0 / std::numbers::pi * s * s;
}

double s1_vanishing_check(const RadialSpinor& phi, const PotentialModel& model)
{
    const int kap = orient(model) * model.channel;
    const int l_large = kap > 0 ? kap : -kap - 1;
    if (l_large != 0) return 0.0;   // the k-linear kernel term only couples s-waves
    // s-wave large component sits on half points (kap = -1)
    const Eigen::VectorXcd& G = phi.channel > 0 ? phi.u2 : phi.u1;
    const double h = phi.grid.h;
    double m = 0, a = 0;
    for (int j = 0; j < phi.grid.n; ++j) {
        double r = phi.grid.r_half(j);
        double V = model.lambda_c * model.shape_average(j * h, (j + 1) * h);
        m += V * G[j].real() * r * h;
        a += std::abs(V * G[j].real()) * r * h;
    }
    if (a == 0.0) throw Error(ErrorKind::usage, "s1 check undefined for a vanishing potential");
    return (m / a) * (m / a);
}

} // namespace spc
