#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/special_functions/bessel.hpp>

#include "spc/scattering.hpp"
#include "spc/statics.hpp"

using namespace spc;

namespace {

PotentialModel well(double R, double lam, int sign = 1, int kappa = 1)
{
    PotentialModel m;
    m.radius = R;
    m.lambda_c = lam;
    m.sign = sign;
    m.channel = kappa;
    return m;
}

// Exact p-wave (kappa = 1) phase shift of a square well of height V and
// radius R: interior regular solution matched in F/G to the free pair.
double well_phase_shift(double V, double R, double k)
{
    using boost::math::sph_bessel;
    using boost::math::sph_neumann;
    const double E = std::sqrt(1.0 + k * k), W = E - V;
    double G, F;
    if (std::abs(W) > 1.0) {
        double p = std::sqrt(W * W - 1.0);
        G = R * sph_bessel(1, p * R);
        F = p / (W + 1.0) * R * sph_bessel(0, p * R);
    } else {
        double q = std::sqrt(1.0 - W * W);
        G = R * boost::math::cyl_bessel_i(1.5, q * R) / std::sqrt(q * R);
        F = q / (W + 1.0) * R * boost::math::cyl_bessel_i(0.5, q * R) / std::sqrt(q * R);
    }
    const double x = k * R, c = k / (E + 1.0);
    // alpha*j^1 + beta*y^1 = G,  c*(alpha*j^0 + beta*y^0) = F
    double a11 = x * sph_bessel(1, x), a12 = x * sph_neumann(1, x);
    double a21 = c * x * sph_bessel(0, x), a22 = c * x * sph_neumann(0, x);
    double det = a11 * a22 - a12 * a21;
    double alpha = (G * a22 - a12 * F) / det, beta = (a11 * F - a21 * G) / det;
    return std::atan2(-beta, alpha);
}

struct Baseline {
    PotentialModel model;
    RadialGrid grid;
    CriticalData crit;
};

const Baseline& baseline()
{
    static Baseline b = [] {
        Baseline x;
        x.model = well(0.5, 0.0);
        x.grid = build_grid(1000.0, 4000);
        x.model.lambda_c = find_critical_coupling(x.model, x.grid).lambda_c;
        x.crit = critical_data(x.model, x.grid);
        return x;
    }();
    return b;
}

} // namespace

TEST_CASE("free wave has no phase shift and the delta-k envelope")
{
    PotentialModel m;
    m.shape = Shape::none;
    auto g = build_grid(200.0, 4000);
    for (double k : {0.1, 0.3, 0.7, 1.5}) {
        auto c = continuum_wave(m, g, 0.0, k);
        CHECK(std::abs(std::sin(c.phase_shift)) < 1e-8);
        CHECK(c.E == doctest::Approx(std::sqrt(1 + k * k)));
        CHECK(std::abs(envelope(c, 100.0, 200.0) / delta_k_amplitude(k) - 1.0) < 0.01);
    }
}

TEST_CASE("well phase shifts agree with exact matching")
{
    auto g = build_grid(100.0, 4000);
    for (double V : {2.0, 5.0, 7.0}) {
        for (double k : {0.2, 0.5, 1.0}) {
            auto c = continuum_wave(well(0.5, V), g, 0.0, k);
            double d = well_phase_shift(V, 0.5, k);
            CHECK(std::abs(std::sin(c.phase_shift - d)) < 2e-3);
            CHECK(std::abs(envelope(c, 50.0, 100.0) / delta_k_amplitude(k) - 1.0) < 0.01);
        }
    }
}

TEST_CASE("continuum wave resolution and grid errors")
{
    auto g = build_grid(20.0, 400);
    try {
        continuum_wave(well(0.5, 5.0), g, 0.0, 0.5);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::resolution);
    }
    const auto& b = baseline();
    auto other = continuum_wave(b.model, build_grid(500.0, 2000), 0.01, 0.1);
    try {
        outgoing_transform(b.crit.Phi, other);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::usage);
    }
}

TEST_CASE("outgoing transform: box independence and sign symmetry")
{
    PotentialModel m = well(0.5, 0.0);
    auto g1 = build_grid(200.0, 800), g2 = build_grid(400.0, 1600);
    m.lambda_c = find_critical_coupling(m, g1).lambda_c;
    auto c1 = critical_data(m, g1), c2 = critical_data(m, g2);
    for (double k : {0.15, 0.2, 0.3}) {
        double a = std::abs(outgoing_transform(c1.Phi, continuum_wave(m, g1, 0.04, k)));
        double b = std::abs(outgoing_transform(c2.Phi, continuum_wave(m, g2, 0.04, k)));
        CHECK(std::abs(b / a - 1.0) < 0.01);
    }
    // positron picture: flipped potential sign and channel
    PotentialModel f = m;
    f.sign = -1;
    f.channel = -1;
    auto cf = critical_data(f, g1);
    CHECK(cf.energy == doctest::Approx(-c1.energy));
    for (double k : {0.15, 0.2, 0.3}) {
        double a = std::norm(outgoing_transform(c1.Phi, continuum_wave(m, g1, 0.04, k)));
        double b = std::norm(outgoing_transform(cf.Phi, continuum_wave(f, g1, 0.04, k)));
        CHECK(std::abs(b / a - 1.0) < 1e-8);
    }
}

TEST_CASE("resonance scan: square-root law, narrow peak, dominance")
{
    const auto& b = baseline();
    auto p1 = scan_resonance(b.model, b.grid, 0.005, default_k_window(0.005), b.crit);
    auto p4 = scan_resonance(b.model, b.grid, 0.02, default_k_window(0.02), b.crit);
    CHECK(std::abs(p4.k_peak / p1.k_peak - 2.0) < 0.1);
    for (const auto* p : {&p1, &p4}) {
        CHECK(p->local_maxima == 1);
        CHECK(p->delta_width / p->k_peak < 0.3);
        CHECK(p->k_half_lo < p->k_peak);
        CHECK(p->k_half_hi > p->k_peak);
        for (double v : p->phi_out_sq) CHECK(v > 0.0);
        double at_peak = std::abs(outgoing_transform(b.crit.Phi, continuum_wave(b.model, b.grid, p->sigma, p->k_peak)));
        double far = std::abs(outgoing_transform(b.crit.Phi, continuum_wave(b.model, b.grid, p->sigma, 4 * p->k_peak)));
        CHECK(at_peak / far > 10.0);
        // the phase shift runs through pi/2 across the peak
        double d_lo = continuum_wave(b.model, b.grid, p->sigma, p->k_half_lo).phase_shift;
        double d_hi = continuum_wave(b.model, b.grid, p->sigma, p->k_half_hi).phase_shift;
        CHECK(std::cos(d_lo) * std::cos(d_hi) < 0.0);
    }
    // peak recedes towards k = 0 as sigma -> 0+
    auto p0 = scan_resonance(b.model, b.grid, 0.004, default_k_window(0.004), b.crit);
    CHECK(p0.k_peak < p1.k_peak);
    // window without the peak
    std::vector<double> ks;
    for (int i = 0; i < 20; ++i) ks.push_back(0.5 + 0.05 * i);
    try {
        scan_resonance(b.model, b.grid, 0.005, ks, b.crit);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::window);
    }
}

TEST_CASE("synthetic profiles: constants recovered")
{
    const double C = 0.05, C0 = 0.45, c2 = 0.5, c3 = 0.13;
    std::mt19937 rng(3);
    std::normal_distribution<double> noise(0.0, 0.01);
    std::vector<ResonanceProfile> ps;
    for (int i = 0; i < 5; ++i) {
        ResonanceProfile p;
        p.sigma = 0.004 * std::pow(10.0, i / 4.0);
        // exact peak and half-maximum points by dense sampling
        double best = 0;
        std::vector<double> kk, vv;
        for (double k : default_k_window(p.sigma, 20000)) {
            kk.push_back(k);
            vv.push_back(resonance_shape(C, C0, c2, c3, p.sigma, k));
            if (vv.back() > best) {
                best = vv.back();
                p.k_peak = k;
            }
        }
        p.peak_value = best;
        for (size_t j = 0; j < kk.size(); ++j)
            if (vv[j] >= best / 2) {
                p.k_half_hi = kk[j];
                if (p.k_half_lo == 0) p.k_half_lo = kk[j];
            }
        p.delta_width = 0.5 * (p.k_half_hi - p.k_half_lo);
        for (int j = -40; j <= 40; ++j) {
            double k = p.k_peak + j * 3 * p.delta_width / 40;
            p.k.push_back(k);
            p.phi_out_sq.push_back(resonance_shape(C, C0, c2, c3, p.sigma, k) * (1 + noise(rng)));
        }
        ps.push_back(p);
    }
    FitOptions o;
    o.pinned_value = C0;
    auto rc = fit_constants(ps, o);
    CHECK(std::abs(rc.C / C - 1) < 0.05);
    CHECK(std::abs(rc.absC2 / c2 - 1) < 0.05);
    CHECK(std::abs(rc.absC3 / c3 - 1) < 0.05);
    CHECK(rc.fit_residual < 0.02);
    o.pin = FitPin::prefactor;
    o.pinned_value = C;
    rc = fit_constants(ps, o);
    CHECK(std::abs(rc.C0 / C0 - 1) < 0.05);
    CHECK(std::abs(rc.absC2 / c2 - 1) < 0.05);
    CHECK(std::abs(rc.absC3 / c3 - 1) < 0.05);

    ps.pop_back();
    ps.pop_back();
    CHECK_THROWS_AS(fit_constants(ps, o), Error);
}

TEST_CASE("prefactor-pinned fit agrees with the derivative C0")
{
    const auto& b = baseline();
    std::vector<ResonanceProfile> ps;
    for (int i = 0; i < 5; ++i) {
        double s = 0.004 * std::pow(10.0, i / 4.0);
        ps.push_back(scan_resonance(b.model, b.grid, s, default_k_window(s), b.crit));
    }
    FitOptions o;
    o.pin = FitPin::prefactor;
    o.pinned_value = predicted_prefactor(b.crit, b.model);
    auto rc = fit_constants(ps, o);
    CHECK(std::abs(rc.C0 / b.crit.C0 - 1.0) < 0.15);
    CHECK(rc.absC2 > 0);
    CHECK(rc.absC3 > 0);
    CHECK(s1_vanishing_check(b.crit.Phi, b.model) == 0.0);
}
