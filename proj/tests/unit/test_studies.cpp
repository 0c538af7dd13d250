#include <doctest.h>

#include <atomic>
#include <cmath>

#include "spc/studies.hpp"

using namespace spc;

namespace {
ResonanceConstants unit_constants()
{
    ResonanceConstants c;
    c.C = c.C0 = c.absC2 = c.absC3 = 1.0;
    return c;
}
} // namespace

TEST_CASE("fixed-point decay time: closed form")
{
    ResonanceConstants c = unit_constants();
    c.C0 = 0.46;
    c.absC2 = 0.5;
    c.absC3 = 0.13;
    for (double eps : {1e-5, 1e-3, 0.25}) CHECK(fixed_point_sd(c, 32 * eps) / fixed_point_sd(c, eps) == doctest::Approx(4.0).epsilon(1e-13));

    // damped iteration of s = 4 eps / (k(s) Delta(s)) with k^2 = C0 s/|C2|, Delta = |C3| k^2 / (2|C2|)
    for (const auto& cc : {unit_constants(), c}) {
        const double eps = 0.25;
        double x = 0.0;
        for (int it = 0; it < 200; ++it) {
            double s = std::exp(x);
            double k = std::sqrt(cc.C0 * s / cc.absC2), d = cc.absC3 * k * k / (2 * cc.absC2);
            x += 0.2 * (std::log(4 * eps / (k * d)) - x);
        }
        CHECK(std::abs(fixed_point_sd(cc, eps) - std::exp(x)) < 1e-10);
    }
}

TEST_CASE("log-log fit")
{
    std::vector<double> x, y;
    for (int i = 0; i < 6; ++i) {
        x.push_back(1e-5 * std::pow(10.0, 0.5 * i));
        y.push_back(std::pow(x.back(), 0.4));
    }
    auto f = loglog_fit(x, y);
    CHECK(std::abs(f.slope - 0.4) < 1e-6);
    CHECK(f.r_squared == doctest::Approx(1.0));
    CHECK(f.stderr_slope < 1e-10);
    // refitting data regenerated from a fit reproduces the slope
    std::vector<double> y2;
    for (double xi : x) y2.push_back(std::exp(f.intercept) * std::pow(xi, f.slope));
    CHECK(std::abs(loglog_fit(x, y2).slope - f.slope) < 1e-9);
    try {
        loglog_fit({1.0, 2.0}, {1.0, 2.0});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::study);
    }
}

TEST_CASE("self-consistent static decay time on a power-law table")
{
    DecayTable t;
    const double A = 3.0;
    for (int i = 0; i < 8; ++i) {
        double s = 0.01 * std::pow(2.0, i);
        t.sigma.push_back(s);
        t.t_d.push_back(A * std::pow(s, -1.5));
        t.formula.push_back(t.t_d.back());
    }
    for (double eps : {1e-3, 5e-3}) CHECK(self_consistent_sd(t, eps) == doctest::Approx(std::pow(eps * A, 0.4)).epsilon(1e-10));
    auto st = static_scaling_study(t, {1e-3, 2e-3, 5e-3, 1e-2});
    CHECK(st.fit.slope == doctest::Approx(0.4).epsilon(1e-9));
    // sigma* outside the table
    CHECK_THROWS_AS(self_consistent_sd(t, 10.0), Error);
}

TEST_CASE("parallel_for is index-deterministic and rethrows")
{
    std::vector<int> out(50, -1);
    parallel_for(50, 4, [&](int i) { out[i] = i * i; });
    for (int i = 0; i < 50; ++i) CHECK(out[i] == i * i);
    std::atomic<int> n{0};
    CHECK_THROWS_AS(parallel_for(10, 3, [&](int i) {
        ++n;
        if (i == 7) throw Error(ErrorKind::numerical, "boom");
    }), Error);
}

TEST_CASE("spectrum comparison: reference against itself")
{
    ResonanceConstants c;
    c.C = 0.04;
    c.C0 = 0.46;
    c.absC2 = 0.5;
    c.absC3 = 0.13;
    ResonanceProfile p;
    p.sigma = 0.05;
    p.k_peak = std::sqrt(c.C0 * p.sigma / c.absC2);
    p.delta_width = c.absC3 * p.k_peak * p.k_peak / (2 * c.absC2);
    auto ks = comparison_k_grid(p);
    auto self = profile_density(c, p.sigma, ks);
    auto cmp = spectrum_comparison(self, c, p);
    CHECK(cmp.distance < 1e-12);
    CHECK(cmp.label == "resonance-like");
    CHECK(std::abs(cmp.peak_run / p.k_peak - 1.0) < 0.02);
    // a spectrum piled up at small k is washed out
    std::vector<SpectrumPoint> low;
    for (double k : ks) low.push_back({k, std::exp(-k / (0.3 * p.k_peak))});
    auto w = spectrum_comparison(low, c, p);
    CHECK(w.label == "washed-out");
    CHECK(w.peak_run < w.peak_ref);
}

TEST_CASE("scaling study needs three epsilons")
{
    PotentialModel m;
    m.lambda_c = 7.6;
    auto g = build_grid(40.0, 160);
    CriticalData cd;
    try {
        scaling_study(m, g, cd, {1e-3, 2e-3});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::study);
    }
}
