#pragma once

#include <optional>
#include <vector>

#include "spc/core.hpp"
#include "spc/statics.hpp"

namespace spc {

struct ContinuumSolution {
    double k = 0.0;
    double sigma = 0.0;
    double E = 0.0;            // +sqrt(k^2+1) for sign=+1, mirrored for sign=-1
    double phase_shift = 0.0;  // in (-pi, pi]
    RadialSpinor wave;         // delta-in-k normalised
};

// Regular solution at E_k, matched outside the support to the discrete free
// regular/irregular pair, then scaled to delta-in-k normalisation.
ContinuumSolution continuum_wave(const PotentialModel& model, const RadialGrid& g, double sigma, double k);

// Delta-in-k amplitude of the large component far out.
double delta_k_amplitude(double k);
// RMS envelope sqrt(G^2 + ((E+1)/k)^2 F^2) over r in (a, b).
double envelope(const ContinuumSolution& c, double a, double b);

// Outgoing transform in the three-dimensional density convention:
// <wave, Phi> / k (a radial partial wave carries j_l(kr) = j^_l(kr)/(kr)).
cplx outgoing_transform(const RadialSpinor& Phi, const ContinuumSolution& wave);

struct ResonanceProfile {
    double sigma = 0.0;
    std::vector<double> k;
    std::vector<double> phi_out_sq;
    double k_peak = 0.0;
    double peak_value = 0.0;
    double delta_width = 0.0;   // half width at half maximum (in k)
    double k_half_lo = 0.0, k_half_hi = 0.0;
    int local_maxima = 0;
};

// k in [0.2 sqrt(sigma), 5 sqrt(sigma)], log spaced.
std::vector<double> default_k_window(double sigma, int points = 200);

// Samples the profile on k_grid, refines the peak (Brent) and the half-maximum
// crossings (TOMS 748) on the exact profile, then adds `refine` samples evenly
// spaced across k_peak +- 3 Delta.
ResonanceProfile scan_resonance(const PotentialModel& model, const RadialGrid& g, double sigma,
                                const std::vector<double>& k_grid, const CriticalData& crit, int refine = 41);

struct ResonanceConstants {
    double C = 0.0, C0 = 0.0, absC2 = 0.0, absC3 = 0.0;
    double fit_residual = 0.0;
    double kpeak_slope = 0.0;       // slope of k_peak^2 vs sigma (measured)
    double kpeak_r2 = 0.0;
    double width_ratio = 0.0;       // mean Delta / k_peak^2 (measured)
    double width_spread = 0.0;      // max/min of Delta / k_peak^2 - 1
    int points = 0;
};

enum class FitPin { c0, prefactor };

struct FitOptions {
    FitPin pin = FitPin::c0;
    double pinned_value = 0.0;   // value of the pinned constant
    double window = 3.0;         // fit within +-window*Delta of each peak
    double max_residual = 0.25;
};

// Resonance line shape C k^2 / ((C0 sigma - |C2| k^2)^2 + |C3|^2 k^6).
double resonance_shape(double C, double C0, double absC2, double absC3, double sigma, double k);

ResonanceConstants fit_constants(const std::vector<ResonanceProfile>& profiles, const FitOptions& opt);

// Low-k prefactor of the numerator predicted from Phi:
//   C = (2/pi) * ( int V0 (r^2 g/3 + r f/2) dr )^2   (g, f: large and small components)
double predicted_prefactor(const CriticalData& crit, const PotentialModel& model);

// Normalised k-linear coefficient of <T^k Phi, A0 Phi> at k = 0 from the
// channel Green's function; vanishes identically unless the large component is
// an s-wave.
double s1_vanishing_check(const RadialSpinor& phi, const PotentialModel& model);

} // namespace spc
