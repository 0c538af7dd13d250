#pragma once

#include <string>
#include <utility>
#include <vector>

#include "spc/core.hpp"
#include "spc/scattering.hpp"
#include "spc/statics.hpp"

namespace spc {

// sigma(s) on the macroscopic time axis s = epsilon * t.
enum class ScheduleKind { linear, tent, constant };

struct Schedule {
    ScheduleKind kind = ScheduleKind::linear;
    double s_start = -0.01;
    double s_end = 1.0;
    double epsilon = 0.01;
    double slope = 1.0;        // linear: sigma = slope*s; tent: sigma = sigma_max - slope*|s|
    double sigma_max = 0.0;    // tent peak
    double sigma_const = 0.0;  // constant

    double sigma(double s) const;
    std::pair<double, double> sigma_range() const;   // over [s_start, s_end]
};

ScheduleKind parse_schedule_kind(const std::string& s);
std::string schedule_name(ScheduleKind k);

struct PropagateOptions {
    double step_factor = 0.4;     // (ds/eps)*||D|| per step; must stay below 0.5
    double stop_below = -1.0;     // stop once survival < stop_below at s >= 0 (disabled if < 0)
    int record_every = 1;
    std::vector<double> spectrum_k;   // if non-empty, project the final state
};

struct SpectrumPoint {
    double k, weight;
};

struct EvolutionResult {
    std::vector<double> times;
    std::vector<double> survival;   // |<psi(s), Phi>|
    double norm_drift = 0.0;
    RadialSpinor final_state;
    double s_final = 0.0;
    double sigma_final = 0.0;
    double ds = 0.0;
    long steps = 0;
    std::vector<SpectrumPoint> spectrum;
};

// Spectral-radius bound of the assembled matrix (Gershgorin).
double operator_norm_bound(const DiscreteOperator& op);

// Implicit-midpoint propagation of i d/ds psi = (1/eps) D_sigma(s) psi with D
// taken at the step midpoint; survival is recorded against the fixed Phi.
EvolutionResult propagate(const PotentialModel& model, const RadialGrid& g, const Schedule& sch,
                          const RadialSpinor& psi0, const RadialSpinor& Phi, const PropagateOptions& opt = {});

// First crossing of survival = 1/2 at s >= 0, linearly interpolated.
double decay_time(const std::vector<double>& times, const std::vector<double>& survival);
double decay_time(const EvolutionResult& r);

struct StaticDecay {
    double sigma = 0.0, epsilon = 0.0;
    double s_d_measured = 0.0, s_d_formula = 0.0;
    double k_peak = 0.0, delta_width = 0.0;
    double norm_drift = 0.0;
};

// Frozen D_sigma, Phi as the initial state; formula 4 eps / (k Delta) from the
// resonance scan on the same grid.
StaticDecay static_decay_check(const PotentialModel& model, const RadialGrid& g, double sigma, double epsilon,
                               const CriticalData& crit, const PropagateOptions& opt = {});

struct ShortTimeConfig {
    double a = 0.0;
    double S = 0.0;
    double epsilon = 0.1;
};

struct ShortTimeResult {
    ShortTimeConfig cfg;
    double p_measured = 0.0, p_estimate = 0.0;
    double norm_drift = 0.0;
    bool perturbative = true;   // p_measured <= 0.1
};

// Coupling raised by a (potential A0 + a chi) for a duration S, starting from Phi.
ShortTimeResult short_time_probability(const PotentialModel& model, const RadialGrid& g, const ShortTimeConfig& cfg,
                                       const CriticalData& crit, const PropagateOptions& opt = {});

struct OutgoingSpectrum {
    std::vector<SpectrumPoint> points;
    double continuum_weight = 0.0;   // trapezoid integral over the k grid
    double bound_weight = 0.0;       // gap states of D_sigma
    double remainder = 0.0;          // 1 - both: other continuum and box states
};

OutgoingSpectrum outgoing_spectrum(const RadialSpinor& psi, const PotentialModel& model, const RadialGrid& g,
                                   double sigma, const std::vector<double>& k_grid);

// Adiabatic control: start in the bound state of D_sigma(s_start) on a schedule
// that stays subcritical; loss = 1 - |<bound state(s_end), psi(s_end)>|^2.
struct AdiabaticControl {
    double epsilon = 0.0;
    double loss = 0.0;
    double norm_drift = 0.0;
};

AdiabaticControl adiabatic_control(const PotentialModel& model, const RadialGrid& g, const Schedule& sch,
                                   const PropagateOptions& opt = {});

} // namespace spc
