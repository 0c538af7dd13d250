#pragma once

#include <functional>
#include <string>
#include <vector>

#include "spc/evolution.hpp"
#include "spc/scattering.hpp"

namespace spc {

// Runs fn(0..n-1) on at most `jobs` threads; results are written by index so
// the outcome does not depend on scheduling.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn);

struct ScalingFit {
    double slope = 0.0, intercept = 0.0, stderr_slope = 0.0, r_squared = 0.0;
    std::vector<std::pair<double, double>> points;   // (x, y), unlogged
};

// Ordinary least squares of log y on log x.
ScalingFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

// s_d solving s_d = 4 eps / (k(s_d) Delta(s_d)) with the peak and width laws
// of the fitted constants and sigma(s) = s.
double fixed_point_sd(const ResonanceConstants& c, double epsilon);

// Microscopic static decay times t_d(sigma) = s_d / eps.
struct DecayTable {
    std::vector<double> sigma, t_d, formula, norm_drift;
};

DecayTable static_decay_table(const PotentialModel& model, const RadialGrid& g, const CriticalData& crit,
                              std::vector<double> sigmas, int jobs, const PropagateOptions& opt = {});

// Self-consistent static decay time: sigma = eps * t_d(sigma), with t_d
// interpolated linearly in log-log between table entries.
double self_consistent_sd(const DecayTable& table, double epsilon);

struct StaticScalingStudy {
    DecayTable table;
    std::vector<double> epsilon, s_d;
    ScalingFit fit;
};

StaticScalingStudy static_scaling_study(const DecayTable& table, std::vector<double> epsilons);

struct ScalingRun {
    double epsilon = 0.0;
    double s_d = 0.0;
    double s_d_refined = 0.0;   // with half the time step
    double norm_drift = 0.0;
    bool valid = false;
    std::string note;
    std::vector<double> times, survival;
};

struct ScalingStudy {
    std::vector<ScalingRun> runs;
    ScalingFit fit;
    int excluded = 0;
    std::vector<std::string> warnings;
};

struct ScalingOptions {
    double lead = 50.0;         // start this many microscopic time units before criticality
    double s_cap = 2.0;         // give up (no crossing) beyond this s
    double slope = 1.0;         // sigma(s) = slope * s
    bool refine_check = true;   // rerun with half the step; drop runs that move by > 5%
    int jobs = 1;
    PropagateOptions propagate;
};

// Full time-dependent runs on sigma(s) = slope*s starting from Phi; s_d from
// the survival against Phi.
ScalingStudy scaling_study(const PotentialModel& model, const RadialGrid& g, const CriticalData& crit,
                           std::vector<double> epsilons, const ScalingOptions& opt = {});

struct ShortTimeStudy {
    std::vector<ShortTimeResult> a_runs, S_runs;
    ScalingFit fit_a, fit_S;
    double control_p = 0.0;     // a = 0
    int excluded = 0;
    std::vector<std::string> warnings;
};

struct ShortTimeSweep {
    std::vector<double> a_values, S_values;
    double a_fixed = 0.1, S_fixed = 1e-4, epsilon = 0.1;
    double max_p = 0.05;        // points above are non-perturbative and dropped
    int jobs = 1;
};

ShortTimeStudy short_time_study(const PotentialModel& model, const RadialGrid& g, const CriticalData& crit,
                                const ShortTimeSweep& sweep, const PropagateOptions& opt = {});

// Reference per-dk density k^2 * (resonance line shape) at sigma.
std::vector<SpectrumPoint> profile_density(const ResonanceConstants& c, double sigma, const std::vector<double>& k);

// k grid for a run spectrum: the scan window plus dense points over
// k_peak +- 3 Delta of the reference profile.
std::vector<double> comparison_k_grid(const ResonanceProfile& profile, int dense = 121);

struct SpectrumComparison {
    double distance = 0.0;      // normalised L1 over k_peak +- 3 Delta
    double peak_run = 0.0;      // argmax of the run spectrum over all its points
    double peak_ref = 0.0;
    std::string label;          // "resonance-like" (distance < 0.3) or "washed-out"
};

SpectrumComparison spectrum_comparison(const std::vector<SpectrumPoint>& run, const ResonanceConstants& c,
                                       const ResonanceProfile& profile);

} // namespace spc
