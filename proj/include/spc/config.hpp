#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spc/evolution.hpp"
#include "spc/scattering.hpp"
#include "spc/statics.hpp"
#include "spc/studies.hpp"

namespace spc {

struct TrackSection {
    std::vector<double> sigmas;
};

struct ResonanceSection {
    std::vector<double> sigmas;
    int k_points = 200;
    int refine = 41;
};

struct FitSection {
    std::vector<double> sigmas;
    FitPin pin = FitPin::c0;
    double window = 3.0;
    double max_residual = 0.25;
    int k_points = 200;
};

struct EvolveSection {
    Schedule schedule;
    PropagateOptions propagate;
    std::string initial = "critical";   // critical: Phi; bound: bound state of D at s_start
    bool spectrum = false;
};

struct StaticDecaySection {
    std::vector<double> sigmas;
    std::vector<double> epsilons{1.0};
    PropagateOptions propagate;
};

struct ShortTimeSection {
    ShortTimeSweep sweep;
    PropagateOptions propagate;
};

struct ScalingSection {
    std::vector<double> epsilons;
    ScalingOptions options;
    std::vector<double> static_sigmas;     // optional static-operator study
    std::vector<double> static_epsilons;
};

struct SpectrumSection {
    double sigma = 0.1;                    // static run and reference profile
    std::vector<double> fit_sigmas;        // decade for the reference constants
    double static_duration = 600.0;        // microscopic time of the static run
    Schedule tent;
    PropagateOptions propagate;
};

struct RunConfig {
    nlohmann::json raw;
    std::string hash;
    PotentialModel model;
    bool lambda_auto = false;
    RadialGrid grid;
    CriticalSearch critical;
    std::optional<TrackSection> track;
    std::optional<ResonanceSection> resonance;
    std::optional<FitSection> fit;
    std::optional<EvolveSection> evolve;
    std::optional<StaticDecaySection> static_decay;
    std::optional<ShortTimeSection> short_time;
    std::optional<ScalingSection> scaling;
    std::optional<SpectrumSection> spectrum_compare;
};

// Strict parse: unknown keys, wrong types and out-of-range values are all
// reported together in one configuration error.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

// Stable 64-bit FNV-1a hash of the canonical (sorted, compact) JSON text.
std::string config_hash(const nlohmann::json& j);

} // namespace spc
