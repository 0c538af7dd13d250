#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spc/core.hpp"

namespace spc {

struct BoundState {
    double energy = 0.0;
    RadialSpinor wavefunction;
    double sigma = 0.0;
    double kappa = 0.0;   // sqrt(1 - E^2), decay constant of the tail
};

// Shooting on the discrete system: regular recurrence from the origin, decaying
// recurrence from the wall, Wronskian matched at the well edge.  Root in E by
// bracketing (TOMS 748).
BoundState solve_bound_state(const DiscreteOperator& op, double e_lo, double e_hi);

// Normalised discrete Wronskian at the matching index; zero at eigenvalues.
double matching_function(const DiscreteOperator& op, double E);

// Dense Hermitian diagonalisation (verification only).
std::vector<double> dense_spectrum_oracle(const DiscreteOperator& op);

// Eigenvalues of the assembled matrix in (a, b), via Sturm bisection.
std::vector<double> gap_eigenvalues(const DiscreteOperator& op, double a = -1.0, double b = 1.0);

// Fitted exponential decay constant of the tail on r in (r_from, r_to),
// using the exact free exterior form r*k_l(q r) of the regular-site component.
double tail_exponent(const BoundState& bs, double r_from, double r_to);

// Piecewise-constant well, exact matching of interior and exterior solutions.
namespace analytic {
// Determinant whose zeros are the bound-state energies (|E| < 1).
double well_matching(double E, double depth, double radius, int kappa);
// Bound-state energy in (e_lo, e_hi) for V = depth inside radius.
double well_energy(double depth, double radius, int kappa, double e_lo, double e_hi);
// Coupling at which the state reaches E = +1 (V = +lambda inside).
double well_threshold_coupling(double radius, int kappa, double lam_lo, double lam_hi);
} // namespace analytic

struct CriticalSearch {
    double lambda_lo = 0.0;
    double lambda_hi = 50.0;
    std::vector<double> edge_offsets{1e-3, 5e-4, 2.5e-4};
};

struct CriticalCoupling {
    double lambda_c = 0.0;
    double uncertainty = 0.0;
    int branch = -1;                  // ordered eigenvalue index of the diving state
    std::vector<double> lambdas;      // solutions at each edge offset
};

// Coupling where the diving state reaches the edge it moves towards
// (E = +sign), extrapolated in the edge offset.
CriticalCoupling find_critical_coupling(const PotentialModel& tmpl, const RadialGrid& g,
                                        const CriticalSearch& search = {});

struct CriticalData {
    RadialSpinor Phi;
    double energy = 0.0;
    double lambda_c = 0.0;
    double identity_residual = 0.0;
    double C0 = 0.0;
};

// Phi on the grid at model.lambda_c (sigma = 0), with residual and C0.
CriticalData critical_data(const PotentialModel& model, const RadialGrid& g, int branch = -1);

// Normalised residual of the threshold identity for a state computed with the
// given model at sigma (see README for the radial reduction).
double critical_identity_residual(const RadialSpinor& phi, const PotentialModel& model, double sigma = 0.0);

// C0 = lambda_slope * sum shape (|u1|^2 + |u2|^2) h.
double c0_from_derivative(const RadialSpinor& phi, const PotentialModel& model);
// ||sqrt(A_sigma - A_0) phi||^2, by direct quadrature.
double overcritical_weight(const RadialSpinor& phi, const PotentialModel& model, double sigma);

struct TrackSample {
    double sigma, energy, kappa, identity_residual;
};

struct BoundStateTrack {
    std::vector<TrackSample> samples;
    double sigma_c = 0.0;
    double dE_dsigma = 0.0;
    bool complete = true;
    std::string diagnostic;
};

BoundStateTrack track_eigenvalue(const PotentialModel& model, const RadialGrid& g,
                                 const std::vector<double>& sigmas);

// Diving bound state of the model at sigma (the gap state nearest the edge it
// moves towards).
BoundState bound_state_at(const PotentialModel& model, const RadialGrid& g, double sigma);

// Coupling where the diving state sits at energy E_target (subcritical).
double coupling_for_energy(const PotentialModel& tmpl, const RadialGrid& g, double E_target, int branch,
                           double lam_lo, double lam_hi);

} // namespace spc
