#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "spc/error.hpp"

namespace spc {

using cplx = std::complex<double>;

// Natural units: energies in mc^2, lengths in hbar/(mc).  Microscopic time
// tau = (mc^2/hbar) t, macroscopic (slow) time s = eps * tau.  The free
// continua start at E = +1 and E = -1 exactly.
namespace units {
inline constexpr double mass = 1.0;
inline constexpr double upper_edge = +1.0;
inline constexpr double lower_edge = -1.0;
} // namespace units

enum class Shape {
    well,   // indicator of r < radius, unit depth
    flat,   // 1 everywhere (formal test shape)
    none,   // V = 0
};

Shape parse_shape(const std::string& s);
std::string shape_name(Shape s);

// Scalar potential V(sigma, r) = sign * lambda(sigma) * shape(r),
// lambda(sigma) = lambda_c + sigma * lambda_slope.
struct PotentialModel {
    Shape shape = Shape::well;
    double radius = 0.5;
    double lambda_c = 0.0;
    double lambda_slope = 1.0;
    int sign = +1;
    int channel = +1;   // kappa of the radial reduction

    double lambda(double sigma) const { return lambda_c + sigma * lambda_slope; }
    // mean of shape over [a, b]
    double shape_average(double a, double b) const;
    double shape_at(double r) const;
    // outer edge of the support (radius for the well, 0 for none)
    double support() const;
};

double potential_at(const PotentialModel& m, double sigma, double r);

struct RadialGrid {
    double r_max = 0.0;
    int n = 0;
    double h = 0.0;

    double r(int i) const { return i * h; }            // integer points, i = 1..n
    double r_half(int j) const { return (j + 0.5) * h; } // j = 0..n-1
};

RadialGrid build_grid(double r_max, int n);
bool same_grid(const RadialGrid& a, const RadialGrid& b);

enum class NormKind { unit, delta_k, unnormalized };

// Two radial components on the staggered grid.  Both arrays have n entries.
// The component carrying the regular power r^(|kappa|+1) at the origin sits on
// integer points r_i (index i-1, the last entry is the hard wall and stays 0);
// the other one on half points (j+1/2)h.  For kappa > 0 that is u1 on integer
// points, for kappa < 0 it is u2.
struct RadialSpinor {
    RadialGrid grid;
    int channel = +1;
    NormKind norm = NormKind::unnormalized;
    Eigen::VectorXcd u1, u2;

    double r1(int idx) const;
    double r2(int idx) const;
    double norm2() const;
};

RadialSpinor zero_spinor(const RadialGrid& g, int channel);
cplx inner_product(const RadialSpinor& a, const RadialSpinor& b);
void normalize(RadialSpinor& s);

// Symmetric tridiagonal matrix of the radial Dirac operator in interleaved
// ordering: half-point field j at index 2j, integer-point field i at 2i-1.
struct DiscreteOperator {
    RadialGrid grid;
    PotentialModel model;
    double sigma = 0.0;
    Eigen::VectorXd diag;   // size 2n-1
    Eigen::VectorXd off;    // size 2n-2

    int dim() const { return static_cast<int>(diag.size()); }
    Eigen::MatrixXd dense() const;
    Eigen::VectorXcd to_vector(const RadialSpinor& s) const;
    RadialSpinor to_spinor(const Eigen::VectorXcd& x, NormKind kind) const;
    RadialSpinor to_spinor(const Eigen::VectorXd& x, NormKind kind) const;
    // y = H x
    Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
    // index nearest r in the integer-point field
    int index_near(double r) const;
};

DiscreteOperator assemble_operator(const RadialGrid& g, const PotentialModel& m, double sigma);

double hermiticity_residual(const Eigen::MatrixXd& m);

// Per-site weights: cell-averaged shape at each interleaved unknown.
Eigen::VectorXd shape_weights(const DiscreteOperator& op);

} // namespace spc
