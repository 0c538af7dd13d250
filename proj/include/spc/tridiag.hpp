#pragma once

#include <vector>

#include <Eigen/Core>

namespace spc::tridiag {

// Number of eigenvalues of the symmetric tridiagonal (d, e) strictly below x
// (Sylvester inertia of T - x via the LDL^T pivots).
int count_below(const Eigen::VectorXd& d, const Eigen::VectorXd& e, double x);

// k-th smallest eigenvalue (0-based) by bisection on the Sturm count.
double eigenvalue(const Eigen::VectorXd& d, const Eigen::VectorXd& e, int k);

// All eigenvalues in the open interval (a, b), ascending.
std::vector<double> eigenvalues_in(const Eigen::VectorXd& d, const Eigen::VectorXd& e,
                                   double a, double b);

// Eigenvector for an (accurately known) eigenvalue by inverse iteration.
Eigen::VectorXd eigenvector(const Eigen::VectorXd& d, const Eigen::VectorXd& e, double lambda);

// Solve (T - shift) x = b with partial pivoting (LAPACK gtsv scheme).
Eigen::VectorXd solve_shifted(const Eigen::VectorXd& d, const Eigen::VectorXd& e,
                              double shift, const Eigen::VectorXd& b);

// Gershgorin interval of the spectrum.
std::pair<double, double> gershgorin(const Eigen::VectorXd& d, const Eigen::VectorXd& e);

} // namespace spc::tridiag
