#pragma once

#include <vector>

#include "spc/core.hpp"

namespace spc::detail {

// Three-term recurrence of the tridiagonal system at energy E.
// Outward: regular solution from the origin, indices 0..last.
// Inward: solution vanishing beyond the wall, indices first..N-1.
// Rescaling uses positive factors only, so signs survive.  With keep=false only
// the trailing pair is guaranteed to be consistently scaled.
void shoot_out(const DiscreteOperator& op, double E, int last, std::vector<double>& x, bool keep);
void shoot_in(const DiscreteOperator& op, double E, int first, std::vector<double>& y, bool keep);

// Continue a solution given at (i0, i0+1) forward to index last.
void continue_out(const DiscreteOperator& op, double E, int i0, std::vector<double>& x, int last);

} // namespace spc::detail
