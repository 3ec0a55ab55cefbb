#pragma once

#include <vector>

#include "siltlab/lattice_walk.hpp"

namespace silt {

// Power sums of occupation masses.  Terms are accumulated in sorted order with
// Neumaier compensation, so two fields holding the same multiset of masses
// produce bit-identical sums regardless of storage order; the folding
// comparison below depends on that.

// sum of sorted terms with Neumaier compensation
double compensated_sum(std::vector<double>& terms);

// self-intersection weight  sum_x l(x)^q,  q > 1
double silt(const LocalTimeField& field, double q);

// mutual intersection weight  sum_x prod_i l_i(x)  over >= 2 fields sharing
// dimension and geometry
double milt(const std::vector<const LocalTimeField*>& fields);

// (sum_x l(x)^q)^(1/q) for q >= 1; at q = 1 this is the total mass
double field_lq_norm(const LocalTimeField& field, double q);

// fold a lattice field onto the torus of side R: masses of sites in the same
// residue class add up; elapsed time and jump count carry over
LocalTimeField fold(const LocalTimeField& field, int R);

}  // namespace silt
