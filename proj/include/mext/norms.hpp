#pragma once

#include "mext/field.hpp"

namespace mext {

enum class NormRegion { All, Solid, Hole };

// Cell-quadrature L^p norm over the region (defined cells only):
// (sum |v|^p * cellVolume)^(1/p), pairwise-summed. Requires 1 < p < inf.
double lp_norm(const VectorField& field, double p, NormRegion region);

// Forward-difference W^{1,p} seminorm. Differences are taken only between
// adjacent cells carrying the same mask label, so the jump across the
// solid/hole interface never enters (the continuum norms split the same
// way). Cross-label and undefined neighbours simply drop out.
double w1p_seminorm(const VectorField& field, double p, NormRegion region);

} // namespace mext
