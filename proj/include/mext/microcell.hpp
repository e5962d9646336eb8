#pragma once

#include <array>

#include "mext/numeric.hpp"

namespace mext {

enum class HoleShape { Disk, Box };

// Unit periodicity cell Q = (-1/2,1/2)^d with a reference hole Q_0 inside.
// The solid part is Q_1 = Q minus the closed hole; q0 is the hole volume
// fraction and must sit strictly inside (0,1).
struct MicroCell {
    int dim = 2;
    HoleShape shape = HoleShape::Disk;
    std::array<double, 3> center{0.0, 0.0, 0.0};
    double radius = 0.0;                      // Disk only
    std::array<double, 3> halfWidths{0.0, 0.0, 0.0}; // Box only
    double q0 = 0.0;
};

// Disk holes must lie strictly inside Q; box holes may touch the cell faces
// (perforations then connect across cells) but never exit Q.
MicroCell make_microcell_disk(int dim, const std::array<double, 3>& center, double radius);
MicroCell make_microcell_box(int dim, const std::array<double, 3>& center,
                             const std::array<double, 3>& halfWidths);

// Signed distance to the hole boundary in cell coordinates: negative inside
// Q_0, positive outside, zero on the boundary. Exact for both shapes, valid
// for any x (not just x in Q).
double signed_distance_to_hole(const MicroCell& cell, const std::array<double, 3>& x);

// Closest point of the hole boundary; the reflection construction of the
// extension operator relies on it. Degenerate inputs (disk center, box face
// ties) resolve deterministically toward the lowest axis.
std::array<double, 3> nearest_hole_boundary_point(const MicroCell& cell,
                                                  const std::array<double, 3>& x);

} // namespace mext
